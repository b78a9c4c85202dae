//! Permutations, unshuffles and the Koszul / anti-Koszul signs.
//!
//! A permutation `sigma` of `{1..n}` acts on words by
//! `(x_1, ..., x_n) -> (x_{sigma(1)}, ..., x_{sigma(n)})`. The Koszul sign
//! `eps(sigma)` is the sign picked up by that rearrangement when every
//! adjacent swap of letters of degrees `a`, `b` costs `(-1)^{ab}`.

use std::fmt;

use itertools::Itertools;

use super::Scalar;
use crate::error::{Error, Result};

/// A bijection of `{1..n}`, stored by its 1-based images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::Malformed(format!("{images:?} is not a permutation")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// The transposition exchanging `a` and `b` (1-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(Error::Malformed(format!(
                "transposition ({a} {b}) outside S_{n}"
            )));
        }
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(a - 1, b - 1);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `sigma(i)` for 1-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Product `self * other`: acting on words, `other` is applied first and
    /// `self` second, so the result sends `b` to `other(self(b))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Malformed(
                "composing permutations of different sizes".into(),
            ));
        }
        Ok(Permutation {
            images: self.images.iter().map(|&b| other.image(b)).collect(),
        })
    }

    /// Rearranges a slice: `out[a] = items[sigma(a+1) - 1]`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.images.iter().map(|&v| items[v - 1].clone()).collect()
    }

    /// `sgn(sigma)`
    pub fn parity_sign(&self) -> Scalar {
        Scalar::sign(self.inversions().count() as i64)
    }

    /// Pairs of positions `a < b` (0-based) with `sigma(a) > sigma(b)`.
    fn inversions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
            .filter(move |&(a, b)| self.images[a] > self.images[b])
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

fn check_len(sigma: &Permutation, degrees: &[i64]) -> Result<()> {
    if sigma.len() != degrees.len() {
        return Err(Error::Malformed(format!(
            "permutation of size {} applied to {} degrees",
            sigma.len(),
            degrees.len()
        )));
    }
    Ok(())
}

/// Parity of the Koszul sign as a bool (`true` for `-1`). Computed by bubble
/// sorting the image sequence with adjacent swaps; each swap of letters with
/// degrees `a`, `b` flips the parity when `ab` is odd.
pub(crate) fn koszul_parity(images: &[usize], degrees: &[i64]) -> bool {
    let mut seq: Vec<usize> = images.to_vec();
    let mut odd = false;
    let n = seq.len();
    for pass in 0..n {
        let mut swapped = false;
        for a in 0..n.saturating_sub(1 + pass) {
            if seq[a] > seq[a + 1] {
                let (p, q) = (seq[a], seq[a + 1]);
                if degrees[p - 1] * degrees[q - 1] % 2 != 0 {
                    odd = !odd;
                }
                seq.swap(a, a + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    odd
}

/// The Koszul sign `eps(sigma)` for letters of the given degrees.
pub fn koszul_sign(sigma: &Permutation, degrees: &[i64]) -> Result<Scalar> {
    check_len(sigma, degrees)?;
    Ok(if koszul_parity(sigma.images(), degrees) {
        -Scalar::one()
    } else {
        Scalar::one()
    })
}

/// The anti-Koszul sign `chi(sigma) = sgn(sigma) eps(sigma)`.
pub fn anti_koszul_sign(sigma: &Permutation, degrees: &[i64]) -> Result<Scalar> {
    Ok(sigma.parity_sign() * koszul_sign(sigma, degrees)?)
}

/// All `(p,q)`-unshuffles of `S_{p+q}`: increasing on positions `1..p` and on
/// `p+1..p+q`. There are `binomial(p+q, p)` of them, returned in
/// lexicographic order of images.
pub fn unshuffles(p: usize, q: usize) -> Vec<Permutation> {
    let n = p + q;
    (1..=n)
        .combinations(p)
        .map(|head| {
            let mut images = head.clone();
            images.extend((1..=n).filter(|v| !head.contains(v)));
            Permutation { images }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![3, 1]).is_err());
    }

    #[test]
    fn identity_is_plus_one() {
        for degrees in [vec![], vec![1], vec![1, 1, 3], vec![2, -1, 5, 0]] {
            let id = Permutation::identity(degrees.len());
            assert_eq!(koszul_sign(&id, &degrees).unwrap(), Scalar::one());
            assert_eq!(anti_koszul_sign(&id, &degrees).unwrap(), Scalar::one());
        }
    }

    #[test]
    fn odd_transposition_is_minus_one() {
        let t = perm(&[2, 1]);
        assert_eq!(koszul_sign(&t, &[1, 1]).unwrap(), -Scalar::one());
        // sgn = -1, eps = (-1)^{1*2} = +1
        assert_eq!(anti_koszul_sign(&t, &[1, 2]).unwrap(), -Scalar::one());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(koszul_sign(&perm(&[2, 1]), &[1]).is_err());
        assert!(anti_koszul_sign(&perm(&[1]), &[1, 1]).is_err());
    }

    #[test]
    fn unshuffle_counts_and_order() {
        let u = unshuffles(2, 1);
        assert_eq!(
            u,
            vec![perm(&[1, 2, 3]), perm(&[1, 3, 2]), perm(&[2, 3, 1])]
        );
        assert_eq!(unshuffles(0, 3), vec![Permutation::identity(3)]);
        assert_eq!(unshuffles(3, 0), vec![Permutation::identity(3)]);
        assert_eq!(unshuffles(0, 0), vec![Permutation::identity(0)]);
    }

    #[test]
    fn compose_matches_sequential_action() {
        let sigma = perm(&[2, 3, 1]);
        let tau = perm(&[3, 1, 2]);
        let word = ['a', 'b', 'c'];
        let seq = sigma.permute(&tau.permute(&word));
        assert_eq!(sigma.compose(&tau).unwrap().permute(&word), seq);
    }
}
