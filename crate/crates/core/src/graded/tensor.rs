//! Signed evaluation of tensor products of graded maps.
//!
//! Letters carry a basis index together with a shift count, so a letter of
//! `s^k V` has degree `|e_i| + k`. A tensor product of maps acts with the
//! Koszul rule `(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)`.

use super::{GradedBasis, Scalar, Shift};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub shift: i64,
}

impl Letter {
    pub fn new(index: usize, shift: i64) -> Self {
        Letter { index, shift }
    }

    pub fn degree(&self, basis: &GradedBasis) -> i64 {
        basis.degree(self.index) + self.shift
    }
}

/// A homogeneous linear map acting on single letters.
pub trait LetterMap {
    fn degree(&self) -> i64;
    fn map_letter(&self, basis: &GradedBasis, letter: Letter) -> Vec<(Letter, Scalar)>;
}

/// The identity map.
pub struct Identity;

impl LetterMap for Identity {
    fn degree(&self) -> i64 {
        0
    }

    fn map_letter(&self, _: &GradedBasis, letter: Letter) -> Vec<(Letter, Scalar)> {
        vec![(letter, Scalar::one())]
    }
}

impl LetterMap for Shift {
    fn degree(&self) -> i64 {
        Shift::degree(*self)
    }

    fn map_letter(&self, _: &GradedBasis, letter: Letter) -> Vec<(Letter, Scalar)> {
        vec![(
            Letter::new(letter.index, letter.shift + Shift::degree(*self)),
            Scalar::one(),
        )]
    }
}

/// Composite `maps[0] o maps[1] o ... ` (rightmost applied first).
pub struct Composite<'a>(pub Vec<&'a dyn LetterMap>);

impl LetterMap for Composite<'_> {
    fn degree(&self) -> i64 {
        self.0.iter().map(|m| m.degree()).sum()
    }

    fn map_letter(&self, basis: &GradedBasis, letter: Letter) -> Vec<(Letter, Scalar)> {
        let mut current = vec![(letter, Scalar::one())];
        for m in self.0.iter().rev() {
            let mut next = Vec::new();
            for (l, c) in current {
                for (l2, c2) in m.map_letter(basis, l) {
                    next.push((l2, &c * &c2));
                }
            }
            current = next;
        }
        current
    }
}

/// A linear combination of words of letters.
pub type LetterTensor = Vec<(Vec<Letter>, Scalar)>;

/// Applies `maps[0] (x) ... (x) maps[n-1]` to a word of `n` letters.
///
/// Panics if the number of maps differs from the word length.
pub fn apply_tensor_map(
    basis: &GradedBasis,
    maps: &[&dyn LetterMap],
    word: &[Letter],
    coeff: &Scalar,
) -> LetterTensor {
    assert_eq!(
        maps.len(),
        word.len(),
        "tensor map arity differs from word length"
    );
    // f_a passes the letters y_1..y_{a-1}
    let mut passed = 0i64;
    let mut exponent = 0i64;
    for (m, l) in maps.iter().zip(word) {
        exponent += m.degree() * passed;
        passed += l.degree(basis);
    }
    let mut out: LetterTensor = vec![(
        Vec::with_capacity(word.len()),
        coeff * &Scalar::sign(exponent),
    )];
    for (m, &l) in maps.iter().zip(word) {
        let images = m.map_letter(basis, l);
        let mut next = Vec::with_capacity(out.len() * images.len());
        for (w, c) in &out {
            for (l2, c2) in &images {
                let mut w2 = w.clone();
                w2.push(*l2);
                next.push((w2, c * c2));
            }
        }
        out = next;
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Applies a tensor map to every term of a letter tensor.
pub fn apply_tensor_map_all(
    basis: &GradedBasis,
    maps: &[&dyn LetterMap],
    input: &LetterTensor,
) -> LetterTensor {
    normalize(
        input
            .iter()
            .flat_map(|(w, c)| apply_tensor_map(basis, maps, w, c))
            .collect(),
    )
}

/// Merges equal words and drops zero coefficients; output sorted by word.
pub fn normalize(input: LetterTensor) -> LetterTensor {
    let mut acc: std::collections::BTreeMap<Vec<Letter>, Scalar> = Default::default();
    for (w, c) in input {
        *acc.entry(w).or_insert_with(Scalar::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_map_picks_up_no_sign_in_first_slot() {
        let basis = GradedBasis::new([("x", 1), ("y", 1)]).unwrap();
        let s = Shift::Raise;
        let word = [Letter::new(0, 0), Letter::new(1, 0)];
        let out = apply_tensor_map(&basis, &[&s, &Identity], &word, &Scalar::one());
        assert_eq!(
            out,
            vec![(vec![Letter::new(0, 1), Letter::new(1, 0)], Scalar::one())]
        );
        // s in the second slot passes x of degree 1
        let out = apply_tensor_map(&basis, &[&Identity, &s], &word, &Scalar::one());
        assert_eq!(
            out,
            vec![(vec![Letter::new(0, 0), Letter::new(1, 1)], -Scalar::one())]
        );
    }

    #[test]
    fn composite_degree_adds() {
        let c = Composite(vec![&Shift::Raise, &Shift::Raise, &Shift::Lower]);
        assert_eq!(LetterMap::degree(&c), 1);
    }
}
