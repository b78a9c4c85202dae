//! Finite graded bases and sparse vectors over them.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use super::Scalar;
use crate::error::{Error, Result};

/// Direction of the degree-shift operator `s` (raise) or `s^{-1}` (lower).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shift {
    Raise,
    Lower,
}

impl Shift {
    /// Degree of the operator itself: `+1` for `s`, `-1` for `s^{-1}`.
    pub fn degree(self) -> i64 {
        match self {
            Shift::Raise => 1,
            Shift::Lower => -1,
        }
    }

    pub fn inverse(self) -> Shift {
        match self {
            Shift::Raise => Shift::Lower,
            Shift::Lower => Shift::Raise,
        }
    }
}

/// Named basis vectors with integer degrees. The order of entries is the
/// enumeration order used by every exhaustive check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    entries: Vec<(String, i64)>,
    index: HashMap<String, usize>,
}

impl GradedBasis {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, i64)>) -> Result<Self> {
        let entries: Vec<(String, i64)> = entries.into_iter().map(|(n, d)| (n.into(), d)).collect();
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (name, _)) in entries.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Malformed("empty basis name".into()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate basis name `{name}`")));
            }
        }
        Ok(GradedBasis { entries, index })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.entries[i].1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.entries[i].0
    }

    pub fn entries(&self) -> &[(String, i64)] {
        &self.entries
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    /// Sum of degrees of the letters of a word.
    pub fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|&i| self.degree(i)).sum()
    }

    /// Every tuple of basis indices of the given length, in lexicographic
    /// order of indices.
    pub fn tuples(&self, len: usize) -> Tuples {
        Tuples::new(self.dim(), len)
    }
}

/// `sV` or `s^{-1}V`: same names, every degree moved by the operator's degree.
pub fn shifted_degrees(basis: &GradedBasis, direction: Shift) -> GradedBasis {
    let delta = direction.degree();
    GradedBasis {
        entries: basis
            .entries
            .iter()
            .map(|(n, d)| (n.clone(), d + delta))
            .collect(),
        index: basis.index.clone(),
    }
}

/// Odometer over `{0..dim}^len`.
#[derive(Debug, Clone)]
pub struct Tuples {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl Tuples {
    fn new(dim: usize, len: usize) -> Self {
        let current = if dim == 0 && len > 0 {
            None
        } else {
            Some(vec![0; len])
        };
        Tuples { dim, current }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.dim {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// A sparse linear combination of basis vectors. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    coefficients: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis_vector(i: usize) -> Self {
        Element::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(i, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, i: usize) -> Scalar {
        self.coefficients
            .get(&i)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.coefficients.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coefficients.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coefficients.entry(i) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Element, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.terms() {
            self.add_term(i, x * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// `Some(g)` when every supporting basis vector has degree `g`; the zero
    /// element has no degree.
    pub fn homogeneous_degree(&self, basis: &GradedBasis) -> Option<i64> {
        let mut degrees = self.support().map(|i| basis.degree(i));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, basis: &GradedBasis, degree: i64) -> bool {
        self.support().all(|i| basis.degree(i) == degree)
    }

    /// Renders as `name:coeff` pairs in basis order, or `0`.
    pub fn render(&self, basis: &GradedBasis) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(i, c)| format!("{}:{}", basis.name(i), c))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coefficients.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(degrees: &[i64]) -> GradedBasis {
        GradedBasis::new(
            degrees
                .iter()
                .enumerate()
                .map(|(i, &d)| (format!("v{i}"), d)),
        )
        .unwrap()
    }

    #[test]
    fn shift_raises_and_lowers() {
        let b = basis(&[0, 1]);
        assert_eq!(shifted_degrees(&b, Shift::Raise).degrees(), vec![1, 2]);
        let round = shifted_degrees(&shifted_degrees(&b, Shift::Raise), Shift::Lower);
        assert_eq!(round, b);
        let b = basis(&[-1, 0, 2]);
        assert_eq!(shifted_degrees(&b, Shift::Lower).degrees(), vec![-2, -1, 1]);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(GradedBasis::new([("x", 0), ("x", 1)]).is_err());
    }

    #[test]
    fn tuples_enumerate_in_order() {
        let b = basis(&[0, 0, 0]);
        let all: Vec<_> = b.tuples(2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
        assert_eq!(b.tuples(0).count(), 1);
        assert_eq!(basis(&[]).tuples(2).count(), 0);
    }

    #[test]
    fn element_drops_zeros() {
        let mut e = Element::term(0, Scalar::from_int(2));
        e.add_term(0, Scalar::from_int(-2));
        assert!(e.is_zero());
        e.add_term(1, Scalar::zero());
        assert!(e.is_zero());
    }

    #[test]
    fn homogeneity() {
        let b = basis(&[0, 0, 1]);
        let e = Element::from_terms([(0, Scalar::one()), (1, Scalar::one())]);
        assert_eq!(e.homogeneous_degree(&b), Some(0));
        let mixed = e.add(&Element::basis_vector(2));
        assert_eq!(mixed.homogeneous_degree(&b), None);
        assert!(Element::zero().is_homogeneous_of(&b, 7));
    }
}
