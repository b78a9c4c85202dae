use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{Element, GradedBasis, Scalar};

/// A multilinear operation `V^{(x) arity} -> V` of fixed degree, stored by
/// its structure constants on basis tuples.
///
/// Constants are plain values on basis tuples: no Koszul signs are applied
/// when evaluating. Signs only appear when a map is moved past graded
/// arguments, which the callers handle explicitly.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiOp {
    arity: usize,
    degree: i64,
    basis: Arc<GradedBasis>,
    constants: BTreeMap<Vec<usize>, Element>,
}

impl MultiOp {
    /// Validates indices and degree homogeneity. Zero images are dropped.
    pub fn new(
        basis: Arc<GradedBasis>,
        arity: usize,
        degree: i64,
        constants: impl IntoIterator<Item = (Vec<usize>, Element)>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Malformed(
                "operations must have positive arity".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for (tuple, image) in constants {
            if tuple.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: tuple.len(),
                });
            }
            if tuple
                .iter()
                .chain(image.support().collect::<Vec<_>>().iter())
                .any(|&i| i >= basis.dim())
            {
                return Err(Error::Malformed(format!(
                    "basis index out of range in {tuple:?}"
                )));
            }
            if image.is_zero() {
                continue;
            }
            let target = basis.word_degree(&tuple) + degree;
            if !image.is_homogeneous_of(&basis, target) {
                return Err(Error::Degree(format!(
                    "image of {} must have degree {target}, got {}",
                    render_tuple(&basis, &tuple),
                    image.render(&basis)
                )));
            }
            if map.insert(tuple.clone(), image).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate constant for {}",
                    render_tuple(&basis, &tuple)
                )));
            }
        }
        Ok(MultiOp {
            arity,
            degree,
            basis,
            constants: map,
        })
    }

    pub fn zero(basis: Arc<GradedBasis>, arity: usize, degree: i64) -> Self {
        MultiOp {
            arity,
            degree,
            basis,
            constants: BTreeMap::new(),
        }
    }

    pub fn identity(basis: Arc<GradedBasis>) -> Self {
        let constants = (0..basis.dim())
            .map(|i| (vec![i], Element::basis_vector(i)))
            .collect();
        MultiOp {
            arity: 1,
            degree: 0,
            basis,
            constants,
        }
    }

    /// Tabulates `f` on every basis tuple.
    pub fn from_fn(
        basis: Arc<GradedBasis>,
        arity: usize,
        degree: i64,
        mut f: impl FnMut(&[usize]) -> Element,
    ) -> Result<Self> {
        let constants: Vec<_> = basis
            .tuples(arity)
            .map(|t| {
                let image = f(&t);
                (t, image)
            })
            .collect();
        MultiOp::new(basis, arity, degree, constants)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&[usize], &Element)> + '_ {
        self.constants.iter().map(|(t, e)| (t.as_slice(), e))
    }

    /// Image of a basis tuple (zero when no constant is stored).
    pub fn on_basis(&self, tuple: &[usize]) -> Option<&Element> {
        self.constants.get(tuple)
    }

    pub fn same_space(&self, other: &MultiOp) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis
    }

    fn require_same_space(&self, other: &MultiOp) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    /// Multilinear extension of the constants.
    pub fn apply(&self, args: &[Element]) -> Result<Element> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        if let Some(bad) = args
            .iter()
            .flat_map(|a| a.support())
            .find(|&i| i >= self.basis.dim())
        {
            return Err(Error::Malformed(format!("basis index {bad} out of range")));
        }
        Ok(self.apply_unchecked(args))
    }

    pub(crate) fn apply_unchecked(&self, args: &[Element]) -> Element {
        let mut out = Element::zero();
        let mut tuple = Vec::with_capacity(self.arity);
        self.accumulate(args, &mut tuple, &Scalar::one(), &mut out);
        out
    }

    fn accumulate(
        &self,
        args: &[Element],
        tuple: &mut Vec<usize>,
        coeff: &Scalar,
        out: &mut Element,
    ) {
        let depth = tuple.len();
        if depth == args.len() {
            if let Some(image) = self.constants.get(tuple.as_slice()) {
                out.add_scaled(image, coeff);
            }
            return;
        }
        for (i, c) in args[depth].terms() {
            tuple.push(i);
            self.accumulate(args, tuple, &(coeff * c), out);
            tuple.pop();
        }
    }

    /// Evaluates on a tuple whose entries are basis vectors, except that one
    /// slot may hold an arbitrary element.
    pub(crate) fn apply_with_slot(&self, tuple: &[usize], slot: usize, value: &Element) -> Element {
        let mut out = Element::zero();
        let mut key = tuple.to_vec();
        for (i, c) in value.terms() {
            key[slot] = i;
            if let Some(image) = self.constants.get(key.as_slice()) {
                out.add_scaled(image, c);
            }
        }
        out
    }

    pub fn eval_basis(&self, tuple: &[usize]) -> Element {
        self.constants.get(tuple).cloned().unwrap_or_default()
    }

    /// `self + c * other`
    pub fn add_scaled(&self, other: &MultiOp, c: &Scalar) -> Result<MultiOp> {
        self.require_same_space(other)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        if other.is_zero() || c.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.scaled(c).with_degree(self.degree));
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add operations of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut constants = self.constants.clone();
        for (t, e) in &other.constants {
            let entry = constants.entry(t.clone()).or_default();
            entry.add_scaled(e, c);
            if entry.is_zero() {
                constants.remove(t);
            }
        }
        Ok(MultiOp {
            constants,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &MultiOp) -> Result<MultiOp> {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &MultiOp) -> Result<MultiOp> {
        self.add_scaled(other, &-Scalar::one())
    }

    pub fn scaled(&self, c: &Scalar) -> MultiOp {
        let constants = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.constants
                .iter()
                .map(|(t, e)| (t.clone(), e.scaled(c)))
                .collect()
        };
        MultiOp {
            constants,
            ..self.clone()
        }
    }

    /// Relabels the degree of a zero operation; non-zero operations keep theirs.
    fn with_degree(mut self, degree: i64) -> MultiOp {
        if self.is_zero() {
            self.degree = degree;
        }
        self
    }

    /// `self o other` for unary operations.
    pub fn compose(&self, other: &MultiOp) -> Result<MultiOp> {
        self.require_same_space(other)?;
        if self.arity != 1 || other.arity != 1 {
            return Err(Error::Precondition(
                "composition is defined for unary operations".into(),
            ));
        }
        let constants: Vec<_> = other
            .constants
            .iter()
            .map(|(t, e)| (t.clone(), self.apply_unchecked(std::slice::from_ref(e))))
            .collect();
        MultiOp::new(self.basis.clone(), 1, self.degree + other.degree, constants)
    }

    /// Graded commutator `[A, B] = AB - (-1)^{|A||B|} BA` of unary operations.
    pub fn commutator(&self, other: &MultiOp) -> Result<MultiOp> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        ab.add_scaled(&ba, &-Scalar::sign(self.degree * other.degree))
    }

    /// Reinterprets the same constants over another basis with the same
    /// dimension, e.g. transporting between `V` and `sV`. The new degree is
    /// validated against the new basis.
    pub fn transport(&self, basis: Arc<GradedBasis>, degree: i64) -> Result<MultiOp> {
        if basis.dim() != self.basis.dim() {
            return Err(Error::BasisMismatch);
        }
        MultiOp::new(basis, self.arity, degree, self.constants.clone())
    }

    /// One line per non-zero constant: `a b -> name:coeff ...`.
    pub fn render_table(&self) -> String {
        self.constants
            .iter()
            .map(|(t, e)| {
                format!(
                    "{} -> {}",
                    render_tuple(&self.basis, t),
                    e.render(&self.basis)
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn render_tuple(basis: &GradedBasis, tuple: &[usize]) -> String {
    tuple
        .iter()
        .map(|&i| basis.name(i))
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Debug for MultiOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MultiOp(arity {}, degree {})", self.arity, self.degree)?;
        write!(f, "{}", self.render_table())
    }
}
