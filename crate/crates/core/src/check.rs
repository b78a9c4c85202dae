//! Violation records shared by all exhaustive checks.

use crate::coalgebra::{TensorElement, TensorPairElement, TensorTripleElement};
use crate::graded::{Element, GradedBasis};

/// Whether a check collects every violation or stops at the first one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exhaustive,
    FirstViolation,
}

impl Mode {
    pub(crate) fn done(self, found: &[Violation]) -> bool {
        self == Mode::FirstViolation && !found.is_empty()
    }
}

/// Non-zero left-minus-right value of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Residual {
    Vector(Element),
    Tensor(TensorElement),
    Pair(TensorPairElement),
    Triple(TensorTripleElement),
}

impl Residual {
    pub fn render(&self, basis: &GradedBasis) -> String {
        match self {
            Residual::Vector(e) => e.render(basis),
            Residual::Tensor(t) => t.render(basis),
            Residual::Pair(p) => p.render(basis),
            Residual::Triple(t) => t.render(basis),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Vector(e) => e.is_zero(),
            Residual::Tensor(t) => t.is_zero(),
            Residual::Pair(p) => p.is_zero(),
            Residual::Triple(t) => t.is_zero(),
        }
    }
}

/// A witness that an identity fails: the scope it was checked in (for
/// example `Const=4` or `order=2`), the basis tuple it was evaluated on, and
/// the residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub scope: Vec<(String, i64)>,
    pub tuple: Vec<usize>,
    pub residual: Residual,
}

impl Violation {
    pub fn new(tuple: Vec<usize>, residual: Residual) -> Self {
        Violation {
            scope: Vec::new(),
            tuple,
            residual,
        }
    }

    pub fn with_scope(mut self, key: &str, value: i64) -> Self {
        self.scope.push((key.to_string(), value));
        self
    }

    pub fn scope_value(&self, key: &str) -> Option<i64> {
        self.scope.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}
