//! Exact verification of higher derived brackets on graded Leibniz algebras.
//!
//! Starting from a finite-dimensional graded Leibniz algebra and a truncated
//! deformation `delta_0 + t delta_1 + ...` of its differential, the crate
//! builds the higher derived brackets `l_i` on the shifted space and checks,
//! exhaustively on basis tuples and with rational arithmetic, that they form
//! a strong homotopy Leibniz algebra. The same data is checked through the
//! coderivation picture on the tensor coalgebra, and gauge transformations
//! of deformations are verified to induce isomorphic structures.

pub mod check;
pub mod coalgebra;
pub mod derived;
pub mod error;
pub mod fixtures;
pub mod gauge;
pub mod graded;
pub mod io;
pub mod leibniz;
pub mod linalg;

pub use error::{Error, Result};
pub use graded::{Element, GradedBasis, Permutation, Scalar, Shift};
pub use leibniz::MultiOp;
