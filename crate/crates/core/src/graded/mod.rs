//! Degrees, exact scalars, permutations and the sign bookkeeping shared by
//! every other module.

mod basis;
mod perm;
mod scalar;
pub mod tensor;

pub use basis::{shifted_degrees, Element, GradedBasis, Shift, Tuples};
pub(crate) use perm::koszul_parity;
pub use perm::{anti_koszul_sign, koszul_sign, unshuffles, Permutation};
pub use scalar::Scalar;
