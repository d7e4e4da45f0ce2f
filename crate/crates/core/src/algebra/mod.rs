//! Quaternions, rotations, roots of unity, Jacobi polynomials and exact
//! combinatorics.

mod combinatorics;
mod jacobi;
mod point;
pub(crate) mod quaternion;
mod roots;
mod rotation;

pub use combinatorics::{binomial, MAX_LEVEL};
pub use jacobi::jacobi_poly;
pub use point::ToroidalPoint;
pub use quaternion::{null_vector, scalar_product, ComplexQuaternion, Quat, Quaternion};
pub use roots::RootsOfUnity;
pub use rotation::Rotation;
