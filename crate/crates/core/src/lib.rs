//! Laplacian eigenmodes on the three-sphere.
//!
//! The eigenspace `V^k` of the Laplacian on S³ (eigenvalue `-k(k+2)`, dimension
//! `(k+1)²`) is handled through two bases:
//!
//! * the toroidal basis `T_{k;m1,m2}` ([`bases::eval_t`]), built from Jacobi
//!   polynomials in toroidal coordinates `(chi, theta, phi)`;
//! * the null-vector basis `Phi^k_{IJ} = (X·N_IJ)^k` ([`bases::eval_phi`]), defined
//!   for even `k`, whose members are powers of the dot product with null vectors
//!   placed at `(k+1)`-th roots of unity.
//!
//! On top of these the crate computes the exact change of basis, the matrix of an
//! arbitrary SO(4) rotation acting on `V^k` ([`rotations`]), and the invariant
//! subspaces of finite holonomy groups such as lens and prism spaces
//! ([`quotients`]). The [`quad`] module integrates over S³ and provides the
//! numerical oracles used to check every closed form.

pub mod algebra;
pub mod bases;
mod error;
pub mod linalg;
pub mod quad;
pub mod quotients;
pub mod rotations;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use algebra::{ComplexQuaternion, Quaternion, RootsOfUnity, Rotation, ToroidalPoint};
pub use bases::{Basis, CoeffMatrix, ModeB2, ModeB3};
pub use quad::QuadratureRule;
pub use quotients::{FiniteGroup, GroupSpec, InvariantSubspace};
pub use rotations::{RotationCoeffs, RotationScalars};
