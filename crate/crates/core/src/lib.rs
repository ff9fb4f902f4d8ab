//! Quadrature rules for weakly singular integrals
//! `∫∫ |x − y|^(−α) g(x, y) dy dx` over pairs of conforming convex polytopes.
//!
//! The product `P_x × P_y` is split into convex hulls `conv(A, B)` of a
//! singular apex cell `A` (lying on the diagonal) and a regular base
//! `B = F_x × F_y`. In every hull the singularity only depends on the
//! radial parameter `λ`, which is integrated with a Gauss-Jacobi rule.
//!
//! Module map:
//!
//! * [`geometry`]: polytopes with explicit face lattices, affine frames,
//!   distances, Cartesian products and the hull Jacobian factor `δ`.
//! * [`decomposition`]: pyramidal lattices, path merging, triangulations and
//!   closed-form decompositions for simplex and cube pairs.
//! * [`quad1d`]: Gauss-Jacobi / Gauss-Legendre rules on `[0, 1]`.
//! * [`face_rules`]: reference and embedded rules on simplices, cubes and
//!   general faces, plus ingestion of precomputed rule files.
//! * [`assembly`]: the folded kernel rule, integration and convergence studies.

pub mod assembly;
pub mod decomposition;
pub mod error;
pub mod face_rules;
pub mod geometry;
pub mod linalg;
pub mod quad1d;

pub use error::{Error, Result};
