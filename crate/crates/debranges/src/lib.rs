//! Sharp constants and extremizers for embeddings between weighted
//! Paley-Wiener spaces and, more generally, for the multiplication-by-z^k
//! operator on de Branges spaces.
//!
//! The sharp constant `(EP1)(beta + k, beta; 1; 1) = lambda0^{2k}` is
//! located as the smallest positive root of an explicit determinant
//! built from the companion functions of the space; the crate also
//! constructs the extremal functions, cross-checks every constant with a
//! constrained-eigenproblem oracle and finite-difference eigenvalues,
//! and exposes the derived Poincare and delta-majorant constants.
//!
//! ```
//! use debranges::sharpsolve::{solve_lambda0, SharpProblem, DEFAULT_TOL};
//! use debranges::spaces::homogeneous_space;
//!
//! let space = homogeneous_space(-0.5).unwrap();
//! let prob = SharpProblem::new(&space, 3).unwrap();
//! let result = solve_lambda0(&prob, None, DEFAULT_TOL).unwrap();
//! assert!((result.lambda0 - std::f64::consts::PI).abs() < 1e-9);
//! ```

// index loops mirror the usual elimination/stencil notation, and
// `!(x > 0.0)` is the NaN-rejecting domain guard
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod bounds;
mod dd;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod oracles;
pub mod sharpsolve;
pub mod spaces;
pub mod specialfn;

pub use error::{Error, Result};
