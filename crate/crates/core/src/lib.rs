//! Large-average submatrices of Gaussian random matrices: the alternating
//! local search (LAS), the threshold greedy clique, the incremental greedy
//! procedure (IGP), exact enumeration, and the overlap-gap analysis of
//! pairs of good submatrices.
//!
//! ```
//! use submax::algorithms::run_las;
//! use submax::matrix::GaussianMatrix;
//!
//! let m = GaussianMatrix::generate(200, 200, 7).unwrap();
//! let r = run_las(&m, 3, None).unwrap();
//! assert!(submax::matrix::is_local_max(&m, &r.selection).unwrap());
//! ```

// `!(x > y)` is used on purpose to reject NaN; published coefficients keep
// their printed digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod algorithms;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod rng;
pub mod special;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::{GaussianMatrix, MatrixView, SeededGaussian, Selection};
