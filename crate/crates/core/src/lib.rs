//! Numerical bi-free probability: two-variable Cauchy transforms, partial
//! R-transforms, bi-free convolution and the Lévy-Khintchine calculus of
//! bi-freely infinitely divisible laws.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifree_conv;
pub mod bifree_r;
pub mod error;
pub mod io;
pub mod limits;
pub mod measure;
pub mod rtransform1d;
pub mod transform2d;

pub use error::{Error, Result};
pub use num_complex::Complex64;
