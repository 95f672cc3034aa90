//! Bi-free convolution of compactly supported laws and the Lévy-Khintchine
//! calculus of bi-freely infinitely divisible laws.

mod decompose;
mod gaussian;
mod law;
mod quintuple;

pub use decompose::{lk_decompose, Decomposition, PoissonPart};
pub use gaussian::{standard_density, GaussianClosedForm, GaussianParams};
pub use law::{
    bifree_convolve, compound_poisson_r, BifreeLaw, Convolution, LawComponent, ADDITIVITY_DEGREE, ADDITIVITY_TOL,
};
pub use quintuple::{
    lambda_combine, lk_convert, lk_r_compact, lk_r_general, lk_validate, LKQuintupleGeneral, LKTripleCompact, LkParams,
    ValidationReport, Violation, CONSTRAINT_TOL,
};
