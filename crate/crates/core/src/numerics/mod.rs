//! Special functions, small dense complex linear algebra, and seeded
//! complex-Gaussian sampling.

pub mod matrix;
pub mod random;
pub mod special;

pub use matrix::{gauss_jordan_inverse, ComplexMatrix};
pub use random::{complex_gaussian_matrix, complex_gaussian_sample, derive_run_seed, seeded_rng};
pub use special::{bessel_j0, q_function};
