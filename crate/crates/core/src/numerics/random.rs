//! Seeded randomness: circularly symmetric complex Gaussian sampling and
//! the per-run seed derivation used by the Monte Carlo harness.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Deterministic, platform-independent generator used across the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws one circularly symmetric complex Gaussian sample with
/// `E|z|^2 = variance` (each real dimension carries `variance / 2`).
pub fn complex_gaussian_sample<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Result<Complex64> {
    if !variance.is_finite() {
        return Err(Error::NonFinite("variance"));
    }
    if variance < 0.0 {
        return Err(Error::Domain {
            name: "variance",
            value: variance,
            expected: ">= 0",
        });
    }
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Ok(Complex64::new(sigma * re, sigma * im))
}

/// Matrix with i.i.d. complex Gaussian entries of total variance `variance`.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_gaussian_sample(variance, rng)?);
        }
    }
    Ok(m)
}

/// Stateless seed derivation: run `i` of a sweep gets an independent
/// substream from `(base_seed, i)` so that results do not depend on how
/// runs are scheduled across threads.
pub fn derive_run_seed(base_seed: u64, run_index: u64) -> u64 {
    // splitmix64 over a simple combination of the inputs
    let mut z = base_seed ^ run_index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
