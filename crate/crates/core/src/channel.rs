//! Time-varying flat Rayleigh MIMO channel.
//!
//! Each of the `N x M` taps evolves as a first-order autoregressive process
//! `h_k = alpha * h_{k-1} + v_k`, with the AR coefficient matched to the
//! Jakes autocorrelation `J0(2 pi fd T |k - l|)` at lag one and the
//! innovation variance pinned so that every tap keeps unit power. All taps
//! share the same Doppler rate and vary independently.

use rand::Rng;

use crate::numerics::{bessel_j0, complex_gaussian_matrix, ComplexMatrix};
use crate::{Error, Result};

/// AR(1) fading state: the current true channel plus its process constants.
#[derive(Debug, Clone)]
pub struct ChannelProcess {
    h: ComplexMatrix,
    alpha: f64,
    sigma_v2: f64,
    n_tx: usize,
    n_rx: usize,
}

/// AR coefficient for a normalized Doppler rate: `alpha = J0(2 pi fdt)`.
/// Larger Doppler gives a smaller coefficient and faster variation.
pub fn ar_coefficient(fdt: f64) -> Result<f64> {
    if !fdt.is_finite() {
        return Err(Error::NonFinite("fdt"));
    }
    if !(0.0..0.5).contains(&fdt) {
        return Err(Error::Domain {
            name: "fdt",
            value: fdt,
            expected: "0 <= fdt < 0.5",
        });
    }
    bessel_j0(2.0 * std::f64::consts::PI * fdt)
}

/// Innovation variance that keeps the stationary tap power at one:
/// `sigma_v2 = 1 - alpha^2`.
pub fn process_noise_variance(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            expected: "0 < alpha <= 1",
        });
    }
    Ok(1.0 - alpha * alpha)
}

/// Jakes autocorrelation `J0(2 pi fdt lag)`, reported as a diagnostic
/// against which the AR model can be compared.
pub fn theoretical_autocorrelation(fdt: f64, lag: u32) -> Result<f64> {
    bessel_j0(2.0 * std::f64::consts::PI * fdt * lag as f64)
}

impl ChannelProcess {
    /// Draws a stationary starting channel: i.i.d. circularly symmetric
    /// complex Gaussian taps with unit power.
    pub fn new<R: Rng + ?Sized>(n_tx: usize, n_rx: usize, alpha: f64, rng: &mut R) -> Result<Self> {
        if n_tx < 1 || n_rx < 1 {
            return Err(Error::Domain {
                name: "antenna count",
                value: n_tx.min(n_rx) as f64,
                expected: ">= 1",
            });
        }
        let sigma_v2 = process_noise_variance(alpha)?;
        let h = complex_gaussian_matrix(n_rx, n_tx, 1.0, rng)?;
        Ok(Self {
            h,
            alpha,
            sigma_v2,
            n_tx,
            n_rx,
        })
    }

    /// Advances the process one snapshot: `H_k = alpha * H_{k-1} + V_k`.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &ComplexMatrix {
        for i in 0..self.n_rx {
            for j in 0..self.n_tx {
                let innovation = crate::numerics::complex_gaussian_sample(self.sigma_v2, rng)
                    .expect("sigma_v2 is validated at construction");
                self.h.set(i, j, self.alpha * self.h.get(i, j) + innovation);
            }
        }
        &self.h
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma_v2(&self) -> f64 {
        self.sigma_v2
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }
}
