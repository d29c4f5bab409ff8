//! Recursive maximum-likelihood tracking of the MIMO channel matrix.
//!
//! Per snapshot the tracker runs: (optional) detection with the previous
//! estimate, gain computation, the rank-one estimate update
//! `H_hat_k = alpha H_hat_{k-1} + beta_k (r_k - alpha H_hat_{k-1} s_k) s_k^H`,
//! and the scalar error-variance recursion
//! `E_k = (1 - beta_k)(alpha^2 E_{k-1} + sigma_v2)`.
//!
//! `E_k` is the tracking-error variance under known data; it depends only on
//! the model constants, never on the received data, so the gain sequence is
//! deterministic and shared with the performance predictor.

use crate::numerics::ComplexMatrix;
use crate::transceiver::{mmse_detect, slice, Constellation, SymbolVector};
use crate::{Error, Result};

/// Snapshot processing mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Transmitted symbols are known at the receiver.
    Training,
    /// Symbols are detected from the previous channel estimate.
    DecisionDirected,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Training => "training",
            Mode::DecisionDirected => "dd",
        }
    }
}

/// Tracker state: the running channel estimate, the scalar error variance,
/// and the fixed model constants.
#[derive(Debug, Clone)]
pub struct TrackerState {
    h_hat: ComplexMatrix,
    e: f64,
    alpha: f64,
    sigma_v2: f64,
    sigma_w2: f64,
    n_tx: usize,
    n_rx: usize,
}

impl TrackerState {
    /// Step-1 initialization: zero estimate, unit error variance.
    pub fn new(n_tx: usize, n_rx: usize, alpha: f64, sigma_v2: f64, sigma_w2: f64) -> Result<Self> {
        if n_tx < 1 || n_rx < 1 {
            return Err(Error::Domain {
                name: "antenna count",
                value: n_tx.min(n_rx) as f64,
                expected: ">= 1",
            });
        }
        for (name, v, lo) in [
            ("alpha", alpha, 0.0),
            ("sigma_v2", sigma_v2, 0.0),
            ("sigma_w2", sigma_w2, 0.0),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
            if v < lo {
                return Err(Error::Domain {
                    name,
                    value: v,
                    expected: ">= 0",
                });
            }
        }
        Ok(Self {
            h_hat: ComplexMatrix::zeros(n_rx, n_tx),
            e: 1.0,
            alpha,
            sigma_v2,
            sigma_w2,
            n_tx,
            n_rx,
        })
    }

    pub fn h_hat(&self) -> &ComplexMatrix {
        &self.h_hat
    }

    pub fn error_variance(&self) -> f64 {
        self.e
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn sigma_w2(&self) -> f64 {
        self.sigma_w2
    }

    /// Update gain `beta_k = A / (sigma_w2 + M A)` with
    /// `A = alpha^2 E_{k-1} + sigma_v2`. Bounded by `1/M` whenever the
    /// noise variance is positive.
    pub fn gain_beta(&self) -> f64 {
        let a = self.alpha * self.alpha * self.e + self.sigma_v2;
        if a == 0.0 {
            return 0.0;
        }
        a / (self.sigma_w2 + self.n_tx as f64 * a)
    }

    /// Applies the rank-one correction toward `r s^H` and replaces the
    /// stored estimate. `s_used` is the known training vector or the
    /// detected one, depending on the mode the caller runs.
    pub fn update_estimate(
        &mut self,
        r: &ComplexMatrix,
        s_used: &SymbolVector,
    ) -> Result<ComplexMatrix> {
        if r.rows() != self.n_rx || r.cols() != 1 || s_used.len() != self.n_tx {
            return Err(Error::DimensionMismatch(format!(
                "update with r {}x{} and {} symbols against a {}x{} tracker",
                r.rows(),
                r.cols(),
                s_used.len(),
                self.n_rx,
                self.n_tx
            )));
        }
        let beta = self.gain_beta();
        let s_col = s_used.as_column();
        let predicted = self.h_hat.mul(&s_col)?.scale(self.alpha);
        let innovation = r.sub(&predicted)?;
        let correction = innovation.mul(&s_col.hermitian())?.scale(beta);
        self.h_hat = self.h_hat.scale(self.alpha).add(&correction)?;
        Ok(self.h_hat.clone())
    }

    /// Advances the error-variance recursion and returns the new value.
    pub fn update_error_variance(&mut self) -> f64 {
        let a = self.alpha * self.alpha * self.e + self.sigma_v2;
        let beta = if a == 0.0 {
            0.0
        } else {
            a / (self.sigma_w2 + self.n_tx as f64 * a)
        };
        self.e = (1.0 - beta) * a;
        self.e
    }

    /// Runs one full snapshot. In decision-directed mode the symbols are
    /// detected with the *previous* estimate before any update happens; in
    /// training mode detection is skipped and `training_symbols` is used.
    /// Returns the symbol vector that drove the update and the new estimate.
    pub fn process_snapshot(
        &mut self,
        r: &ComplexMatrix,
        mode: Mode,
        training_symbols: Option<&SymbolVector>,
        constellation: &Constellation,
    ) -> Result<(SymbolVector, ComplexMatrix)> {
        let s_used = match mode {
            Mode::Training => training_symbols
                .ok_or(Error::MissingTrainingSymbols)?
                .clone(),
            Mode::DecisionDirected => {
                let soft = mmse_detect(&self.h_hat, r, self.sigma_w2)?;
                slice(&soft, constellation)
            }
        };
        let h_new = self.update_estimate(r, &s_used)?;
        self.update_error_variance();
        Ok((s_used, h_new))
    }
}
