//! Deterministic performance predictor for the decision-directed tracker.
//!
//! Two scalar statistics of the channel estimate are propagated per
//! snapshot: the bias factor `p_k` (normalized correlation between the true
//! channel and the estimate) and the estimate power `q_k`. With unit-power
//! taps the tracking error is `sigma_H2 = q - 2p + 1`. The decision error
//! rate feeding the recursions is either zero (training) or derived from
//! the effective noise seen by the joint detector: estimation error is
//! lumped into the noise, the post-detection SNR follows the large-system
//! MMSE mapping, and BPSK slicing converts it to an error probability.
//!
//! Running the driver with the error rate pinned to zero reproduces the
//! tracker's own `E_k` recursion exactly; that identity is the main
//! internal cross-check between the two code paths.

use crate::numerics::q_function;
use crate::tracker::Mode;
use crate::{Error, Result};

/// Scalar predictor state.
#[derive(Debug, Clone)]
pub struct AnalysisState {
    p: f64,
    q: f64,
    sigma_h2: f64,
    alpha: f64,
    sigma_v2: f64,
    sigma_w2: f64,
    n_tx: usize,
    n_rx: usize,
}

/// Fixed parameters plus frame layout for a predicted trajectory.
///
/// `sigma_w2` here is the *total complex* noise power per receive sample —
/// the same variance the tracker gain works in. A link specified by its
/// per-dimension noise variance passes twice that value.
#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub alpha: f64,
    pub sigma_w2: f64,
    pub n_train: usize,
    pub n_data: usize,
}

impl TrajectoryConfig {
    /// Innovation variance implied by the unit-power normalization.
    pub fn sigma_v2(&self) -> f64 {
        1.0 - self.alpha * self.alpha
    }

    pub fn snapshots(&self) -> usize {
        self.n_train + self.n_data
    }

    fn mode_at(&self, k: usize) -> Mode {
        if k <= self.n_train {
            Mode::Training
        } else {
            Mode::DecisionDirected
        }
    }
}

/// One predicted snapshot.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisRecord {
    pub k: usize,
    pub mode: Mode,
    pub p: f64,
    pub q: f64,
    pub sigma_h2: f64,
    pub gamma_eq: f64,
    pub p_e: f64,
    pub e_k: f64,
}

/// Predicted trajectory, one record per snapshot including the initial
/// state at `k = 0`.
#[derive(Debug, Clone)]
pub struct AnalysisTrajectory {
    pub records: Vec<AnalysisRecord>,
}

impl AnalysisState {
    /// Zero initial estimate: `p = q = 0`, tracking error 1.
    pub fn new(n_tx: usize, n_rx: usize, alpha: f64, sigma_v2: f64, sigma_w2: f64) -> Self {
        Self {
            p: 0.0,
            q: 0.0,
            sigma_h2: 1.0,
            alpha,
            sigma_v2,
            sigma_w2,
            n_tx,
            n_rx,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Overrides the moment pair, so the recursions can be driven from
    /// externally measured statistics.
    pub fn set_moments(&mut self, p: f64, q: f64) {
        self.p = p;
        self.q = q;
    }

    pub fn sigma_h2(&self) -> f64 {
        self.sigma_h2
    }

    /// Bias-factor recursion:
    /// `p_k = alpha^2 (1 - beta) p_{k-1} + beta (1 - 2 P_e)`.
    pub fn step_bias(&mut self, beta: f64, p_e: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        self.p = a2 * (1.0 - beta) * self.p + beta * (1.0 - 2.0 * p_e);
        self.p
    }

    /// Estimate-power recursion:
    /// `q_k = alpha^2 (1 - 2 beta + M beta^2) q_{k-1}
    ///      + 2 alpha^2 beta p_{k-1} (1 - M beta)(1 - 2 P_e)
    ///      + beta^2 (M + sigma_w2)`.
    ///
    /// `p_prev` must be the bias factor *before* its own update this
    /// snapshot.
    pub fn step_power(&mut self, beta: f64, p_e: f64, p_prev: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let m = self.n_tx as f64;
        self.q = a2 * (1.0 - 2.0 * beta + m * beta * beta) * self.q
            + 2.0 * a2 * beta * p_prev * (1.0 - m * beta) * (1.0 - 2.0 * p_e)
            + beta * beta * (m + self.sigma_w2);
        self.q
    }

    /// Tracking error `sigma_H2 = q - 2p + 1`, stored and returned.
    pub fn tracking_error(&mut self) -> Result<f64> {
        let v = self.q - 2.0 * self.p + 1.0;
        if v < -1e-9 {
            return Err(Error::Inconsistent(format!(
                "tracking error {v} negative beyond tolerance"
            )));
        }
        self.sigma_h2 = v;
        Ok(v)
    }
}

/// Effective noise seen by the detector once estimation error is lumped in:
/// `sigma_w2 + M * sigma_h2`.
pub fn effective_noise_variance(sigma_w2: f64, sigma_h2: f64, n_tx: usize) -> f64 {
    sigma_w2 + n_tx as f64 * sigma_h2
}

/// Large-system MMSE output SNR for load factor `kappa = M / N`:
/// `gamma_eq = gamma - [sqrt(gamma (1+sqrt k)^2 + 1) - sqrt(gamma (1-sqrt k)^2 + 1)]^2 / 4`.
pub fn equivalent_snr(gamma: f64, kappa: f64) -> f64 {
    let sk = kappa.sqrt();
    let plus = (gamma * (1.0 + sk) * (1.0 + sk) + 1.0).sqrt();
    let minus = (gamma * (1.0 - sk) * (1.0 - sk) + 1.0).sqrt();
    let d = plus - minus;
    gamma - 0.25 * d * d
}

/// Per-stream spectral efficiency of the MMSE front end (nats):
/// `(kappa / 2) ln(1 + gamma_eq)`.
pub fn spectral_efficiency_mmse(gamma: f64, kappa: f64) -> f64 {
    0.5 * kappa * (1.0 + equivalent_snr(gamma, kappa)).ln()
}

/// BPSK error rate at a given post-detection SNR: `Q(sqrt(gamma_eq))`.
pub fn ber_bpsk(gamma_eq: f64) -> Result<f64> {
    if gamma_eq.is_nan() || gamma_eq < 0.0 {
        return Err(Error::Domain {
            name: "gamma_eq",
            value: gamma_eq,
            expected: ">= 0",
        });
    }
    q_function(gamma_eq.sqrt())
}

/// Symbol-estimate correlation `E(s s_hat^*)` for Gray PSK given per-bit
/// error rates. The single-bit case is `1 - 2 P_e`. The multi-bit product
/// form is kept exactly as printed in its source and is almost certainly a
/// typographical slip there (`sin^2(2^{t-1} pi)` kills every factor except
/// `t = 0`), so it is gated behind `experimental`.
pub fn psk_correlation_factor(p_e_bits: &[f64], experimental: bool) -> Result<f64> {
    if p_e_bits.is_empty() {
        return Err(Error::Domain {
            name: "p_e_bits length",
            value: 0.0,
            expected: ">= 1",
        });
    }
    for &p in p_e_bits {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                name: "p_e",
                value: p,
                expected: "0 <= p_e <= 1",
            });
        }
    }
    if p_e_bits.len() == 1 {
        return Ok(1.0 - 2.0 * p_e_bits[0]);
    }
    if !experimental {
        return Err(Error::ExperimentalFeature);
    }
    let mut product = 1.0;
    for (t, &p) in p_e_bits.iter().enumerate() {
        let s = (2f64.powi(t as i32 - 1) * std::f64::consts::PI).sin();
        product *= 1.0 - 2.0 * p * s * s;
    }
    Ok(product)
}

/// Runs the full predictor over one frame with the built-in error-rate
/// model: training snapshots use `P_e = 0`; decision-directed snapshots
/// derive `P_e` from the tracking error of the *previous* snapshot, since
/// detection there uses the previous estimate.
pub fn predict_trajectory(cfg: &TrajectoryConfig) -> Result<AnalysisTrajectory> {
    drive(cfg, None)
}

/// Same driver, but with an externally supplied decision-error sequence
/// (one value per snapshot `k = 1..`) replacing the built-in model. Used to
/// validate the bias/power recursions against measured error rates.
pub fn replay_trajectory(
    cfg: &TrajectoryConfig,
    p_e_by_snapshot: &[f64],
) -> Result<AnalysisTrajectory> {
    if p_e_by_snapshot.len() != cfg.snapshots() {
        return Err(Error::DimensionMismatch(format!(
            "need {} error rates, got {}",
            cfg.snapshots(),
            p_e_by_snapshot.len()
        )));
    }
    drive(cfg, Some(p_e_by_snapshot))
}

fn drive(cfg: &TrajectoryConfig, injected_pe: Option<&[f64]>) -> Result<AnalysisTrajectory> {
    validate(cfg)?;
    let mut state = AnalysisState::new(cfg.n_tx, cfg.n_rx, cfg.alpha, cfg.sigma_v2(), cfg.sigma_w2);
    let sigma_v2 = state.sigma_v2;
    let kappa = state.n_tx as f64 / state.n_rx as f64;
    let mut e = 1.0;

    let mut records = Vec::with_capacity(cfg.snapshots() + 1);
    records.push(AnalysisRecord {
        k: 0,
        mode: Mode::Training,
        p: 0.0,
        q: 0.0,
        sigma_h2: 1.0,
        gamma_eq: 0.0,
        p_e: 0.0,
        e_k: 1.0,
    });

    for k in 1..=cfg.snapshots() {
        let mode = cfg.mode_at(k);
        let a = cfg.alpha * cfg.alpha * e + sigma_v2;
        let beta = if a == 0.0 {
            0.0
        } else {
            a / (cfg.sigma_w2 + cfg.n_tx as f64 * a)
        };

        // detection at snapshot k sees the estimate from k-1; the effective
        // noise is complex-valued, but the BPSK decision only faces its real
        // half, so the slicer SNR is twice the complex MMSE output SINR.
        // The detector's signature matrix is the estimate, whose taps carry
        // power q, so each signature has norm^2 ~ N q and the per-stream SNR
        // entering the large-system map is N q / sigma_wc2.
        let sigma_wc2 = effective_noise_variance(cfg.sigma_w2, state.sigma_h2(), cfg.n_tx);
        let gamma = cfg.n_rx as f64 * state.q() / sigma_wc2;
        let gamma_eq = 2.0 * equivalent_snr(gamma, kappa);
        let p_e = match (mode, injected_pe) {
            (Mode::Training, _) => 0.0,
            (Mode::DecisionDirected, Some(seq)) => seq[k - 1],
            (Mode::DecisionDirected, None) => ber_bpsk(gamma_eq)?,
        };

        let p_prev = state.p();
        state.step_bias(beta, p_e);
        state.step_power(beta, p_e, p_prev);
        let sigma_h2 = state.tracking_error()?;
        e = (1.0 - beta) * a;

        records.push(AnalysisRecord {
            k,
            mode,
            p: state.p(),
            q: state.q(),
            sigma_h2,
            gamma_eq,
            p_e,
            e_k: e,
        });
    }
    Ok(AnalysisTrajectory { records })
}

fn validate(cfg: &TrajectoryConfig) -> Result<()> {
    if cfg.n_tx < 1 || cfg.n_rx < 1 {
        return Err(Error::Domain {
            name: "antenna count",
            value: cfg.n_tx.min(cfg.n_rx) as f64,
            expected: ">= 1",
        });
    }
    if !cfg.alpha.is_finite() || !(cfg.alpha > 0.0 && cfg.alpha <= 1.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: cfg.alpha,
            expected: "0 < alpha <= 1",
        });
    }
    if !cfg.sigma_w2.is_finite() || cfg.sigma_w2 <= 0.0 {
        return Err(Error::Domain {
            name: "sigma_w2",
            value: cfg.sigma_w2,
            expected: "> 0",
        });
    }
    Ok(())
}
