//! Monte Carlo harness: runs independent frames, aggregates per-snapshot
//! statistics across runs, and pairs them with the deterministic predictor.
//!
//! Every run draws its own seed from `(base_seed, run_index)`, so results
//! are bit-identical no matter how runs are scheduled across threads.
//! Aggregation walks fixed-size chunks in index order for the same reason.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{predict_trajectory, AnalysisTrajectory, TrajectoryConfig};
use crate::channel::{ar_coefficient, process_noise_variance, ChannelProcess};
use crate::numerics::{derive_run_seed, seeded_rng, ComplexMatrix};
use crate::tracker::{Mode, TrackerState};
use crate::transceiver::{
    count_symbol_errors, draw_symbols, noise_variance_from_ebn0, symbols_from_indices,
    Constellation, SymbolVector,
};
use crate::{Error, Result};

/// Fixed number of runs accumulated per parallel work item; keeps the
/// reduction order independent of the thread count.
const RUNS_PER_CHUNK: usize = 32;

/// How the training symbols are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainingSequence {
    /// Fresh i.i.d. uniform draw every training snapshot (the receiver
    /// knows the draw).
    #[default]
    Random,
    /// Columns of a Sylvester-Hadamard matrix cycled over the training
    /// segment; requires the stream count to be 1, 2, 4, or 8.
    Orthogonal,
}

/// Sweep point: dimensions, Doppler, SNR, frame layout, and run control.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub fdt: f64,
    pub ebn0_db: f64,
    pub n_train: usize,
    pub n_data: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub mod_order: usize,
    pub training: TrainingSequence,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_tx: 4,
            n_rx: 4,
            fdt: 0.004,
            ebn0_db: 5.0,
            n_train: 20,
            n_data: 180,
            runs: 2_000,
            base_seed: 1,
            mod_order: 1,
            training: TrainingSequence::Random,
        }
    }
}

impl ExperimentConfig {
    pub fn snapshots(&self) -> usize {
        self.n_train + self.n_data
    }

    pub fn alpha(&self) -> Result<f64> {
        ar_coefficient(self.fdt)
    }

    /// Link noise variance per real dimension of each receive sample.
    pub fn sigma_w2(&self) -> f64 {
        noise_variance_from_ebn0(self.ebn0_db, self.mod_order)
    }

    /// Total complex noise power per receive sample; this is the variance
    /// the tracker gain, the error recursions, and the MMSE regularizer
    /// work in.
    pub fn sigma_w2_complex(&self) -> f64 {
        2.0 * self.sigma_w2()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx < 1 || self.n_rx < 1 || self.runs < 1 {
            return Err(Error::Domain {
                name: "counts",
                value: 0.0,
                expected: "n_tx, n_rx, runs >= 1",
            });
        }
        if self.snapshots() < 1 {
            return Err(Error::Domain {
                name: "snapshots",
                value: 0.0,
                expected: "n_train + n_data >= 1",
            });
        }
        if self.mod_order < 1 || self.mod_order > 8 {
            return Err(Error::Domain {
                name: "mod_order",
                value: self.mod_order as f64,
                expected: "1..=8",
            });
        }
        self.alpha()?;
        if self.training == TrainingSequence::Orthogonal && !matches!(self.n_tx, 1 | 2 | 4 | 8) {
            return Err(Error::Domain {
                name: "n_tx",
                value: self.n_tx as f64,
                expected: "1, 2, 4, or 8 for orthogonal training",
            });
        }
        Ok(())
    }

    /// Soft configuration issues worth surfacing to the operator.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_tx > self.n_rx {
            out.push(format!(
                "overloaded configuration: {} transmit streams on {} receive antennas",
                self.n_tx, self.n_rx
            ));
        }
        out
    }

    pub fn trajectory_config(&self) -> Result<TrajectoryConfig> {
        Ok(TrajectoryConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            alpha: self.alpha()?,
            sigma_w2: self.sigma_w2_complex(),
            n_train: self.n_train,
            n_data: self.n_data,
        })
    }
}

/// Raw per-snapshot record of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub k: usize,
    pub mode: Mode,
    pub symbol_errors: u32,
    pub mse: f64,
    pub bias: Complex64,
    pub power: f64,
    pub channel_power: f64,
}

/// Cross-run averages at one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotMetrics {
    pub k: usize,
    pub mode: Mode,
    pub ber: f64,
    pub mse: f64,
    pub p_emp: f64,
    pub p_emp_imag: f64,
    pub q_emp: f64,
}

/// Aggregated simulation paired with the predictor run at the same
/// configuration.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    pub config: ExperimentConfig,
    pub snapshots: Vec<SnapshotMetrics>,
    pub analysis: AnalysisTrajectory,
}

/// Normalized correlation `trace(H^H H_hat) / (M N)` of one realization.
pub fn empirical_bias(h_true: &ComplexMatrix, h_hat: &ComplexMatrix) -> Result<Complex64> {
    let inner = h_true.herm_inner(h_hat)?;
    Ok(inner / (h_true.rows() * h_true.cols()) as f64)
}

/// Normalized estimate power `trace(H_hat^H H_hat) / (M N)`.
pub fn empirical_power(h_hat: &ComplexMatrix) -> f64 {
    h_hat.norm_sqr() / (h_hat.rows() * h_hat.cols()) as f64
}

/// Normalized squared estimation error `trace(xi^H xi) / (M N)` with
/// `xi = H_hat - H`.
pub fn empirical_mse(h_true: &ComplexMatrix, h_hat: &ComplexMatrix) -> Result<f64> {
    Ok(h_hat.sub(h_true)?.norm_sqr() / (h_true.rows() * h_true.cols()) as f64)
}

fn training_symbols(
    cfg: &ExperimentConfig,
    constellation: &Constellation,
    k: usize,
    rng: &mut impl rand::Rng,
) -> SymbolVector {
    match cfg.training {
        TrainingSequence::Random => draw_symbols(constellation, cfg.n_tx, rng),
        TrainingSequence::Orthogonal => {
            let column = (k - 1) % cfg.n_tx;
            let minus_one = constellation.order() / 2;
            let indices: Vec<usize> = (0..cfg.n_tx)
                .map(|row| {
                    if hadamard_entry(row, column) {
                        0
                    } else {
                        minus_one
                    }
                })
                .collect();
            symbols_from_indices(constellation, &indices)
        }
    }
}

/// Sylvester construction: entry is `+1` iff `popcount(row & col)` is even.
fn hadamard_entry(row: usize, col: usize) -> bool {
    (row & col).count_ones().is_multiple_of(2)
}

/// Simulates one frame. Per snapshot: advance the channel, draw and
/// transmit symbols, run the tracker in the scheduled mode, and record
/// symbol errors plus the instantaneous estimate statistics.
pub fn run_single_frame(cfg: &ExperimentConfig, run_seed: u64) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let constellation = Constellation::psk(cfg.mod_order)?;
    let alpha = cfg.alpha()?;
    let sigma_v2 = process_noise_variance(alpha)?;
    let sigma_w2 = cfg.sigma_w2();

    let mut rng = seeded_rng(run_seed);
    let mut channel = ChannelProcess::new(cfg.n_tx, cfg.n_rx, alpha, &mut rng)?;
    let mut tracker =
        TrackerState::new(cfg.n_tx, cfg.n_rx, alpha, sigma_v2, cfg.sigma_w2_complex())?;

    let denom = (cfg.n_tx * cfg.n_rx) as f64;
    let mut records = Vec::with_capacity(cfg.snapshots() + 1);
    records.push(RunRecord {
        k: 0,
        mode: Mode::Training,
        symbol_errors: 0,
        mse: channel.h().norm_sqr() / denom,
        bias: Complex64::ZERO,
        power: 0.0,
        channel_power: channel.h().norm_sqr() / denom,
    });

    for k in 1..=cfg.snapshots() {
        let mode = if k <= cfg.n_train {
            Mode::Training
        } else {
            Mode::DecisionDirected
        };
        let h_k = channel.step(&mut rng).clone();
        let sent = match mode {
            Mode::Training => training_symbols(cfg, &constellation, k, &mut rng),
            Mode::DecisionDirected => draw_symbols(&constellation, cfg.n_tx, &mut rng),
        };
        let r = crate::transceiver::transmit(&h_k, &sent, sigma_w2, &mut rng)?;
        let (decided, h_hat) = match mode {
            Mode::Training => tracker.process_snapshot(&r, mode, Some(&sent), &constellation)?,
            Mode::DecisionDirected => tracker.process_snapshot(&r, mode, None, &constellation)?,
        };
        let symbol_errors = match mode {
            Mode::Training => 0,
            Mode::DecisionDirected => count_symbol_errors(&sent, &decided)? as u32,
        };
        records.push(RunRecord {
            k,
            mode,
            symbol_errors,
            mse: empirical_mse(&h_k, &h_hat)?,
            bias: empirical_bias(&h_k, &h_hat)?,
            power: empirical_power(&h_hat),
            channel_power: h_k.norm_sqr() / denom,
        });
    }
    Ok(records)
}

#[derive(Clone)]
struct Accumulator {
    errors: Vec<u64>,
    mse: Vec<f64>,
    bias: Vec<Complex64>,
    power: Vec<f64>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Self {
            errors: vec![0; len],
            mse: vec![0.0; len],
            bias: vec![Complex64::ZERO; len],
            power: vec![0.0; len],
        }
    }

    fn absorb(&mut self, records: &[RunRecord]) {
        for (i, rec) in records.iter().enumerate() {
            self.errors[i] += rec.symbol_errors as u64;
            self.mse[i] += rec.mse;
            self.bias[i] += rec.bias;
            self.power[i] += rec.power;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for i in 0..self.errors.len() {
            self.errors[i] += other.errors[i];
            self.mse[i] += other.mse[i];
            self.bias[i] += other.bias[i];
            self.power[i] += other.power[i];
        }
    }
}

/// Runs the configured number of independent frames (in parallel) and
/// averages every per-snapshot quantity across runs, pairing the result
/// with the deterministic predictor at the same configuration.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<TrajectoryResult> {
    cfg.validate()?;
    let len = cfg.snapshots() + 1;
    let n_chunks = cfg.runs.div_ceil(RUNS_PER_CHUNK);

    let chunk_results: Vec<Result<Accumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * RUNS_PER_CHUNK;
            let hi = ((chunk + 1) * RUNS_PER_CHUNK).min(cfg.runs);
            let mut acc = Accumulator::new(len);
            for run in lo..hi {
                let seed = derive_run_seed(cfg.base_seed, run as u64);
                let records = run_single_frame(cfg, seed)?;
                acc.absorb(&records);
            }
            Ok(acc)
        })
        .collect();

    let mut total = Accumulator::new(len);
    for acc in chunk_results {
        total.merge(&acc?);
    }

    let runs = cfg.runs as f64;
    let trials = runs * cfg.n_tx as f64;
    let snapshots = (0..len)
        .map(|i| {
            let mode = if i == 0 || i <= cfg.n_train {
                Mode::Training
            } else {
                Mode::DecisionDirected
            };
            SnapshotMetrics {
                k: i,
                mode,
                ber: match mode {
                    Mode::Training => 0.0,
                    Mode::DecisionDirected => total.errors[i] as f64 / trials,
                },
                mse: total.mse[i] / runs,
                p_emp: total.bias[i].re / runs,
                p_emp_imag: total.bias[i].im / runs,
                q_emp: total.power[i] / runs,
            }
        })
        .collect();

    Ok(TrajectoryResult {
        config: cfg.clone(),
        snapshots,
        analysis: predict_trajectory(&cfg.trajectory_config()?)?,
    })
}

/// Per-snapshot relative gap between simulation and analysis.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotGap {
    pub k: usize,
    pub mode: Mode,
    pub ber_rel_gap: Option<f64>,
    pub mse_rel_gap: Option<f64>,
}

/// Steady-state summary over the tail of the decision-directed segment.
#[derive(Debug, Clone, Copy)]
pub struct SteadySummary {
    pub window: usize,
    pub ber_sim: f64,
    pub ber_ana: f64,
    pub ber_rel_gap: f64,
    pub mse_sim: f64,
    pub mse_ana: f64,
    pub mse_rel_gap: f64,
    pub p_emp_imag_max: f64,
}

/// Comparison table: per-snapshot gaps plus the steady-state summary over
/// the final decision-directed window (50 snapshots or the whole data
/// segment, whichever is shorter).
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub gaps: Vec<SnapshotGap>,
    pub steady: Option<SteadySummary>,
}

/// Window used for steady-state comparisons.
pub const STEADY_WINDOW: usize = 50;

pub fn compare_report(result: &TrajectoryResult) -> ComparisonReport {
    let gaps = result
        .snapshots
        .iter()
        .zip(&result.analysis.records)
        .map(|(sim, ana)| SnapshotGap {
            k: sim.k,
            mode: sim.mode,
            ber_rel_gap: rel_gap(ana.p_e, sim.ber),
            mse_rel_gap: rel_gap(ana.sigma_h2, sim.mse),
        })
        .collect();

    let dd: Vec<(&SnapshotMetrics, &crate::analysis::AnalysisRecord)> = result
        .snapshots
        .iter()
        .zip(&result.analysis.records)
        .filter(|(s, _)| s.mode == Mode::DecisionDirected)
        .collect();
    let steady = if dd.is_empty() {
        None
    } else {
        let window = dd.len().min(STEADY_WINDOW);
        let tail = &dd[dd.len() - window..];
        let n = window as f64;
        let ber_sim = tail.iter().map(|(s, _)| s.ber).sum::<f64>() / n;
        let ber_ana = tail.iter().map(|(_, a)| a.p_e).sum::<f64>() / n;
        let mse_sim = tail.iter().map(|(s, _)| s.mse).sum::<f64>() / n;
        let mse_ana = tail.iter().map(|(_, a)| a.sigma_h2).sum::<f64>() / n;
        Some(SteadySummary {
            window,
            ber_sim,
            ber_ana,
            ber_rel_gap: rel_gap(ber_ana, ber_sim).unwrap_or(f64::INFINITY),
            mse_sim,
            mse_ana,
            mse_rel_gap: rel_gap(mse_ana, mse_sim).unwrap_or(f64::INFINITY),
            p_emp_imag_max: tail
                .iter()
                .map(|(s, _)| s.p_emp_imag.abs())
                .fold(0.0, f64::max),
        })
    };
    ComparisonReport { gaps, steady }
}

fn rel_gap(predicted: f64, reference: f64) -> Option<f64> {
    if reference == 0.0 {
        None
    } else {
        Some((predicted - reference).abs() / reference.abs())
    }
}
