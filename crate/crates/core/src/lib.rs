//! Link-level simulator and deterministic performance predictor for
//! decision-directed tracking of time-varying flat Rayleigh MIMO channels.
//!
//! The crate is organized around the processing chain of a spatially
//! multiplexed link:
//!
//! * [`numerics`] — special functions, complex matrices, and seeded
//!   complex-Gaussian sampling shared by everything else.
//! * [`channel`] — first-order autoregressive Rayleigh fading matched to the
//!   Jakes autocorrelation.
//! * [`transceiver`] — PSK symbol sources, the AWGN channel application,
//!   linear MMSE joint detection, and hard slicing.
//! * [`tracker`] — the recursive maximum-likelihood channel tracker with its
//!   scalar error-variance recursion.
//! * [`analysis`] — the closed-loop performance predictor: bias/power
//!   recursions, effective-noise BER approximation, and the trajectory
//!   driver.
//! * [`experiment`] — the Monte Carlo harness that runs frames, aggregates
//!   per-snapshot metrics, and pairs them with the predictor output.
//!
//! Conventions used throughout: channel taps are normalized to unit power
//! (`E|h|² = 1`), symbols have unit energy per sub-stream, and the noise
//! variance `sigma_w2` is *per real dimension* of each receive sample, so
//! that `gamma = 1 / sigma_w2` is the post-matched-filter SNR of a BPSK
//! decision statistic.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod tracker;
pub mod transceiver;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
