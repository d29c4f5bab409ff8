//! `ddtrack` — run the link simulator and the deterministic predictor,
//! emitting per-snapshot trajectories as CSV for plotting and regression
//! testing.
//!
//! All numeric output is printed with 17 significant digits so repeated
//! runs with the same seed are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ddtrack_core::analysis::{predict_trajectory, AnalysisTrajectory};
use ddtrack_core::experiment::{
    compare_report, run_monte_carlo, ExperimentConfig, TrajectoryResult,
};
use ddtrack_core::tracker::Mode;

const CSV_HEADER: &str = "k,mode,ber_sim,ber_ana,mse_sim,mse_ana,p_emp,p_ana,q_emp,q_ana,E_k";

#[derive(Debug, Parser)]
#[command(
    name = "ddtrack",
    about = "Monte Carlo simulation and deterministic analysis of decision-directed MIMO channel tracking",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the deterministic analysis trajectory (no randomness involved).
    Analyze {
        #[command(flatten)]
        params: LinkParams,
        /// Output CSV path.
        #[arg(long, default_value = "analyze.csv")]
        out: PathBuf,
    },
    /// Run the Monte Carlo simulation and emit per-snapshot averages.
    Simulate {
        #[command(flatten)]
        params: LinkParams,
        #[command(flatten)]
        run_opts: RunOptions,
        /// Output CSV path.
        #[arg(long, default_value = "simulate.csv")]
        out: PathBuf,
    },
    /// Run both, pairing simulation and analysis with relative-gap columns.
    Compare {
        #[command(flatten)]
        params: LinkParams,
        #[command(flatten)]
        run_opts: RunOptions,
        /// Output CSV path.
        #[arg(long, default_value = "compare.csv")]
        out: PathBuf,
    },
    /// Run `compare` over a parameter grid, one CSV per point plus an
    /// index file.
    Sweep {
        /// Transmit antenna counts (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4])]
        tx: Vec<usize>,
        /// Receive antenna count.
        #[arg(long, default_value_t = 4)]
        rx: usize,
        /// Normalized Doppler rates f_D*T (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.004f64, 0.01])]
        fdt: Vec<f64>,
        /// Eb/N0 points in dB (comma separated).
        #[arg(long = "ebn0-db", value_delimiter = ',', default_values_t = vec![5.0f64])]
        ebn0_db: Vec<f64>,
        /// Training symbols per frame.
        #[arg(long, default_value_t = 20)]
        train: usize,
        /// Data (decision-directed) symbols per frame.
        #[arg(long, default_value_t = 180)]
        data: usize,
        /// Bits per symbol (1 = BPSK).
        #[arg(long = "mod-order", default_value_t = 1)]
        mod_order: usize,
        #[command(flatten)]
        run_opts: RunOptions,
        /// Output directory for the per-point CSV files and index.csv.
        #[arg(long, default_value = "sweep_out")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct LinkParams {
    /// Transmit antennas (sub-streams) M.
    #[arg(long, default_value_t = 4)]
    tx: usize,
    /// Receive antennas N.
    #[arg(long, default_value_t = 4)]
    rx: usize,
    /// Normalized Doppler rate f_D*T.
    #[arg(long, default_value_t = 0.004)]
    fdt: f64,
    /// Eb/N0 in dB.
    #[arg(long = "ebn0-db", default_value_t = 5.0)]
    ebn0_db: f64,
    /// Training symbols per frame.
    #[arg(long, default_value_t = 20)]
    train: usize,
    /// Data (decision-directed) symbols per frame.
    #[arg(long, default_value_t = 180)]
    data: usize,
    /// Bits per symbol (1 = BPSK).
    #[arg(long = "mod-order", default_value_t = 1)]
    mod_order: usize,
}

#[derive(Debug, Args)]
struct RunOptions {
    /// Independent Monte Carlo runs to average.
    #[arg(long, default_value_t = 2000)]
    runs: usize,
    /// Base seed; per-run seeds are derived from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for the run loop (default: DDTRACK_THREADS or all
    /// cores). Results do not depend on this value.
    #[arg(long)]
    threads: Option<usize>,
}

impl LinkParams {
    fn to_config(&self, runs: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            n_tx: self.tx,
            n_rx: self.rx,
            fdt: self.fdt,
            ebn0_db: self.ebn0_db,
            n_train: self.train,
            n_data: self.data,
            runs,
            base_seed: seed,
            mod_order: self.mod_order,
            ..ExperimentConfig::default()
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Analyze { params, out } => {
            let cfg = validated(params.to_config(1, 0))?;
            let trajectory =
                predict_trajectory(&cfg.trajectory_config().map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            write_file(&out, &render_analysis(&trajectory))?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Simulate {
            params,
            run_opts,
            out,
        } => {
            let cfg = validated(params.to_config(run_opts.runs, run_opts.seed))?;
            let result =
                with_pool(run_opts.threads, || run_monte_carlo(&cfg)).map_err(|e| e.to_string())?;
            write_file(&out, &render_simulation(&result))?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Compare {
            params,
            run_opts,
            out,
        } => {
            let cfg = validated(params.to_config(run_opts.runs, run_opts.seed))?;
            let result =
                with_pool(run_opts.threads, || run_monte_carlo(&cfg)).map_err(|e| e.to_string())?;
            write_file(&out, &render_comparison(&result))?;
            report_steady_state(&result);
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Sweep {
            tx,
            rx,
            fdt,
            ebn0_db,
            train,
            data,
            mod_order,
            run_opts,
            out_dir,
        } => {
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
            let mut index = String::from("file,tx,rx,fdt,ebn0_db,train,data,runs,seed\n");
            for &m in &tx {
                for &doppler in &fdt {
                    for &snr in &ebn0_db {
                        let params = LinkParams {
                            tx: m,
                            rx,
                            fdt: doppler,
                            ebn0_db: snr,
                            train,
                            data,
                            mod_order,
                        };
                        let cfg = validated(params.to_config(run_opts.runs, run_opts.seed))?;
                        let result = with_pool(run_opts.threads, || run_monte_carlo(&cfg))
                            .map_err(|e| e.to_string())?;
                        let name = format!("compare_tx{m}_rx{rx}_fdt{doppler}_ebn0{snr}.csv");
                        write_file(&out_dir.join(&name), &render_comparison(&result))?;
                        let _ = writeln!(
                            index,
                            "{name},{m},{rx},{doppler},{snr},{train},{data},{},{}",
                            run_opts.runs, run_opts.seed
                        );
                        eprintln!("wrote {}", out_dir.join(&name).display());
                    }
                }
            }
            write_file(&out_dir.join("index.csv"), &index)?;
            eprintln!("wrote {}", out_dir.join("index.csv").display());
            Ok(())
        }
    }
}

fn validated(cfg: ExperimentConfig) -> Result<ExperimentConfig, String> {
    cfg.validate().map_err(|e| {
        format!("invalid configuration: {e}; valid ranges: tx/rx >= 1, 0 <= fdt < 0.5, mod-order 1..=8, runs >= 1")
    })?;
    for warning in cfg.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(cfg)
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    let threads = threads.or_else(|| {
        std::env::var("DDTRACK_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match threads {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool construction")
            .install(job),
        _ => job(),
    }
}

// 17 significant digits; enough to reproduce every f64 bit pattern
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_analysis(trajectory: &AnalysisTrajectory) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rec in &trajectory.records {
        let _ = writeln!(
            out,
            "{},{},,{},,{},,{},,{},{}",
            rec.k,
            rec.mode.as_str(),
            fmt(rec.p_e),
            fmt(rec.sigma_h2),
            fmt(rec.p),
            fmt(rec.q),
            fmt(rec.e_k)
        );
    }
    out
}

fn render_simulation(result: &TrajectoryResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for snap in &result.snapshots {
        let _ = writeln!(
            out,
            "{},{},{},,{},,{},,{},,",
            snap.k,
            snap.mode.as_str(),
            fmt(snap.ber),
            fmt(snap.mse),
            fmt(snap.p_emp),
            fmt(snap.q_emp)
        );
    }
    out
}

fn render_comparison(result: &TrajectoryResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push_str(",ber_gap_rel,mse_gap_rel\n");
    for (snap, rec) in result.snapshots.iter().zip(&result.analysis.records) {
        let ber_gap = rel_gap(rec.p_e, snap.ber);
        let mse_gap = rel_gap(rec.sigma_h2, snap.mse);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            snap.k,
            snap.mode.as_str(),
            fmt(snap.ber),
            fmt(rec.p_e),
            fmt(snap.mse),
            fmt(rec.sigma_h2),
            fmt(snap.p_emp),
            fmt(rec.p),
            fmt(snap.q_emp),
            fmt(rec.q),
            fmt(rec.e_k),
            ber_gap.map(fmt).unwrap_or_default(),
            mse_gap.map(fmt).unwrap_or_default()
        );
    }
    out
}

fn rel_gap(predicted: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| (predicted - reference).abs() / reference.abs())
}

fn report_steady_state(result: &TrajectoryResult) {
    if result
        .snapshots
        .iter()
        .all(|s| s.mode != Mode::DecisionDirected)
    {
        return;
    }
    if let Some(s) = compare_report(result).steady {
        eprintln!(
            "steady state (last {} DD snapshots): BER sim {:.6} ana {:.6} (gap {:.1}%), MSE sim {:.6} ana {:.6} (gap {:.1}%)",
            s.window,
            s.ber_sim,
            s.ber_ana,
            100.0 * s.ber_rel_gap,
            s.mse_sim,
            s.mse_ana,
            100.0 * s.mse_rel_gap
        );
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
