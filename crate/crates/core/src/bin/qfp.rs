//! `qfp`: batch commands over the fingerprinting toolkit.
//!
//! Data goes to stdout (JSON or CSV), diagnostics to stderr. Exit status is 0 on
//! success, 1 for unreadable or malformed input files, 2 for invalid flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qfp::calib::{calibrate, parse_visibility_csv};
use qfp::classical::{best_success_shared_random, RogerClass};
use qfp::mc::{run_simulation, Adversary, SimConfig};
use qfp::protocol::{ProtocolKind, RogerStrategy};
use qfp::qstate::{search_encoding, tetrahedral_encoding, BlochState, Encoding};
use qfp::strategy::{beats_classical, optimize_mixed};
use qfp::twophoton::{dip_curve, dip_curve_csv, symmetric_delays, CoincidenceModel, DEFAULT_TAU_C};

#[derive(Parser)]
#[command(name = "qfp", version, about = "Single-qubit quantum fingerprinting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the state encoding one message, as `w,theta,phi` CSV.
    Encode {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4096))]
        m: u64,
        #[arg(long)]
        message: u64,
        /// Search for an encoding instead of using the tetrahedral one (always on for m != 4).
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo run of a protocol; prints the report as JSON.
    Simulate {
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        dip_depth: f64,
        /// Probability of overturning a "same" verdict; enables the mixed strategy.
        #[arg(long)]
        pi0: Option<f64>,
        /// Probability of overturning a "different" verdict; enables the mixed strategy.
        #[arg(long)]
        pi1: Option<f64>,
        /// `wcs`, `uniform`, or a fixed pair `X,Y`.
        #[arg(long, default_value = "wcs", value_parser = parse_adversary)]
        adversary: Adversary,
        /// Worker threads (default: all cores). The report does not depend on it.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
        threads: Option<u64>,
        /// Also write the per-pair error matrix as CSV.
        #[arg(long)]
        pair_csv: Option<PathBuf>,
    },
    /// Equalizing mixed strategy for the given error rates.
    Optimize {
        #[arg(long)]
        p_same: f64,
        #[arg(long)]
        p_diff: f64,
    },
    /// Calibrate the error model from a visibility table CSV.
    Calibrate {
        #[arg(long)]
        table: PathBuf,
        /// Use two-decimal figures (dip depth rounded down).
        #[arg(long)]
        rounded: bool,
        /// Also report the optimal mixed strategy.
        #[arg(long)]
        optimize: bool,
    },
    /// Best classical one-bit success with shared random bits, by exhaustive search.
    Classical {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=2))]
        shared_bits: u32,
        #[arg(long, value_enum)]
        roger: Roger,
        #[arg(long, default_value_t = 4)]
        m: usize,
    },
    /// Normalized coincidence rate against delay, as `tau_s,relative_rate` CSV.
    DipCurve {
        /// Overlap of the two input states.
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        dip_depth: f64,
        #[arg(long, default_value_t = DEFAULT_TAU_C)]
        tau_c: f64,
        #[arg(long)]
        tau_max: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
        points: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Quantum,
    Entangled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Roger {
    Pure,
    Mixed,
}

fn parse_adversary(s: &str) -> Result<Adversary, String> {
    match s {
        "wcs" => Ok(Adversary::Wcs),
        "uniform" => Ok(Adversary::Uniform),
        pair => {
            let (x, y) =
                pair.split_once(',').ok_or_else(|| format!("expected `wcs`, `uniform` or `X,Y`, got {pair:?}"))?;
            let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
            Ok(Adversary::FixedPair(parse(x)?, parse(y)?))
        }
    }
}

enum Failure {
    Usage(String),
    Input(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Encode { m, message, search, iterations, seed } => encode(m, message, search, iterations, seed),
        Command::Simulate { protocol, trials, seed, dip_depth, pi0, pi1, adversary, threads, pair_csv } => {
            let kind = match protocol {
                Protocol::Quantum => ProtocolKind::QuantumUnentangled,
                Protocol::Entangled => ProtocolKind::QuantumEntangled,
            };
            let strategy = if pi0.is_some() || pi1.is_some() {
                RogerStrategy::mixed(pi0.unwrap_or(0.0), pi1.unwrap_or(0.0)).map_err(usage)?
            } else {
                RogerStrategy::Pure
            };
            let mut config = SimConfig::new(kind, trials, seed);
            config.model = CoincidenceModel::with_dip_depth(dip_depth).map_err(usage)?;
            config.strategy = strategy;
            config.adversary = adversary;
            let report = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n as usize)
                    .build()
                    .map_err(input)?
                    .install(|| run_simulation(&config)),
                None => run_simulation(&config),
            }
            .map_err(usage)?;
            if let Some(path) = pair_csv {
                std::fs::write(&path, report.pair_matrix_csv())
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
            }
            println!("{}", report.to_json());
            Ok(())
        }
        Command::Optimize { p_same, p_diff } => {
            print_json(&optimize_mixed(p_same, p_diff).map_err(usage)?);
            Ok(())
        }
        Command::Calibrate { table, rounded, optimize } => {
            let text = std::fs::read_to_string(&table).map_err(|e| input(format!("{}: {e}", table.display())))?;
            let parsed = parse_visibility_csv(&text).map_err(|e| input(format!("{}: {e}", table.display())))?;
            let mut cal = calibrate(&parsed);
            if rounded {
                cal = cal.rounded();
            }
            if optimize {
                let strategy = optimize_mixed(cal.p_same_err, cal.p_diff_err).map_err(input)?;
                print_json(&json!({
                    "calibration": cal,
                    "strategy": strategy,
                    "beats_classical": beats_classical(strategy.success),
                }));
            } else {
                print_json(&cal);
            }
            Ok(())
        }
        Command::Classical { shared_bits, roger, m } => {
            let class = match roger {
                Roger::Pure => RogerClass::Pure,
                Roger::Mixed => RogerClass::Mixed,
            };
            let report = best_success_shared_random(m, shared_bits, class).map_err(usage)?;
            print_json(&report.to_json());
            Ok(())
        }
        Command::DipCurve { delta, dip_depth, tau_c, tau_max, points } => {
            if !(0.0..=1.0).contains(&delta) {
                return Err(usage(format!("--delta {delta} outside [0, 1]")));
            }
            if !(tau_max.is_finite() && tau_max >= 0.0) {
                return Err(usage(format!("--tau-max {tau_max} must be a non-negative number")));
            }
            let model = CoincidenceModel::new(dip_depth, tau_c).map_err(usage)?;
            // |0> against a state at overlap delta with it
            let a = BlochState::zero();
            let b = BlochState::new(2.0 * delta.sqrt().acos(), 0.0).map_err(usage)?;
            let curve = dip_curve(&a, &b, &model, &symmetric_delays(tau_max, points as usize)).map_err(usage)?;
            print!("{}", dip_curve_csv(&curve));
            Ok(())
        }
    }
}

fn encode(m: u64, message: u64, search: bool, iterations: u64, seed: u64) -> Outcome {
    if message >= m {
        return Err(usage(format!("--message {message} outside 0..{m}")));
    }
    let enc: Encoding = if m == 4 && !search {
        tetrahedral_encoding()
    } else {
        search_encoding(m as usize, iterations as usize, seed).map_err(usage)?
    };
    let state = enc.states()[message as usize];
    println!("w,theta,phi");
    println!("{message},{:?},{:?}", state.theta(), state.phi());
    Ok(())
}
