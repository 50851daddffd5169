//! `lofi-sched` command line: `sweep`, `schedule` and `count`.
//!
//! Exit status is 0 on success (including sweeps whose exhaustive cells were
//! refused by the enumeration cap), 2 for unusable input such as a missing or
//! malformed file, and 1 for any other failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::channel::load_channel;
use crate::config::SweepFile;
use crate::error::Error;
use crate::scheduling::{partition_count, run_scheduler, Algorithm, ObjectiveKind, SchedulerConfig};
use crate::simulator::{export_results, run_sweep_with_workers, snr_at_target};

#[derive(Debug, Parser)]
#[command(name = "lofi-sched", version, about = "Low-fidelity two-slot UE scheduling for MU-MIMO uplink")]
pub struct Cli {
    /// Print progress and timing to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo BER sweep and write results.csv + manifest.toml.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; does not change results.
        #[arg(long, env = "LOFI_SCHED_WORKERS")]
        workers: Option<usize>,
        /// Override the master seed of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Schedule the UEs of one channel file.
    Schedule {
        channel_file: PathBuf,
        #[arg(long, default_value = "lofi-pp")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value = "min-sinr")]
        objective: ObjectiveKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Refuse exhaustive search above this many candidates.
        #[arg(long, default_value_t = crate::scheduling::DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Es/N0 in dB used inside the objective.
        #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long, env = "LOFI_SCHED_WORKERS")]
        workers: Option<usize>,
    },
    /// Print the number of two-slot schedules C(U, U/2).
    Count { u: usize },
}

impl clap::builder::ValueParserFactory for Algorithm {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Algorithm>().map_err(|e| e.to_string()))
    }
}

impl clap::builder::ValueParserFactory for ObjectiveKind {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<ObjectiveKind>().map_err(|e| e.to_string()))
    }
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) | Error::OddUeCount(_) | Error::InvalidChannel(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn workers_or_default(workers: Option<usize>) -> usize {
    workers
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { code: 1, msg: e.to_string() };
    match cli.command {
        Command::Count { u } => {
            let n = partition_count(u)?;
            writeln!(out, "{n}").map_err(io)?;
        }
        Command::Schedule {
            channel_file,
            algorithm,
            restarts,
            objective,
            seed,
            cap,
            snr_db,
            workers,
        } => {
            let h = load_channel(&channel_file)?;
            let cfg = SchedulerConfig {
                algorithm,
                restarts,
                objective,
                seed,
                enumeration_cap: cap,
            };
            let rho = 10f64.powf(-snr_db / 10.0);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers_or_default(workers))
                .build()
                .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
            let report = pool.install(|| run_scheduler(&h, &cfg, rho))?;
            writeln!(out, "{}", report.deployed).map_err(io)?;
            writeln!(out, "objective {objective} {}", report.objective_value).map_err(io)?;
            let sinr_db: Vec<String> = report
                .per_ue_sinr
                .iter()
                .map(|s| format!("{:.3}", 10.0 * s.log10()))
                .collect();
            writeln!(out, "sinr_db {}", sinr_db.join(" ")).map_err(io)?;
            writeln!(out, "evaluations {}", report.objective_evaluations).map_err(io)?;
        }
        Command::Sweep {
            config,
            out: out_dir,
            workers,
            seed,
        } => {
            let mut file = SweepFile::load(&config)?;
            if let Some(s) = seed {
                file.seed = s;
            }
            let cfg = file.to_sweep_config();
            cfg.validate()?;
            let workers = workers_or_default(workers);
            if cli.verbose > 0 {
                let _ = writeln!(
                    err,
                    "sweep: {} realizations x {} schedulers x {} SNR points on {workers} workers",
                    cfg.realizations,
                    cfg.schedulers.len(),
                    cfg.snr_db.len()
                );
            }
            let res = run_sweep_with_workers(&cfg, workers)?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure::from(Error::io(&out_dir, e)))?;
            let csv_path = out_dir.join("results.csv");
            export_results(&res, &csv_path)?;
            write_manifest(&file, &out_dir.join("manifest.toml"))?;

            let mut refused = Vec::new();
            for c in &res.cells {
                if let Some(r) = &c.refusal {
                    if !refused.contains(r) {
                        let _ = writeln!(err, "warning: {}: {r}", c.scheduler);
                        refused.push(r.clone());
                    }
                }
            }
            writeln!(out, "wrote {}", csv_path.display()).map_err(io)?;
            let crossings = snr_at_target(&res, 0.01);
            for (c, t) in crossings.crossings.iter().zip(&res.scheduling_time) {
                let snr = c.snr_db.map_or("unreached".to_string(), |s| format!("{s:.2} dB"));
                writeln!(out, "{:<12} K={:<2} SNR@1%BER {snr}", c.scheduler.name(), c.k).map_err(io)?;
                if cli.verbose > 0 {
                    let _ = writeln!(err, "{} K={}: {:?} per realization", c.scheduler, c.k, t);
                }
            }
        }
    }
    Ok(())
}

fn write_manifest(file: &SweepFile, path: &Path) -> Result<(), Failure> {
    let text = file.manifest()?;
    fs::write(path, text).map_err(|e| Failure::from(Error::io(path, e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("lofi-sched").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn count() {
        assert_eq!(call(&["count", "16"]), (0, "12870\n".into(), String::new()));
        assert_eq!(call(&["count", "2"]).1, "2\n");
        assert_eq!(call(&["count", "4"]).1, "6\n");
        let (code, _, err) = call(&["count", "5"]);
        assert_ne!(code, 0);
        assert!(err.contains("U must be even"));
    }

    #[test]
    fn missing_config_names_path() {
        let (code, _, err) = call(&["sweep", "--config", "/nonexistent/sweep.toml", "--out", "/tmp/x"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/sweep.toml"), "{err}");
    }

    #[test]
    fn bad_flags() {
        assert_eq!(call(&["schedule", "x.cmat", "--algorithm", "sus"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }
}
