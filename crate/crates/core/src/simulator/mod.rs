//! Monte Carlo BER / complexity harness.
//!
//! One realization runs channel generation, power control, rescaling to
//! unit median gain (so the SNR axis is Es/N0 of the median UE), channel
//! estimation, then for every configured scheduler: schedule on the estimate
//! and transmit both slots over the true channel at every SNR of the grid.
//! Realizations are independent and run in parallel; each draws from seeds
//! derived from `(master seed, realization, ...)` and the per-realization
//! outcomes are merged in realization order, so the result does not depend
//! on the number of worker threads.

mod export;
mod target;

pub use export::{export_results, format_sig, load_results, write_results, CsvRow, CSV_HEADER};
pub use target::{snr_at_target, SnrAtTargetBer, SnrCrossing};

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::channel::{
    apply_power_control, estimate_channel, load_channel, normalize_median_gain, synth_channel, ChannelMatrix, EstimationErrorModel,
    SynthChannelConfig,
};
use crate::detection::{simulate_slot, Constellation, LinkParams};
use crate::error::{Error, Result};
use crate::scheduling::{
    evaluate_schedule, no_scheduling_reference, run_scheduler, Algorithm, Deployment, ObjectiveKind,
    SchedulerConfig, DEFAULT_ENUMERATION_CAP,
};
use crate::seed::{Seed, Stream};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSource {
    /// Fresh synthetic channel per realization; the config's seed is replaced
    /// by a per-realization seed.
    Synthetic(SynthChannelConfig),
    /// Realization `r` uses file `r mod len`.
    Files(Vec<PathBuf>),
}

/// One scheduler column of a sweep; the seed comes from the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerSpec {
    pub algorithm: Algorithm,
    pub restarts: usize,
    pub objective: ObjectiveKind,
    pub enumeration_cap: u64,
}

impl SchedulerSpec {
    pub fn new(algorithm: Algorithm, restarts: usize) -> Self {
        SchedulerSpec {
            algorithm,
            restarts,
            objective: ObjectiveKind::MinSinr,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    fn config(&self, seed: u64) -> SchedulerConfig {
        SchedulerConfig {
            algorithm: self.algorithm,
            restarts: self.restarts,
            objective: self.objective,
            seed,
            enumeration_cap: self.enumeration_cap,
        }
    }

    fn k(&self) -> usize {
        if self.algorithm.uses_restarts() {
            self.restarts
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub channel: ChannelSource,
    pub estimation: EstimationErrorModel,
    /// Es/N0 grid in dB, strictly increasing.
    pub snr_db: Vec<f64>,
    pub schedulers: Vec<SchedulerSpec>,
    /// Symbol periods per realization, split evenly between the two slots.
    pub symbols: usize,
    pub realizations: usize,
    pub seed: u64,
    pub dynamic_range_db: f64,
    /// SNR at which schedules are computed; defaults to the top of the grid.
    pub schedule_snr_db: Option<f64>,
    /// Recompute the schedule at every SNR point instead.
    pub reschedule_per_snr: bool,
    pub retain_records: bool,
}

impl SweepConfig {
    /// Desk-scale setup: 16 antennas, 16 UEs, 6 dB power control, 50
    /// realizations of 10⁴ symbols, SNR 0–30 dB.
    pub fn desk_scale(schedulers: Vec<SchedulerSpec>) -> Self {
        SweepConfig {
            channel: ChannelSource::Synthetic(SynthChannelConfig::default()),
            estimation: EstimationErrorModel::default(),
            snr_db: (0..=10).map(|i| 3.0 * i as f64).collect(),
            schedulers,
            symbols: 10_000,
            realizations: 50,
            seed: 1,
            dynamic_range_db: 6.0,
            schedule_snr_db: None,
            reschedule_per_snr: false,
            retain_records: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) || self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("SNR grid must be finite and strictly increasing".into()));
        }
        if self.realizations == 0 || self.symbols == 0 {
            return Err(Error::Config("realizations and symbols must be at least 1".into()));
        }
        if self.schedulers.is_empty() {
            return Err(Error::Config("no schedulers configured".into()));
        }
        if let Some(s) = self.schedulers.iter().find(|s| s.restarts == 0) {
            return Err(Error::Config(format!("{}: restarts must be at least 1", s.algorithm)));
        }
        if !(self.dynamic_range_db >= 0.0) {
            return Err(Error::Config("dynamic_range_db must be non-negative".into()));
        }
        match &self.channel {
            ChannelSource::Synthetic(c) => c.validate()?,
            ChannelSource::Files(f) if f.is_empty() => {
                return Err(Error::Config("channel file list is empty".into()));
            }
            ChannelSource::Files(_) => {}
        }
        Ok(())
    }

    fn schedule_snr(&self) -> f64 {
        self.schedule_snr_db
            .unwrap_or_else(|| *self.snr_db.last().expect("validated non-empty"))
    }
}

/// Aggregate for one (scheduler, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub scheduler: Algorithm,
    pub k: usize,
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    /// `None` when the scheduler refused (enumeration cap).
    pub ber: Option<f64>,
    pub mean_min_sinr_db: f64,
    pub mean_obj_evals: f64,
    pub realizations: usize,
    pub symbols: usize,
    pub refusal: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationRecord {
    pub realization: usize,
    pub scheduler_index: usize,
    pub snr_index: usize,
    pub bits: u64,
    pub bit_errors: u64,
    pub min_sinr_db: f64,
    pub obj_evals: u64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Ordered by scheduler (config order), then SNR.
    pub cells: Vec<CellResult>,
    pub records: Vec<RealizationRecord>,
    /// Mean wall time spent inside each scheduler per realization. Not part
    /// of the reproducible output.
    pub scheduling_time: Vec<Duration>,
}

impl SweepResult {
    pub fn cell(&self, algorithm: Algorithm, k: usize, snr_db: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.scheduler == algorithm && c.k == k && c.snr_db == snr_db)
    }
}

struct Outcome {
    bits: u64,
    errors: u64,
    min_sinr_db: f64,
    evals: u64,
}

struct SchedulerOutcome {
    per_snr: std::result::Result<Vec<Outcome>, String>,
    elapsed: Duration,
}

fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn realization_channel(cfg: &SweepConfig, r: usize) -> Result<ChannelMatrix> {
    let master = Seed(cfg.seed);
    let h = match &cfg.channel {
        ChannelSource::Synthetic(c) => synth_channel(&SynthChannelConfig {
            seed: master.derive(Stream::Channel, r as u64).0,
            ..c.clone()
        })?,
        ChannelSource::Files(files) => load_channel(&files[r % files.len()])?,
    };
    normalize_median_gain(&apply_power_control(&h, cfg.dynamic_range_db)?)
}

fn run_realization(cfg: &SweepConfig, r: usize, q: &Constellation) -> Result<Vec<SchedulerOutcome>> {
    let master = Seed(cfg.seed);
    let h = realization_channel(cfg, r)?;
    let h_hat = estimate_channel(&h, &cfg.estimation, master.derive(Stream::Estimation, r as u64))?;
    let sched_seed = master.derive(Stream::Scheduling, r as u64).0;
    let rho_ref = 10f64.powf(-cfg.schedule_snr() / 10.0);
    let per_slot = cfg.symbols.div_ceil(2);

    let mut outcomes = Vec::with_capacity(cfg.schedulers.len());
    for (si, spec) in cfg.schedulers.iter().enumerate() {
        let sched_cfg = spec.config(sched_seed);
        let start = Instant::now();
        let reference = match run_scheduler(&h_hat, &sched_cfg, rho_ref) {
            Ok(rep) => rep,
            Err(e @ Error::EnumerationCap { .. }) => {
                outcomes.push(SchedulerOutcome {
                    per_snr: Err(e.to_string()),
                    elapsed: start.elapsed(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut elapsed = start.elapsed();

        let mut per_snr = Vec::with_capacity(cfg.snr_db.len());
        for (ti, &snr) in cfg.snr_db.iter().enumerate() {
            let link = LinkParams::from_snr_db(snr)?;
            let rho = link.n0_over_es();
            let report = if cfg.reschedule_per_snr {
                let t = Instant::now();
                let rep = run_scheduler(&h_hat, &sched_cfg, rho)?;
                elapsed += t.elapsed();
                rep
            } else {
                reference.clone()
            };
            let noise = |slot: u64| {
                master
                    .derive_path(Stream::Noise, &[r as u64, si as u64, ti as u64, slot])
            };
            let (mut bits, mut errors) = (0, 0);
            let min_sinr = match &report.deployed {
                Deployment::Split(s) => {
                    for (slot_idx, slot) in s.slots().into_iter().enumerate() {
                        let b = simulate_slot(&h.select(slot), &h_hat.select(slot), link, q, per_slot, noise(slot_idx as u64))?;
                        bits += b.bits;
                        errors += b.bit_errors;
                    }
                    evaluate_schedule(&h_hat, s, ObjectiveKind::MinSinr, rho)?
                        .per_ue_sinr
                        .into_iter()
                        .fold(f64::INFINITY, f64::min)
                }
                Deployment::AllUes => {
                    for slot_idx in 0..2u64 {
                        let b = simulate_slot(h.matrix(), h_hat.matrix(), link, q, per_slot, noise(slot_idx))?;
                        bits += b.bits;
                        errors += b.bit_errors;
                    }
                    no_scheduling_reference(&h_hat, rho)?
                        .into_iter()
                        .fold(f64::INFINITY, f64::min)
                }
            };
            per_snr.push(Outcome {
                bits,
                errors,
                min_sinr_db: to_db(min_sinr),
                evals: report.objective_evaluations,
            });
        }
        outcomes.push(SchedulerOutcome {
            per_snr: Ok(per_snr),
            elapsed,
        });
    }
    Ok(outcomes)
}

/// Run the sweep on the current rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let q = Constellation::qam16(1.0)?;
    let per_realization = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| run_realization(cfg, r, &q))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    let mut records = Vec::new();
    let mut scheduling_time = Vec::new();
    for (si, spec) in cfg.schedulers.iter().enumerate() {
        let total: Duration = per_realization.iter().map(|o| o[si].elapsed).sum();
        scheduling_time.push(total / cfg.realizations as u32);
        let refusal = per_realization
            .iter()
            .find_map(|o| o[si].per_snr.as_ref().err().cloned());
        for (ti, &snr) in cfg.snr_db.iter().enumerate() {
            let mut cell = CellResult {
                scheduler: spec.algorithm,
                k: spec.k(),
                snr_db: snr,
                bits: 0,
                bit_errors: 0,
                ber: None,
                mean_min_sinr_db: f64::NAN,
                mean_obj_evals: 0.0,
                realizations: 0,
                symbols: cfg.symbols,
                refusal: refusal.clone(),
            };
            if refusal.is_none() {
                let (mut sinr_acc, mut eval_acc) = (0.0, 0.0);
                for (r, o) in per_realization.iter().enumerate() {
                    let out = &o[si].per_snr.as_ref().expect("no refusal")[ti];
                    cell.bits += out.bits;
                    cell.bit_errors += out.errors;
                    sinr_acc += out.min_sinr_db;
                    eval_acc += out.evals as f64;
                    if cfg.retain_records {
                        records.push(RealizationRecord {
                            realization: r,
                            scheduler_index: si,
                            snr_index: ti,
                            bits: out.bits,
                            bit_errors: out.errors,
                            min_sinr_db: out.min_sinr_db,
                            obj_evals: out.evals,
                        });
                    }
                }
                let n = cfg.realizations as f64;
                cell.realizations = cfg.realizations;
                cell.ber = Some(cell.bit_errors as f64 / cell.bits as f64);
                cell.mean_min_sinr_db = sinr_acc / n;
                cell.mean_obj_evals = eval_acc / n;
            }
            cells.push(cell);
        }
    }
    Ok(SweepResult {
        cells,
        records,
        scheduling_time,
    })
}

/// Run the sweep on a dedicated pool with `workers` threads.
pub fn run_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(schedulers: Vec<SchedulerSpec>) -> SweepConfig {
        SweepConfig {
            channel: ChannelSource::Synthetic(SynthChannelConfig {
                antennas: 8,
                ues: 4,
                ..Default::default()
            }),
            snr_db: vec![0.0, 10.0],
            symbols: 400,
            realizations: 3,
            retain_records: true,
            ..SweepConfig::desk_scale(schedulers)
        }
    }

    #[test]
    fn validation() {
        let ok = tiny(vec![SchedulerSpec::new(Algorithm::Lofi, 1)]);
        assert!(ok.validate().is_ok());
        let bad = [
            SweepConfig { snr_db: vec![], ..ok.clone() },
            SweepConfig { snr_db: vec![3.0, 3.0], ..ok.clone() },
            SweepConfig { realizations: 0, ..ok.clone() },
            SweepConfig { symbols: 0, ..ok.clone() },
            SweepConfig { schedulers: vec![], ..ok.clone() },
            SweepConfig { channel: ChannelSource::Files(vec![]), ..ok.clone() },
        ];
        for cfg in bad {
            assert!(run_sweep(&cfg).is_err());
        }
    }

    #[test]
    fn ber_recomputable_from_records() {
        let cfg = tiny(vec![SchedulerSpec::new(Algorithm::Lofi, 2), SchedulerSpec::new(Algorithm::None, 1)]);
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.cells.len(), 4);
        assert_eq!(res.records.len(), 2 * 2 * 3);
        for (ci, cell) in res.cells.iter().enumerate() {
            let (si, ti) = (ci / 2, ci % 2);
            let (bits, errs) = res
                .records
                .iter()
                .filter(|r| r.scheduler_index == si && r.snr_index == ti)
                .fold((0, 0), |(b, e), r| (b + r.bits, e + r.bit_errors));
            assert_eq!(cell.ber, Some(errs as f64 / bits as f64));
            // 200 periods per slot, two slots, 4 bits per symbol.
            let ues_per_period = if cell.scheduler == Algorithm::None { 4 } else { 2 };
            assert_eq!(bits, 3 * 2 * 200 * ues_per_period * 4);
        }
        assert_eq!(res.cell(Algorithm::Lofi, 2, 10.0).unwrap().mean_obj_evals, 4.0);
    }

    #[test]
    fn refusal_is_recorded_not_fatal() {
        let mut ex = SchedulerSpec::new(Algorithm::Exhaustive, 1);
        ex.enumeration_cap = 3;
        let cfg = tiny(vec![ex, SchedulerSpec::new(Algorithm::Random, 1)]);
        let res = run_sweep(&cfg).unwrap();
        assert!(res.cells[0].ber.is_none());
        assert!(res.cells[0].refusal.as_deref().unwrap().contains("6 candidate schedules exceeds cap 3"));
        assert!(res.cells[2].ber.is_some());
    }

    #[test]
    fn reschedule_per_snr_changes_only_scheduling() {
        let base = tiny(vec![SchedulerSpec::new(Algorithm::Exhaustive, 1)]);
        let again = SweepConfig { reschedule_per_snr: true, ..base.clone() };
        let a = run_sweep(&base).unwrap();
        let b = run_sweep(&again).unwrap();
        // At the reference SNR the schedule is the same either way.
        assert_eq!(a.cells[1], b.cells[1]);
    }
}
