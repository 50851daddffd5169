//! Sweep configuration file (TOML).
//!
//! Unknown keys are rejected. Missing keys take the values listed in
//! `configs/defaults.toml`. Relative channel-file paths are resolved against
//! the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{EstimationErrorModel, SynthChannelConfig};
use crate::error::{Error, Result};
use crate::scheduling::{Algorithm, ObjectiveKind, DEFAULT_ENUMERATION_CAP};
use crate::simulator::{ChannelSource, SchedulerSpec, SweepConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepFile {
    pub seed: u64,
    pub realizations: usize,
    pub symbols: usize,
    pub snr_db: Vec<f64>,
    pub dynamic_range_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_snr_db: Option<f64>,
    pub reschedule_per_snr: bool,
    pub channel: ChannelSection,
    pub estimation: EstimationErrorModel,
    pub scheduler: Vec<SchedulerSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelSection {
    Synthetic(SynthSection),
    Files(FilesSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub antennas: usize,
    pub ues: usize,
    pub paths: usize,
    pub k_factor_db: f64,
    pub angle_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilesSection {
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerSection {
    pub algorithm: Algorithm,
    #[serde(default = "one")]
    pub restarts: usize,
    #[serde(default)]
    pub objective: ObjectiveKind,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn one() -> usize {
    1
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

impl Default for SynthSection {
    fn default() -> Self {
        let d = SynthChannelConfig::default();
        SynthSection {
            antennas: d.antennas,
            ues: d.ues,
            paths: d.paths,
            k_factor_db: d.k_factor_db,
            angle_spread: d.angle_spread,
        }
    }
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection::Synthetic(SynthSection::default())
    }
}

impl SchedulerSection {
    fn new(algorithm: Algorithm, restarts: usize) -> Self {
        SchedulerSection {
            algorithm,
            restarts,
            objective: ObjectiveKind::MinSinr,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Default for SweepFile {
    fn default() -> Self {
        use Algorithm::{Exhaustive, GreedyMse, Lofi, LofiPp, Random};
        SweepFile {
            seed: 1,
            realizations: 50,
            symbols: 10_000,
            snr_db: (0..=10).map(|i| 3.0 * i as f64).collect(),
            dynamic_range_db: 6.0,
            schedule_snr_db: None,
            reschedule_per_snr: false,
            channel: ChannelSection::default(),
            estimation: EstimationErrorModel::default(),
            scheduler: vec![
                SchedulerSection::new(Algorithm::None, 1),
                SchedulerSection::new(Random, 1),
                SchedulerSection::new(GreedyMse, 1),
                SchedulerSection::new(Lofi, 1),
                SchedulerSection::new(Lofi, 2),
                SchedulerSection::new(Lofi, 4),
                SchedulerSection::new(LofiPp, 1),
                SchedulerSection::new(LofiPp, 2),
                SchedulerSection::new(LofiPp, 4),
                SchedulerSection::new(Exhaustive, 1),
            ],
        }
    }
}

impl SweepFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let ChannelSection::Files(f) = &mut file.channel {
            for p in &mut f.files {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(file)
    }

    pub fn to_sweep_config(&self) -> SweepConfig {
        let channel = match &self.channel {
            ChannelSection::Synthetic(s) => ChannelSource::Synthetic(SynthChannelConfig {
                antennas: s.antennas,
                ues: s.ues,
                paths: s.paths,
                k_factor_db: s.k_factor_db,
                angle_spread: s.angle_spread,
                seed: 0,
            }),
            ChannelSection::Files(f) => ChannelSource::Files(f.files.clone()),
        };
        SweepConfig {
            channel,
            estimation: self.estimation,
            snr_db: self.snr_db.clone(),
            schedulers: self
                .scheduler
                .iter()
                .map(|s| SchedulerSpec {
                    algorithm: s.algorithm,
                    restarts: s.restarts,
                    objective: s.objective,
                    enumeration_cap: s.cap,
                })
                .collect(),
            symbols: self.symbols,
            realizations: self.realizations,
            seed: self.seed,
            dynamic_range_db: self.dynamic_range_db,
            schedule_snr_db: self.schedule_snr_db,
            reschedule_per_snr: self.reschedule_per_snr,
            retain_records: false,
        }
    }

    /// Self-contained manifest: the resolved config with absolute paths.
    /// Feeding it back as a config reproduces the run.
    pub fn manifest(&self) -> Result<String> {
        let mut resolved = self.clone();
        if let ChannelSection::Files(f) = &mut resolved.channel {
            for p in &mut f.files {
                if let Ok(abs) = fs::canonicalize(&*p) {
                    *p = abs;
                }
            }
        }
        let body = toml::to_string(&resolved).map_err(|e| Error::Config(e.to_string()))?;
        Ok(format!(
            "# lofi-sched {} sweep manifest\n# rerun with: lofi-sched sweep --config <this file> --out <dir>\n{body}",
            env!("CARGO_PKG_VERSION")
        ))
    }
}
