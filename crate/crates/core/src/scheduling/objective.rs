use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::schedule::Schedule;
use crate::channel::ChannelMatrix;
use crate::detection::{equalize, lmmse_mse_diag};
use crate::error::{Error, Result};

/// Schedule quality measure. Both kinds are maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Worst post-equalization SINR over all UEs (linear).
    #[default]
    MinSinr,
    /// Negated sum of per-UE LMMSE errors, in units of Es.
    SumMse,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::MinSinr => "min-sinr",
            ObjectiveKind::SumMse => "sum-mse",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-sinr" => Ok(ObjectiveKind::MinSinr),
            "sum-mse" => Ok(ObjectiveKind::SumMse),
            other => Err(Error::InvalidParameter(format!(
                "unknown objective `{other}` (expected min-sinr or sum-mse)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Post-equalization SINR of every UE, indexed by UE.
    pub per_ue_sinr: Vec<f64>,
}

impl Evaluation {
    pub fn min_sinr(&self) -> f64 {
        self.per_ue_sinr.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn slot_sum_mse(h_hat: &ChannelMatrix, ues: &[usize], n0_over_es: f64) -> Result<f64> {
    Ok(lmmse_mse_diag(&h_hat.select(ues), n0_over_es)?.iter().sum())
}

/// Sum of LMMSE errors for an arbitrary UE group, used by the greedy baseline.
pub(crate) fn group_sum_mse(h_hat: &ChannelMatrix, ues: &[usize], n0_over_es: f64) -> Result<f64> {
    slot_sum_mse(h_hat, ues, n0_over_es)
}

/// One objective evaluation: equalize both slots and score the schedule.
pub fn evaluate_schedule(
    h_hat: &ChannelMatrix,
    s: &Schedule,
    obj: ObjectiveKind,
    n0_over_es: f64,
) -> Result<Evaluation> {
    if s.ue_count() != h_hat.ue_count() {
        return Err(Error::InvalidSchedule(format!(
            "schedule covers {} UEs but the channel has {}",
            s.ue_count(),
            h_hat.ue_count()
        )));
    }
    let mut per_ue_sinr = vec![0.0; h_hat.ue_count()];
    let mut mse_total = 0.0;
    for slot in s.slots() {
        let h_slot = h_hat.select(slot);
        let eq = equalize(&h_slot, n0_over_es)?;
        for (&u, &v) in slot.iter().zip(&eq.sinr) {
            per_ue_sinr[u] = v;
        }
        if obj == ObjectiveKind::SumMse {
            mse_total += lmmse_mse_diag(&h_slot, n0_over_es)?.iter().sum::<f64>();
        }
    }
    let value = match obj {
        ObjectiveKind::MinSinr => per_ue_sinr.iter().copied().fold(f64::INFINITY, f64::min),
        ObjectiveKind::SumMse => -mse_total,
    };
    Ok(Evaluation { value, per_ue_sinr })
}

/// Per-UE SINR when every UE is served in every slot.
pub fn no_scheduling_reference(h_hat: &ChannelMatrix, n0_over_es: f64) -> Result<Vec<f64>> {
    Ok(equalize(h_hat.matrix(), n0_over_es)?.sinr)
}

/// Objective value of serving all UEs together.
pub(crate) fn evaluate_unscheduled(
    h_hat: &ChannelMatrix,
    obj: ObjectiveKind,
    n0_over_es: f64,
) -> Result<Evaluation> {
    let per_ue_sinr = no_scheduling_reference(h_hat, n0_over_es)?;
    let value = match obj {
        ObjectiveKind::MinSinr => per_ue_sinr.iter().copied().fold(f64::INFINITY, f64::min),
        ObjectiveKind::SumMse => {
            let all: Vec<usize> = (0..h_hat.ue_count()).collect();
            -slot_sum_mse(h_hat, &all, n0_over_es)?
        }
    };
    Ok(Evaluation { value, per_ue_sinr })
}
