//! Two-slot UE scheduling: LoFi guess-and-check, LoFi++ worst-UE swapping,
//! and the baseline schedulers they are compared against.
//!
//! Randomized schedulers take every random schedule from its own substream,
//! `Seed(cfg.seed).derive(Stream::Scheduling, ordinal)`, so candidate `k` is
//! the same whatever `K` is and whichever thread evaluates it. The candidate
//! set for `K` is therefore a prefix of the set for `K + 1`.

mod objective;
mod schedule;

pub use objective::{evaluate_schedule, no_scheduling_reference, Evaluation, ObjectiveKind};
pub use schedule::{partition_count, random_schedule, worst_ue_swap, Schedule};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::seed::{Seed, Stream};
use objective::{evaluate_unscheduled, group_sum_mse};
use schedule::lexicographic_subsets;

pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Lofi,
    LofiPp,
    Random,
    None,
    GreedyMse,
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Lofi,
        Algorithm::LofiPp,
        Algorithm::Random,
        Algorithm::None,
        Algorithm::GreedyMse,
        Algorithm::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lofi => "lofi",
            Algorithm::LofiPp => "lofi-pp",
            Algorithm::Random => "random",
            Algorithm::None => "none",
            Algorithm::GreedyMse => "greedy-mse",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    /// Whether the restart count `K` means anything for this algorithm.
    pub fn uses_restarts(self) -> bool {
        matches!(self, Algorithm::Lofi | Algorithm::LofiPp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidParameter(format!("unknown algorithm `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerConfig {
    pub algorithm: Algorithm,
    pub restarts: usize,
    pub objective: ObjectiveKind,
    pub seed: u64,
    /// Largest number of candidates exhaustive search may enumerate.
    pub enumeration_cap: u64,
}

impl SchedulerConfig {
    pub fn new(algorithm: Algorithm, restarts: usize) -> Self {
        SchedulerConfig {
            algorithm,
            restarts,
            objective: ObjectiveKind::MinSinr,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveKind) -> Self {
        self.objective = objective;
        self
    }

    /// `K` as actually used: forced to 1 for algorithms without restarts.
    pub fn effective_restarts(&self) -> usize {
        if self.algorithm.uses_restarts() {
            self.restarts
        } else {
            1
        }
    }
}

/// What a scheduler decided to deploy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deployment {
    Split(Schedule),
    /// Every UE transmits in both slots.
    AllUes,
}

impl Deployment {
    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            Deployment::Split(s) => Some(s),
            Deployment::AllUes => None,
        }
    }
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deployment::Split(s) => s.fmt(f),
            Deployment::AllUes => f.write_str("all-ues"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub deployment: Deployment,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerReport {
    pub deployed: Deployment,
    pub objective_value: f64,
    /// Objective evaluations spent deciding, the complexity measure.
    pub objective_evaluations: u64,
    pub per_ue_sinr: Vec<f64>,
    /// Every full candidate that was scored, in evaluation order.
    pub candidates: Vec<Candidate>,
}

impl SchedulerReport {
    pub fn min_sinr(&self) -> f64 {
        self.per_ue_sinr.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Deploy the first candidate attaining the largest value.
    fn from_candidates(scored: Vec<(Schedule, Evaluation)>) -> Self {
        let mut best = 0;
        for (i, (_, e)) in scored.iter().enumerate() {
            if e.value > scored[best].1.value {
                best = i;
            }
        }
        let (deployed, eval) = scored[best].clone();
        let candidates: Vec<Candidate> = scored
            .into_iter()
            .map(|(s, e)| Candidate {
                deployment: Deployment::Split(s),
                value: e.value,
            })
            .collect();
        SchedulerReport {
            deployed: Deployment::Split(deployed),
            objective_value: eval.value,
            objective_evaluations: candidates.len() as u64,
            per_ue_sinr: eval.per_ue_sinr,
            candidates,
        }
    }
}

fn candidate_rng(seed: u64, ordinal: usize) -> rand_chacha::ChaCha8Rng {
    Seed(seed).derive(Stream::Scheduling, ordinal as u64).rng()
}

fn check_restarts(restarts: usize) -> Result<()> {
    if restarts == 0 {
        Err(Error::InvalidParameter("restarts K must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// LoFi: draw `2K` random schedules, deploy the best.
///
/// All `2K` evaluations are independent and run in parallel.
pub fn lofi(
    h_hat: &ChannelMatrix,
    restarts: usize,
    obj: ObjectiveKind,
    seed: u64,
    n0_over_es: f64,
) -> Result<SchedulerReport> {
    check_restarts(restarts)?;
    let u = h_hat.ue_count();
    let scored = (0..2 * restarts)
        .into_par_iter()
        .map(|c| {
            let s = random_schedule(u, &mut candidate_rng(seed, c))?;
            let e = evaluate_schedule(h_hat, &s, obj, n0_over_es)?;
            Ok((s, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchedulerReport::from_candidates(scored))
}

/// LoFi++: for each of `K` random schedules also try swapping the worst UE
/// of each slot, deploy the best of the `2K` candidates.
///
/// The random schedules are evaluated in parallel first; each swap can only
/// be formed once its parent's SINRs are known. Candidates are logged as
/// `S_1, S'_1, S_2, S'_2, ...`.
pub fn lofi_pp(
    h_hat: &ChannelMatrix,
    restarts: usize,
    obj: ObjectiveKind,
    seed: u64,
    n0_over_es: f64,
) -> Result<SchedulerReport> {
    check_restarts(restarts)?;
    let u = h_hat.ue_count();
    let parents = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let s = random_schedule(u, &mut candidate_rng(seed, k))?;
            let e = evaluate_schedule(h_hat, &s, obj, n0_over_es)?;
            Ok((s, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let children = parents
        .par_iter()
        .map(|(s, e)| {
            let swapped = worst_ue_swap(s, &e.per_ue_sinr);
            let e2 = evaluate_schedule(h_hat, &swapped, obj, n0_over_es)?;
            Ok((swapped, e2))
        })
        .collect::<Result<Vec<_>>>()?;
    let scored = parents
        .into_iter()
        .zip(children)
        .flat_map(|(p, c)| [p, c])
        .collect();
    Ok(SchedulerReport::from_candidates(scored))
}

/// One uniformly random schedule.
pub fn random_baseline(
    h_hat: &ChannelMatrix,
    obj: ObjectiveKind,
    seed: u64,
    n0_over_es: f64,
) -> Result<SchedulerReport> {
    let s = random_schedule(h_hat.ue_count(), &mut candidate_rng(seed, 0))?;
    let e = evaluate_schedule(h_hat, &s, obj, n0_over_es)?;
    Ok(SchedulerReport::from_candidates(vec![(s, e)]))
}

/// Evaluate every slot-1 subset in lexicographic order.
pub fn exhaustive(
    h_hat: &ChannelMatrix,
    obj: ObjectiveKind,
    n0_over_es: f64,
    cap: u64,
) -> Result<SchedulerReport> {
    let u = h_hat.ue_count();
    let count = partition_count(u)?;
    if count > cap as u128 {
        return Err(Error::EnumerationCap {
            count,
            cap: cap as u128,
        });
    }
    let scored = lexicographic_subsets(u)
        .into_par_iter()
        .map(|slot1| {
            let s = Schedule::from_slot1(&slot1, u)?;
            let e = evaluate_schedule(h_hat, &s, obj, n0_over_es)?;
            Ok((s, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchedulerReport::from_candidates(scored))
}

/// Greedy sum-MSE baseline.
///
/// Slot 1 grows one UE at a time, each round adding the UE that gives the
/// smallest slot-1 sum-MSE (ties to the lowest index); the first round
/// therefore picks the strongest UE. The remaining UEs form slot 2. Every
/// trial of a candidate UE counts as one objective evaluation. The final
/// schedule is scored with `obj` for the report without being counted, and
/// is the only entry in the candidate log.
pub fn greedy_mse(h_hat: &ChannelMatrix, obj: ObjectiveKind, n0_over_es: f64) -> Result<SchedulerReport> {
    let u = h_hat.ue_count();
    if !u.is_multiple_of(2) {
        return Err(Error::OddUeCount(u));
    }
    let mut slot1: Vec<usize> = Vec::with_capacity(u / 2);
    let mut used = vec![false; u];
    let mut trials = 0u64;
    while slot1.len() < u / 2 {
        let mut best: Option<(usize, f64)> = None;
        for cand in (0..u).filter(|&c| !used[c]) {
            slot1.push(cand);
            let mse = group_sum_mse(h_hat, &slot1, n0_over_es)?;
            slot1.pop();
            trials += 1;
            if best.is_none_or(|(_, b)| mse < b) {
                best = Some((cand, mse));
            }
        }
        let (pick, _) = best.expect("at least one unused UE remains");
        used[pick] = true;
        slot1.push(pick);
    }
    let s = Schedule::from_slot1(&slot1, u)?;
    let e = evaluate_schedule(h_hat, &s, obj, n0_over_es)?;
    let mut report = SchedulerReport::from_candidates(vec![(s, e)]);
    report.objective_evaluations = trials;
    Ok(report)
}

/// Serve all UEs in every slot.
pub fn no_scheduling(h_hat: &ChannelMatrix, obj: ObjectiveKind, n0_over_es: f64) -> Result<SchedulerReport> {
    let e = evaluate_unscheduled(h_hat, obj, n0_over_es)?;
    Ok(SchedulerReport {
        deployed: Deployment::AllUes,
        objective_value: e.value,
        objective_evaluations: 1,
        candidates: vec![Candidate {
            deployment: Deployment::AllUes,
            value: e.value,
        }],
        per_ue_sinr: e.per_ue_sinr,
    })
}

/// Run the scheduler selected by `cfg` on the estimated channel.
pub fn run_scheduler(h_hat: &ChannelMatrix, cfg: &SchedulerConfig, n0_over_es: f64) -> Result<SchedulerReport> {
    let obj = cfg.objective;
    match cfg.algorithm {
        Algorithm::Lofi => lofi(h_hat, cfg.restarts, obj, cfg.seed, n0_over_es),
        Algorithm::LofiPp => lofi_pp(h_hat, cfg.restarts, obj, cfg.seed, n0_over_es),
        Algorithm::Random => random_baseline(h_hat, obj, cfg.seed, n0_over_es),
        Algorithm::None => no_scheduling(h_hat, obj, n0_over_es),
        Algorithm::GreedyMse => greedy_mse(h_hat, obj, n0_over_es),
        Algorithm::Exhaustive => exhaustive(h_hat, obj, n0_over_es, cfg.enumeration_cap),
    }
}

/// Objective evaluations an algorithm spends on `u_count` UEs.
pub fn expected_evaluations(algorithm: Algorithm, restarts: usize, u_count: usize) -> Result<u128> {
    Ok(match algorithm {
        Algorithm::Lofi | Algorithm::LofiPp => 2 * restarts as u128,
        Algorithm::Random | Algorithm::None => 1,
        Algorithm::Exhaustive => partition_count(u_count)?,
        Algorithm::GreedyMse => (0..u_count / 2).map(|m| (u_count - m) as u128).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_power_control, synth_channel, CMatrix, SynthChannelConfig};

    fn channel(b: usize, u: usize, seed: u64) -> ChannelMatrix {
        let h = synth_channel(&SynthChannelConfig {
            antennas: b,
            ues: u,
            seed,
            ..Default::default()
        })
        .unwrap();
        apply_power_control(&h, 6.0).unwrap()
    }

    const RHO: f64 = 0.01;

    fn assert_argmax(r: &SchedulerReport) {
        let max = r.candidates.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.objective_value, max);
        let first = r.candidates.iter().find(|c| c.value == max).unwrap();
        assert_eq!(first.deployment, r.deployed);
    }

    #[test]
    fn lofi_counts_and_argmax() {
        let h = channel(16, 16, 1);
        for k in [1, 2, 5] {
            let r = lofi(&h, k, ObjectiveKind::MinSinr, 3, RHO).unwrap();
            assert_eq!(r.objective_evaluations, 2 * k as u64);
            assert_eq!(r.candidates.len(), 2 * k);
            assert_argmax(&r);
        }
        assert!(lofi(&h, 0, ObjectiveKind::MinSinr, 3, RHO).is_err());
    }

    #[test]
    fn lofi_pp_pairs_parent_and_swap() {
        let h = channel(16, 16, 2);
        let r = lofi_pp(&h, 3, ObjectiveKind::MinSinr, 9, RHO).unwrap();
        assert_eq!(r.objective_evaluations, 6);
        assert_argmax(&r);
        for pair in r.candidates.chunks(2) {
            let parent = pair[0].deployment.schedule().unwrap();
            let e = evaluate_schedule(&h, parent, ObjectiveKind::MinSinr, RHO).unwrap();
            assert_eq!(pair[0].value, e.value);
            let expect = worst_ue_swap(parent, &e.per_ue_sinr);
            assert_eq!(pair[1].deployment.schedule().unwrap(), &expect);
        }
    }

    #[test]
    fn candidate_sets_nest_in_k() {
        let h = channel(8, 8, 3);
        for alg in [lofi, lofi_pp] {
            let small = alg(&h, 2, ObjectiveKind::MinSinr, 4, RHO).unwrap();
            let big = alg(&h, 5, ObjectiveKind::MinSinr, 4, RHO).unwrap();
            assert_eq!(small.candidates[..], big.candidates[..4]);
            assert!(big.objective_value >= small.objective_value);
        }
    }

    #[test]
    fn exhaustive_counts_and_cap() {
        let h = channel(4, 4, 5);
        let r = exhaustive(&h, ObjectiveKind::MinSinr, RHO, 100).unwrap();
        assert_eq!(r.objective_evaluations, 6);
        assert_argmax(&r);
        let h16 = channel(16, 16, 5);
        let err = exhaustive(&h16, ObjectiveKind::MinSinr, RHO, 1000).unwrap_err();
        assert_eq!(err.to_string(), "refused: 12870 candidate schedules exceeds cap 1000");
    }

    #[test]
    fn exhaustive_dominates() {
        let h = channel(8, 6, 5);
        let best = exhaustive(&h, ObjectiveKind::MinSinr, RHO, 100).unwrap();
        let values: Vec<f64> = best.candidates.iter().map(|c| c.value).collect();
        for k in 1..=6 {
            for r in [
                lofi(&h, k, ObjectiveKind::MinSinr, 5, RHO).unwrap(),
                lofi_pp(&h, k, ObjectiveKind::MinSinr, 5, RHO).unwrap(),
            ] {
                assert!(best.objective_value >= r.objective_value);
                assert!(values.contains(&r.objective_value));
            }
        }
        let r = lofi(&h, 35, ObjectiveKind::MinSinr, 5, RHO).unwrap();
        assert!(values.contains(&r.objective_value) && r.objective_value <= best.objective_value);
        let g = greedy_mse(&h, ObjectiveKind::MinSinr, RHO).unwrap();
        assert!(best.objective_value >= g.objective_value);
    }

    #[test]
    fn greedy_trial_counts() {
        let h = channel(4, 2, 1);
        assert_eq!(greedy_mse(&h, ObjectiveKind::MinSinr, RHO).unwrap().objective_evaluations, 2);
        let h = channel(8, 8, 1);
        let r = greedy_mse(&h, ObjectiveKind::MinSinr, RHO).unwrap();
        assert_eq!(r.objective_evaluations, 26);
        assert_eq!(expected_evaluations(Algorithm::GreedyMse, 1, 8).unwrap(), 26);
    }

    #[test]
    fn greedy_first_pick_is_strongest() {
        let mut m = CMatrix::identity(4, 4);
        m[(2, 2)] *= 3.0;
        let h = ChannelMatrix::new(m).unwrap();
        let r = greedy_mse(&h, ObjectiveKind::MinSinr, RHO).unwrap();
        assert!(r.deployed.schedule().unwrap().slot1().contains(&2));
    }

    #[test]
    fn greedy_orthogonal_matches_exhaustive() {
        let h = ChannelMatrix::new(CMatrix::identity(6, 6)).unwrap();
        let g = greedy_mse(&h, ObjectiveKind::MinSinr, RHO).unwrap();
        let e = exhaustive(&h, ObjectiveKind::MinSinr, RHO, 100).unwrap();
        assert!((g.objective_value - e.objective_value).abs() < 1e-12 * e.objective_value);
    }

    #[test]
    fn no_scheduling_report() {
        let h = channel(16, 16, 8);
        let r = no_scheduling(&h, ObjectiveKind::MinSinr, RHO).unwrap();
        assert_eq!(r.deployed, Deployment::AllUes);
        assert_eq!(r.per_ue_sinr.len(), 16);
        let l = lofi(&h, 1, ObjectiveKind::MinSinr, 0, RHO).unwrap();
        assert!(l.objective_value >= r.objective_value);
    }

    #[test]
    fn dispatch_and_names() {
        let h = channel(8, 8, 2);
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
            let cfg = SchedulerConfig::new(alg, 3).with_seed(7);
            let r = run_scheduler(&h, &cfg, RHO).unwrap();
            assert_eq!(
                r.objective_evaluations as u128,
                expected_evaluations(alg, cfg.effective_restarts(), 8).unwrap()
            );
        }
        assert!("sus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn permutation_equivariance() {
        let h = channel(8, 8, 21);
        let perm = [3usize, 7, 0, 5, 1, 6, 2, 4];
        let permuted = ChannelMatrix::new(h.select(&perm)).unwrap();
        for obj in [ObjectiveKind::MinSinr, ObjectiveKind::SumMse] {
            let a = exhaustive(&h, obj, RHO, 100).unwrap();
            let b = exhaustive(&permuted, obj, RHO, 100).unwrap();
            assert!((a.objective_value - b.objective_value).abs() <= 1e-9 * a.objective_value.abs());
            let a = greedy_mse(&h, obj, RHO).unwrap();
            let b = greedy_mse(&permuted, obj, RHO).unwrap();
            assert!((a.objective_value - b.objective_value).abs() <= 1e-9 * a.objective_value.abs());
        }
    }
}
