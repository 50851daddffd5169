use super::SweepResult;
use crate::scheduling::Algorithm;

#[derive(Debug, Clone, PartialEq)]
pub struct SnrCrossing {
    pub scheduler: Algorithm,
    pub k: usize,
    /// `None` when the curve never reaches the target on the grid.
    pub snr_db: Option<f64>,
    /// The curve rises back above the target after the first crossing.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrAtTargetBer {
    pub target_ber: f64,
    pub crossings: Vec<SnrCrossing>,
}

/// First SNR at which a BER curve reaches `target`, interpolating linearly in
/// `log10(BER)` between the bracketing grid points.
///
/// A curve already at or below the target on its first point returns that
/// point. If the first point at or below the target has zero BER the log
/// interpolation is undefined and that grid point is returned.
pub fn crossing(points: &[(f64, f64)], target: f64) -> (Option<f64>, bool) {
    let Some(i) = points.iter().position(|&(_, ber)| ber <= target) else {
        return (None, false);
    };
    let non_monotone = points[i + 1..].iter().any(|&(_, ber)| ber > target);
    if i == 0 {
        return (Some(points[0].0), non_monotone);
    }
    let (s0, b0) = points[i - 1];
    let (s1, b1) = points[i];
    if b1 <= 0.0 {
        return (Some(s1), non_monotone);
    }
    let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
    let snr = if l1 == l0 { s1 } else { s0 + (s1 - s0) * (lt - l0) / (l1 - l0) };
    (Some(snr), non_monotone)
}

/// Minimum SNR reaching `target_ber` for every (scheduler, K) in the result.
/// Refused cells are skipped.
pub fn snr_at_target(res: &SweepResult, target_ber: f64) -> SnrAtTargetBer {
    let mut keys: Vec<(Algorithm, usize)> = Vec::new();
    for c in &res.cells {
        if !keys.contains(&(c.scheduler, c.k)) {
            keys.push((c.scheduler, c.k));
        }
    }
    let crossings = keys
        .into_iter()
        .map(|(scheduler, k)| {
            let points: Vec<(f64, f64)> = res
                .cells
                .iter()
                .filter(|c| c.scheduler == scheduler && c.k == k)
                .filter_map(|c| c.ber.map(|b| (c.snr_db, b)))
                .collect();
            let (snr_db, non_monotone) = crossing(&points, target_ber);
            SnrCrossing {
                scheduler,
                k,
                snr_db,
                non_monotone,
            }
        })
        .collect();
    SnrAtTargetBer {
        target_ber,
        crossings,
    }
}
