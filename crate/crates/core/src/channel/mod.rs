//! Channel matrices: synthetic mmWave generation, file I/O, power control and
//! channel-estimation error.

mod file;

pub use file::{load_channel, parse_channel, save_channel, write_channel};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::Seed;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Draw one circularly-symmetric complex Gaussian sample with the given
/// total variance.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// B×U matrix of UE channel vectors, one column per UE.
///
/// Construction validates that U is even and at least 2, every entry is
/// finite, and no column is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (b, u) = entries.shape();
        if b == 0 {
            return Err(Error::InvalidChannel("B must be at least 1".into()));
        }
        if u < 2 {
            return Err(Error::InvalidChannel(format!("U must be at least 2 (got U={u})")));
        }
        if u % 2 != 0 {
            return Err(Error::OddUeCount(u));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "non-finite entry at antenna {}, UE {}",
                pos % b + 1,
                pos / b + 1
            )));
        }
        for (j, col) in entries.column_iter().enumerate() {
            if col.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                return Err(Error::InvalidChannel(format!("UE {} has an all-zero channel", j + 1)));
            }
        }
        Ok(ChannelMatrix { entries })
    }

    /// Build from separate real and imaginary parts, both column-major B×U.
    pub fn from_parts(antennas: usize, ue_count: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        let n = antennas * ue_count;
        if re.len() != n || im.len() != n {
            return Err(Error::Dimension(format!(
                "expected {n} real and imaginary parts for B={antennas}, U={ue_count}, got {} and {}",
                re.len(),
                im.len()
            )));
        }
        let entries = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i));
        Self::new(CMatrix::from_iterator(antennas, ue_count, entries))
    }

    pub fn antennas(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ue_count(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Receive power ‖h_u‖² of UE `u` (0-based).
    pub fn column_power(&self, u: usize) -> f64 {
        self.entries.column(u).norm_squared()
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select(&self, ues: &[usize]) -> CMatrix {
        self.entries.select_columns(ues)
    }
}

/// Steering vector of a half-wavelength ULA: entry k is `exp(iπ·k·sin θ)`.
pub fn ula_steering(b: usize, sin_angle: f64) -> CVector {
    CVector::from_fn(b, |k, _| Complex64::from_polar(1.0, PI * k as f64 * sin_angle))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthChannelConfig {
    pub antennas: usize,
    pub ues: usize,
    /// Number of scattered (non-LoS) paths per UE.
    pub paths: usize,
    /// LoS-to-scatter power ratio in dB; `inf` gives a pure LoS channel.
    pub k_factor_db: f64,
    /// Width in radians of the angular sector, centered on broadside, that
    /// contains every path direction.
    pub angle_spread: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SynthChannelConfig {
    fn default() -> Self {
        SynthChannelConfig {
            antennas: 16,
            ues: 16,
            paths: 3,
            k_factor_db: 10.0,
            angle_spread: 2.0 * PI / 3.0,
            seed: 0,
        }
    }
}

impl SynthChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::InvalidParameter("antennas must be at least 1".into()));
        }
        if self.ues < 2 {
            return Err(Error::InvalidParameter("ues must be at least 2".into()));
        }
        if !self.ues.is_multiple_of(2) {
            return Err(Error::OddUeCount(self.ues));
        }
        if self.paths == 0 {
            return Err(Error::InvalidParameter("paths must be at least 1".into()));
        }
        if !(0.0..=PI).contains(&self.angle_spread) {
            return Err(Error::InvalidParameter(format!(
                "angle_spread must lie in [0, π] (got {})",
                self.angle_spread
            )));
        }
        if self.k_factor_db.is_nan() || self.k_factor_db == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter("k_factor_db must be a number".into()));
        }
        Ok(())
    }

    fn path_weights(&self) -> (f64, f64) {
        if self.k_factor_db == f64::INFINITY {
            return (1.0, 0.0);
        }
        let k = 10f64.powf(self.k_factor_db / 10.0);
        ((k / (k + 1.0)).sqrt(), (1.0 / ((k + 1.0) * self.paths as f64)).sqrt())
    }
}

/// Geometric multipath ULA channel with a Rician LoS component.
///
/// Column u is `sqrt(κ/(κ+1))·α₀·a(θ₀) + sqrt(1/((κ+1)L))·Σ α_l·a(θ_l)`,
/// with `α` standard complex Gaussian and every `sin θ` uniform over
/// `[-sin(spread/2), sin(spread/2)]`. The average gain `E‖h_u‖²/B` is one.
pub fn synth_channel(cfg: &SynthChannelConfig) -> Result<ChannelMatrix> {
    cfg.validate()?;
    let (los_w, nlos_w) = cfg.path_weights();
    let max_sin = (cfg.angle_spread / 2.0).sin();
    let mut rng = Seed(cfg.seed).rng();
    let mut h = CMatrix::zeros(cfg.antennas, cfg.ues);
    for u in 0..cfg.ues {
        let mut col = CVector::zeros(cfg.antennas);
        for l in 0..=cfg.paths {
            let sin_angle = if max_sin > 0.0 {
                rng.random_range(-max_sin..=max_sin)
            } else {
                0.0
            };
            let gain = complex_normal(&mut rng, 1.0);
            let weight = if l == 0 { los_w } else { nlos_w };
            if weight > 0.0 {
                col += ula_steering(cfg.antennas, sin_angle) * (gain * weight);
            }
        }
        h.set_column(u, &col);
    }
    ChannelMatrix::new(h)
}

/// Per-UE power control bounding the spread of receive powers at the BS.
///
/// The reference power is the median of `‖h_u‖²`; each column is scaled by a
/// real positive gain so its power is clamped into
/// `[P_ref·10^(-d/20), P_ref·10^(d/20)]`. UEs already inside the window are
/// left untouched.
pub fn apply_power_control(h: &ChannelMatrix, dynamic_range_db: f64) -> Result<ChannelMatrix> {
    if !(dynamic_range_db >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dynamic range must be non-negative (got {dynamic_range_db})"
        )));
    }
    let powers: Vec<f64> = (0..h.ue_count()).map(|u| h.column_power(u)).collect();
    if let Some(u) = powers.iter().position(|&p| p == 0.0) {
        return Err(Error::InvalidChannel(format!("UE {} has an all-zero channel", u + 1)));
    }
    let p_ref = median(&powers);
    let half = 10f64.powf(dynamic_range_db / 20.0);
    let (lo, hi) = (p_ref / half, p_ref * half);
    let mut out = h.matrix().clone();
    for (u, &p) in powers.iter().enumerate() {
        let target = if dynamic_range_db == 0.0 { p_ref } else { p.clamp(lo, hi) };
        if target != p {
            let g = (target / p).sqrt();
            out.column_mut(u).scale_mut(g);
        }
    }
    ChannelMatrix::new(out)
}

/// Common rescaling so the median UE has `‖h_u‖² = 1`. With this
/// normalization `Es/N0` is the single-UE matched-filter SNR of the median UE.
pub fn normalize_median_gain(h: &ChannelMatrix) -> Result<ChannelMatrix> {
    let powers: Vec<f64> = (0..h.ue_count()).map(|u| h.column_power(u)).collect();
    let scale = median(&powers).sqrt().recip();
    ChannelMatrix::new(h.matrix() * Complex64::new(scale, 0.0))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationErrorModel {
    /// Per-entry variance of the additive estimation error (0 = perfect CSI).
    pub error_variance: f64,
}

/// Channel estimate `ĥ = h + e` with i.i.d. `CN(0, error_variance)` error.
pub fn estimate_channel(
    h: &ChannelMatrix,
    model: &EstimationErrorModel,
    seed: Seed,
) -> Result<ChannelMatrix> {
    if !(model.error_variance >= 0.0) || !model.error_variance.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "error_variance must be finite and non-negative (got {})",
            model.error_variance
        )));
    }
    if model.error_variance == 0.0 {
        return Ok(h.clone());
    }
    let mut rng = seed.rng();
    let mut out = h.matrix().clone();
    for z in out.iter_mut() {
        *z += complex_normal(&mut rng, model.error_variance);
    }
    ChannelMatrix::new(out)
}
