use rand::RngCore;

use super::lmmse::lmmse_matrix;
use super::qam::Constellation;
use crate::channel::{complex_normal, CMatrix};
use crate::error::{Error, Result};
use crate::seed::Seed;

/// Symbol energy and noise variance of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub es: f64,
    pub n0: f64,
}

impl LinkParams {
    pub fn new(es: f64, n0: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite() && n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need Es > 0 and N0 > 0 (got Es={es}, N0={n0})"
            )));
        }
        Ok(LinkParams { es, n0 })
    }

    /// Unit symbol energy at the given Es/N0 in dB.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(1.0, 10f64.powf(-snr_db / 10.0))
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.es / self.n0).log10()
    }

    pub fn n0_over_es(&self) -> f64 {
        self.n0 / self.es
    }
}

/// Bit-error tally of a batch of slot transmissions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransmissionBatch {
    pub symbols: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub per_ue_bit_errors: Vec<u64>,
}

impl TransmissionBatch {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }
}

const CHUNK: usize = 512;

/// Transmit `num_symbols` symbol periods over one slot and count bit errors.
///
/// Each period draws uniform bits for every scheduled UE, sends
/// `y = H s + n` through the true channel, equalizes with the LMMSE matrix
/// built from `h_hat_slot`, divides each output by its gain `w_uᴴĥ_u` to
/// remove the LMMSE bias, and slices. Fully determined by `seed`.
pub fn simulate_slot(
    h_true_slot: &CMatrix,
    h_hat_slot: &CMatrix,
    params: LinkParams,
    q: &Constellation,
    num_symbols: usize,
    seed: Seed,
) -> Result<TransmissionBatch> {
    if h_true_slot.shape() != h_hat_slot.shape() {
        return Err(Error::Dimension(format!(
            "true channel is {:?} but estimate is {:?}",
            h_true_slot.shape(),
            h_hat_slot.shape()
        )));
    }
    if num_symbols == 0 {
        return Err(Error::InvalidParameter("num_symbols must be at least 1".into()));
    }
    if (q.es() - params.es).abs() > 1e-12 * params.es {
        return Err(Error::InvalidParameter(format!(
            "constellation energy {} does not match Es={}",
            q.es(),
            params.es
        )));
    }
    let m = h_true_slot.ncols();
    let w = lmmse_matrix(h_hat_slot, params.n0_over_es())?;
    let gains: Vec<_> = (0..m).map(|u| w.column(u).dotc(&h_hat_slot.column(u))).collect();
    if let Some(u) = gains.iter().position(|g| g.norm_sqr() == 0.0) {
        return Err(Error::DegenerateEqualizer { ue: u });
    }
    let w_h = w.adjoint();

    let nbits = q.bits_per_symbol();
    let mask = (1u64 << nbits) - 1;
    let mut rng = seed.rng();
    let mut batch = TransmissionBatch {
        per_ue_bit_errors: vec![0; m],
        ..Default::default()
    };

    let mut labels = vec![0usize; m * CHUNK];
    let mut remaining = num_symbols;
    while remaining > 0 {
        let n = remaining.min(CHUNK);
        remaining -= n;
        let mut s = CMatrix::zeros(m, n);
        for t in 0..n {
            for u in 0..m {
                let label = (rng.next_u64() & mask) as usize;
                labels[t * m + u] = label;
                s[(u, t)] = q.point(label);
            }
        }
        let mut y = h_true_slot * &s;
        for z in y.iter_mut() {
            *z += complex_normal(&mut rng, params.n0);
        }
        let z = &w_h * &y;
        for t in 0..n {
            for u in 0..m {
                let decided = q.decide(z[(u, t)] / gains[u]);
                let errs = (decided ^ labels[t * m + u]).count_ones() as u64;
                batch.per_ue_bit_errors[u] += errs;
                batch.bit_errors += errs;
            }
        }
        batch.symbols += (n * m) as u64;
    }
    batch.bits = batch.symbols * nbits as u64;
    Ok(batch)
}
