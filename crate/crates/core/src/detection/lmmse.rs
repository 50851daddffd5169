use nalgebra::Cholesky;

use crate::channel::CMatrix;
use crate::error::{Error, Result};

fn check_rho(n0_over_es: f64) -> Result<()> {
    if n0_over_es > 0.0 && n0_over_es.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "N0/Es must be positive and finite (got {n0_over_es})"
        )))
    }
}

fn regularized_gram(h_hat: &CMatrix, n0_over_es: f64) -> Result<Cholesky<num_complex::Complex64, nalgebra::Dyn>> {
    check_rho(n0_over_es)?;
    if h_hat.ncols() == 0 {
        return Err(Error::Dimension("slot must contain at least one UE".into()));
    }
    let mut gram = h_hat.ad_mul(h_hat);
    for i in 0..gram.nrows() {
        gram[(i, i)] += n0_over_es;
    }
    Cholesky::new(gram).ok_or(Error::NotPositiveDefinite)
}

/// `W = Ĥ(ĤᴴĤ + ρI)⁻¹`, computed by a Cholesky solve of the Hermitian
/// regularized Gram system.
pub fn lmmse_matrix(h_hat: &CMatrix, n0_over_es: f64) -> Result<CMatrix> {
    let chol = regularized_gram(h_hat, n0_over_es)?;
    // (G + ρI) X = Ĥᴴ  =>  W = Xᴴ since G + ρI is Hermitian.
    Ok(chol.solve(&h_hat.adjoint()).adjoint())
}

/// Per-UE LMMSE error, the diagonal of `Es·(I + (Es/N0)ĤᴴĤ)⁻¹` in units of Es.
pub fn lmmse_mse_diag(h_hat: &CMatrix, n0_over_es: f64) -> Result<Vec<f64>> {
    let inv = regularized_gram(h_hat, n0_over_es)?.inverse();
    Ok((0..inv.nrows()).map(|i| n0_over_es * inv[(i, i)].re).collect())
}

/// Post-equalization SINR of every UE in a slot:
/// `|w_uᴴĥ_u|² / (Σ_{u'≠u} |w_uᴴĥ_{u'}|² + ρ‖w_u‖²)`.
pub fn post_eq_sinr(h_hat: &CMatrix, w: &CMatrix, n0_over_es: f64) -> Result<Vec<f64>> {
    check_rho(n0_over_es)?;
    if h_hat.shape() != w.shape() {
        return Err(Error::Dimension(format!(
            "channel is {:?} but equalizer is {:?}",
            h_hat.shape(),
            w.shape()
        )));
    }
    let cross = w.ad_mul(h_hat);
    (0..w.ncols())
        .map(|u| {
            let w_norm = w.column(u).norm_squared();
            if w_norm == 0.0 {
                return Err(Error::DegenerateEqualizer { ue: u });
            }
            let row = cross.row(u);
            let signal = row[u].norm_sqr();
            let interference: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>() - signal;
            Ok(signal / (interference.max(0.0) + n0_over_es * w_norm))
        })
        .collect()
}

/// LMMSE matrix and post-equalization SINRs for one slot.
#[derive(Debug, Clone)]
pub struct EqualizerOutput {
    pub w: CMatrix,
    pub sinr: Vec<f64>,
}

pub fn equalize(h_hat: &CMatrix, n0_over_es: f64) -> Result<EqualizerOutput> {
    let w = lmmse_matrix(h_hat, n0_over_es)?;
    let sinr = post_eq_sinr(h_hat, &w, n0_over_es)?;
    Ok(EqualizerOutput { w, sinr })
}
