//! LMMSE equalization, post-equalization SINR, QAM mapping and per-slot
//! link simulation.

mod link;
mod lmmse;
mod qam;

pub use link::{simulate_slot, LinkParams, TransmissionBatch};
pub use lmmse::{equalize, lmmse_matrix, lmmse_mse_diag, post_eq_sinr, EqualizerOutput};
pub use qam::{demodulate, modulate, Constellation};
