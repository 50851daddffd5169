//! Low-fidelity UE scheduling for two-slot multiuser MIMO uplink.
//!
//! The crate provides the LoFi and LoFi++ schedulers together with everything
//! needed to evaluate them: a synthetic mmWave channel model and channel file
//! format ([`channel`]), LMMSE detection and 16-QAM ([`detection`]), the
//! schedulers and baselines ([`scheduling`]), and a seeded Monte Carlo BER
//! harness ([`simulator`]).

pub mod channel;
pub mod cli;
pub mod config;
pub mod detection;
pub mod error;
pub mod scheduling;
pub mod seed;
pub mod simulator;

pub use error::{Error, Result};
pub use seed::{Seed, Stream};
