//! Reverse-anneal subsystem relaxation toolkit.
//!
//! The crate is organised around the two observables used to validate an
//! annealer as a sampler: the memory order parameter `M` (how much of the
//! initial subsystem preparation survives) and the total-variation distance
//! `D_TV` between the measured subsystem readout and a conditional Boltzmann
//! reference. Around those sit the instance generator ([`model`]), exact
//! quantum simulation ([`qsim`]), classical baselines ([`samplers`]), exact
//! landscape enumeration ([`landscape`]) and campaign orchestration
//! ([`runner`]).
//!
//! Bit convention, used everywhere a configuration is packed into an integer:
//! qubit `k` is bit `k` (qubit 0 least significant) and bit value 0 is spin
//! `+1`.

pub mod diagnostics;
pub mod error;
pub mod landscape;
pub mod model;
pub mod qsim;
pub mod rng;
pub mod runner;
pub mod samplers;

pub use error::{Error, Result};
pub use model::{IsingInstance, SpinConfig};

/// Crate version recorded in every campaign record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
