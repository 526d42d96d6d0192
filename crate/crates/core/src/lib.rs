//! Link-level simulation and bit-error analysis for noise modulation, where
//! each bit selects the variance of a transmitted noise waveform.
//!
//! The signal chain is `waveforms` → `channel` → `detect`; `theory` holds the
//! matching error-probability expressions and `montecarlo` cross-checks the two.
//! `experiments` runs the standard BER/BEP sweeps and writes CSV and SVG.

pub mod channel;
pub mod cli;
pub mod config;

pub mod detect;
pub mod error;
pub mod experiments;

pub mod montecarlo;
pub mod params;
pub mod randgen;
pub mod theory;
pub mod waveforms;

pub use error::{Error, Result};
pub use params::{
    db_to_linear, linear_to_db, ChannelRealization, ComplexSample, Scheme, SchemeParams,
};
