//! Coupled-mode model of a cavity electro-optic microwave-to-optical
//! transducer: a photonic molecule (two coupled ring resonators) pumped on
//! its red supermode and modulated by a superconducting LC resonator.
//!
//! Every quantity is SI internally and every rate is an angular frequency
//! (rad/s). Hz-valued numbers only appear at the preset-file and CSV
//! boundaries, always with an explicit `_hz` suffix.

pub mod device;
pub mod error;
pub mod interaction;
pub mod labchain;
pub mod molecule;
pub mod optimize;
pub mod output;
pub mod preset;
pub mod scattering;
pub mod sweep;
pub mod units;

pub use error::{ModelError, Result};
