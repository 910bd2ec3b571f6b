//! Noise budgets and spin-projection-noise sensitivity limits for inductively
//! detected NMR experiments.
//!
//! The crate models a nuclear spin ensemble coupled to a tuned-and-matched
//! pickup circuit and computes, from first principles:
//!
//! - the complex spin susceptibility, the spin contribution to the probe
//!   impedance, and the circuit back-action on the spin coherence
//!   ([`spins`], [`circuit`]);
//! - the complete noise PSD at the amplifier input — spin-projection noise,
//!   circuit Nyquist noise, and amplifier noise, all reshaped by the
//!   spin-loaded impedance ([`spectra`]);
//! - spin-projection-noise-limited coupling projections versus axion mass for
//!   EDM and gradient dark-matter searches ([`sensitivity`]);
//! - a time-domain synthesis/analysis pipeline with a driven-ensemble Monte
//!   Carlo for validating the search strategy ([`timeseries`]).
//!
//! All PSDs inside the crate are one-sided per unit angular frequency
//! (V²·s/rad); the time-series pipeline converts to per-Hz at a single
//! boundary ([`units`]).

pub mod circuit;
pub mod constants;
pub mod error;
pub mod grid;
pub mod presets;
pub mod sensitivity;
pub mod spectra;
pub mod spins;
pub mod timeseries;
pub mod units;

pub use circuit::{probe_impedance, transfer_set, tune, ProbeCircuit, TransferSet};
pub use error::{Error, Result};
pub use sensitivity::{AxionSearchConfig, Coupling, SensitivityCurve};
pub use spectra::{compose_spectrum, NoiseSpectrum};
pub use spins::{EnsembleState, Polarization, SpinEnsemble, SpinImpedance};
pub use timeseries::{SynthesisConfig, TimeSeriesRun};
