//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter violated a domain constraint.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested impedance match is impossible: Qc·ωc·Lc must exceed Ra.
    #[error(
        "unmatchable probe: Qc*wc*Lc = {tank_ohm:.6e} ohm must exceed Ra = {ra_ohm:.6e} ohm"
    )]
    Unmatchable { tank_ohm: f64, ra_ohm: f64 },

    /// The tuning solver failed to converge; residuals are relative to Ra.
    #[error(
        "tuning did not converge after {iterations} iterations \
         (|Re Zp - Ra|/Ra = {re_residual:.3e}, |Im Zp|/Ra = {im_residual:.3e})"
    )]
    TuneNonConvergence {
        iterations: usize,
        re_residual: f64,
        im_residual: f64,
    },

    /// The supplied frequency grid cannot resolve the narrowest feature.
    #[error(
        "under-resolved grid near {feature}: spacing {found:.6e} rad/s exceeds \
         required {required:.6e} rad/s (20 points per linewidth)"
    )]
    UnderResolvedGrid {
        feature: &'static str,
        required: f64,
        found: f64,
    },

    /// Time-series configuration error (aliasing, block sizing, statistics).
    #[error("time series error: {0}")]
    TimeSeries(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
