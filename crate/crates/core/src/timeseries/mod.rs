//! Time-domain pipeline: synthesize voltage records at the amplifier input,
//! run the block-FFT/averaging/matched-filter analysis, and Monte-Carlo the
//! driven-ensemble SNR question.
//!
//! This side of the crate reports PSDs per Hz; the conversion from the
//! per-rad/s spectra happens once, in
//! [`synth::TargetSpectrum::from_noise_spectrum`].

pub mod analysis;
pub mod montecarlo;
pub mod record;
pub mod synth;

pub use analysis::{analyze, AnalysisConfig, AnalysisResult, Lineshape, WindowKind};
pub use montecarlo::{
    driven_ensemble_monte_carlo, variance_analytic, DrivenEnsembleConfig,
    DrivenEnsembleResult, PhaseRegime,
};
pub use record::{read_record, write_record, RecordData};
pub use synth::{synthesize, Injection, PulseBias, SynthesisConfig, TargetSpectrum, TimeSeriesRun};
