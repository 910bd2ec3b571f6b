//! Stationary Gaussian voltage-record synthesis from a target one-sided PSD,
//! with optional injected axion-like signal and pulse-bias carrier.
//!
//! Frequency-domain synthesis: each overlap-free block gets independent
//! complex Gaussian bin amplitudes scaled by √PSD and is inverse-transformed.
//! The random stream is counter-based on (seed, block index), so parallel
//! block synthesis is reproducible regardless of scheduling.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::NoiseSpectrum;
use crate::units::per_rad_to_per_hz;

/// Target one-sided PSD in V²/Hz versus frequency in Hz, linearly
/// interpolated, zero outside the tabulated range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSpectrum {
    freq_hz: Vec<f64>,
    psd_per_hz: Vec<f64>,
}

impl TargetSpectrum {
    pub fn from_pairs(freq_hz: Vec<f64>, psd_per_hz: Vec<f64>) -> Result<Self> {
        if freq_hz.len() != psd_per_hz.len() || freq_hz.len() < 2 {
            return Err(Error::TimeSeries("spectrum needs >= 2 (freq, psd) pairs".into()));
        }
        if freq_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::TimeSeries("spectrum frequencies must increase".into()));
        }
        if psd_per_hz.iter().any(|&p| p < 0.0) {
            return Err(Error::TimeSeries("PSD must be non-negative".into()));
        }
        Ok(Self { freq_hz, psd_per_hz })
    }

    /// Flat spectrum at `level` V²/Hz over [0, `max_hz`].
    pub fn white(level: f64, max_hz: f64) -> Self {
        Self { freq_hz: vec![0.0, max_hz], psd_per_hz: vec![level, level] }
    }

    /// The spectra↔timeseries boundary: converts a composed noise spectrum
    /// (per rad/s on an angular grid) to per-Hz versus Hz.
    pub fn from_noise_spectrum(spectrum: &NoiseSpectrum) -> Self {
        let freq_hz =
            spectrum.omega.iter().map(|w| w / (2.0 * std::f64::consts::PI)).collect();
        let psd_per_hz =
            spectrum.psd_total.iter().map(|&s| per_rad_to_per_hz(s)).collect();
        Self { freq_hz, psd_per_hz }
    }

    pub fn value_at(&self, f: f64) -> f64 {
        if f < self.freq_hz[0] || f > *self.freq_hz.last().unwrap() {
            return 0.0;
        }
        let i = match self.freq_hz.binary_search_by(|x| x.partial_cmp(&f).unwrap()) {
            Ok(i) => return self.psd_per_hz[i],
            Err(i) => i,
        };
        let (f0, f1) = (self.freq_hz[i - 1], self.freq_hz[i]);
        let t = (f - f0) / (f1 - f0);
        self.psd_per_hz[i - 1] * (1.0 - t) + self.psd_per_hz[i] * t
    }
}

/// Injected axion-like signal: a carrier whose amplitude and phase are
/// re-drawn every coherence time (Rayleigh amplitude when stochastic).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Injection {
    /// Voltage amplitude at the amplifier input, V (mean-square-equivalent
    /// when stochastic).
    pub amplitude: f64,
    pub carrier_hz: f64,
    pub coherence_time: f64,
    pub stochastic: bool,
}

/// Deterministic bias carrier (experimenter-applied tipping pulse train).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PulseBias {
    pub amplitude: f64,
    pub carrier_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub sample_rate: f64,
    pub duration: f64,
    pub seed: u64,
    pub spectrum: TargetSpectrum,
    pub injection: Option<Injection>,
    pub pulse_bias: Option<PulseBias>,
    /// Synthesis block length in samples (power of two).
    pub block_samples: usize,
}

impl SynthesisConfig {
    pub fn new(sample_rate: f64, duration: f64, seed: u64, spectrum: TargetSpectrum) -> Self {
        Self {
            sample_rate,
            duration,
            seed,
            spectrum,
            injection: None,
            pulse_bias: None,
            block_samples: 1 << 16,
        }
    }
}

/// A synthesized record plus its generation truth.
#[derive(Debug, Clone)]
pub struct TimeSeriesRun {
    pub sample_rate: f64,
    pub seed: u64,
    /// Total record: noise + injection + bias.
    pub samples: Vec<f64>,
    /// Injected-signal component, when an injection was configured.
    pub injected_truth: Option<Vec<f64>>,
    /// Bias-carrier component, when configured.
    pub bias_truth: Option<Vec<f64>>,
}

fn synthesize_block(
    cfg: &SynthesisConfig,
    fft: &Arc<dyn Fft<f64>>,
    block_index: usize,
) -> Vec<f64> {
    let n = cfg.block_samples;
    let fs = cfg.sample_rate;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block_index as u64);

    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    // E|X_k|^2 = S(f_k)·fs·N/2 makes the periodogram estimate S
    for k in 1..n / 2 {
        let f = k as f64 * fs / n as f64;
        let sigma = (cfg.spectrum.value_at(f) * fs * n as f64 / 4.0).sqrt();
        let g1: f64 = StandardNormal.sample(&mut rng);
        let g2: f64 = StandardNormal.sample(&mut rng);
        bins[k] = Complex64::new(sigma * g1, sigma * g2);
        bins[n - k] = bins[k].conj();
    }
    let g: f64 = StandardNormal.sample(&mut rng);
    let nyq = (cfg.spectrum.value_at(fs / 2.0) * fs * n as f64 / 2.0).sqrt();
    bins[n / 2] = Complex64::new(nyq * g, 0.0);

    fft.process(&mut bins);
    bins.iter().map(|c| c.re / n as f64).collect()
}

/// Synthesizes the record described by `cfg`. Bit-identical for identical
/// (seed, config).
pub fn synthesize(cfg: &SynthesisConfig) -> Result<TimeSeriesRun> {
    if cfg.sample_rate <= 0.0 || cfg.duration <= 0.0 {
        return Err(Error::TimeSeries("sample_rate and duration must be positive".into()));
    }
    if !cfg.block_samples.is_power_of_two() || cfg.block_samples < 16 {
        return Err(Error::TimeSeries("block_samples must be a power of two >= 16".into()));
    }
    let nyquist = cfg.sample_rate / 2.0;
    for (name, carrier) in [
        ("injection", cfg.injection.map(|i| i.carrier_hz)),
        ("pulse bias", cfg.pulse_bias.map(|b| b.carrier_hz)),
    ] {
        if let Some(f) = carrier {
            if f >= nyquist {
                return Err(Error::TimeSeries(format!(
                    "{name} carrier {f} Hz aliases: it must be below the Nyquist \
                     frequency {nyquist} Hz"
                )));
            }
        }
    }
    let n_total = (cfg.duration * cfg.sample_rate).round() as usize;
    if n_total == 0 {
        return Err(Error::TimeSeries("record would be empty".into()));
    }
    let n_blocks = n_total.div_ceil(cfg.block_samples);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(cfg.block_samples);
    let blocks: Vec<Vec<f64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| synthesize_block(cfg, &fft, b))
        .collect();
    let mut samples: Vec<f64> = blocks.into_iter().flatten().take(n_total).collect();

    let injected_truth = cfg.injection.map(|inj| {
        // separate deterministic stream for the coherence-segment draws
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::MAX - 1);
        let seg_len = ((inj.coherence_time * cfg.sample_rate).round() as usize).max(1);
        let mut truth = Vec::with_capacity(n_total);
        let w = 2.0 * std::f64::consts::PI * inj.carrier_hz / cfg.sample_rate;
        let mut seg_amp = 0.0;
        let mut seg_phase = 0.0;
        for i in 0..n_total {
            if i % seg_len == 0 {
                seg_phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                seg_amp = if inj.stochastic {
                    // Rayleigh with mean square = amplitude², by inversion
                    let sigma = inj.amplitude / 2f64.sqrt();
                    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                    sigma * (-2.0 * u.ln()).sqrt()
                } else {
                    inj.amplitude
                };
            }
            truth.push(seg_amp * (w * i as f64 + seg_phase).cos());
        }
        truth
    });
    if let Some(truth) = &injected_truth {
        for (s, t) in samples.iter_mut().zip(truth) {
            *s += t;
        }
    }

    let bias_truth = cfg.pulse_bias.map(|bias| {
        let w = 2.0 * std::f64::consts::PI * bias.carrier_hz / cfg.sample_rate;
        (0..n_total).map(|i| bias.amplitude * (w * i as f64).cos()).collect::<Vec<f64>>()
    });
    if let Some(truth) = &bias_truth {
        for (s, t) in samples.iter_mut().zip(truth) {
            *s += t;
        }
    }

    Ok(TimeSeriesRun {
        sample_rate: cfg.sample_rate,
        seed: cfg.seed,
        samples,
        injected_truth,
        bias_truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spectrum_gives_zero_record() {
        let cfg = SynthesisConfig::new(1e4, 0.5, 7, TargetSpectrum::white(0.0, 5e3));
        let run = synthesize(&cfg).unwrap();
        assert_eq!(run.samples.len(), 5000);
        assert!(run.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn white_noise_variance_matches_parseval() {
        // sample variance = S0 * (Nyquist bandwidth), chi-squared spread
        let s0 = 4e-6;
        let fs = 2e4;
        let mut total = 0.0;
        let mut total_sq = 0.0;
        let seeds = 100;
        let n_per = 16384usize;
        for seed in 0..seeds {
            let mut cfg = SynthesisConfig::new(
                fs,
                n_per as f64 / fs,
                seed,
                TargetSpectrum::white(s0, fs / 2.0),
            );
            cfg.block_samples = n_per;
            let run = synthesize(&cfg).unwrap();
            let var = run.samples.iter().map(|x| x * x).sum::<f64>() / n_per as f64;
            total += var;
            total_sq += var * var;
        }
        let mean = total / seeds as f64;
        let expected = s0 * fs / 2.0;
        let spread = ((total_sq / seeds as f64 - mean * mean) / seeds as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * spread.max(1e-9 * expected),
            "mean {mean:.6e} vs {expected:.6e} (sigma {spread:.2e})"
        );
    }

    #[test]
    fn deterministic_from_seed() {
        let mut cfg = SynthesisConfig::new(1e4, 1.0, 99, TargetSpectrum::white(1e-6, 5e3));
        cfg.injection = Some(Injection {
            amplitude: 1e-3,
            carrier_hz: 1.5e3,
            coherence_time: 0.01,
            stochastic: true,
        });
        let a = synthesize(&cfg).unwrap();
        let b = synthesize(&cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.injected_truth, b.injected_truth);
    }

    #[test]
    fn aliasing_carrier_rejected() {
        let mut cfg = SynthesisConfig::new(1e4, 1.0, 1, TargetSpectrum::white(1e-6, 5e3));
        cfg.injection = Some(Injection {
            amplitude: 1.0,
            carrier_hz: 6e3,
            coherence_time: 1.0,
            stochastic: false,
        });
        let err = synthesize(&cfg).unwrap_err();
        assert!(err.to_string().contains("alias"));
    }

    #[test]
    fn stochastic_amplitude_has_configured_mean_square() {
        let mut cfg = SynthesisConfig::new(1e4, 20.0, 5, TargetSpectrum::white(0.0, 5e3));
        cfg.injection = Some(Injection {
            amplitude: 2e-3,
            carrier_hz: 1e3,
            coherence_time: 0.02,
            stochastic: true,
        });
        let run = synthesize(&cfg).unwrap();
        let truth = run.injected_truth.unwrap();
        let ms = truth.iter().map(|x| x * x).sum::<f64>() / truth.len() as f64;
        // <A² cos²> = amplitude²/2; a thousand coherence segments average well
        let expected = 2e-3f64.powi(2) / 2.0;
        assert!((ms / expected - 1.0).abs() < 0.15, "ms {ms:.3e} vs {expected:.3e}");
    }
}
