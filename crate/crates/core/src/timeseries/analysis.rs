//! Block-FFT averaging and lineshape-filtered candidate search.
//!
//! The record is cut into overlap-free blocks of duration τb, each block's
//! one-sided periodogram is averaged (so the averaged PSD is chi-squared with
//! 2·nBlocks degrees of freedom per bin), the average is convolved with the
//! expected signal lineshape, and bins whose standardized statistic exceeds
//! the threshold become candidates.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Rectangular,
    Hann,
}

/// Expected signal lineshape for the matched filter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Lineshape {
    /// Single-bin line (kernel is a delta).
    Delta,
    /// Lorentzian of the given FWHM; the stand-in for a dark-matter line of
    /// width ν/Q_a.
    Lorentzian { fwhm_hz: f64 },
}

impl Lineshape {
    /// Normalized convolution kernel on bins of width `bin_hz`, truncated at
    /// ±5 FWHM.
    pub fn kernel(&self, bin_hz: f64) -> Vec<f64> {
        match self {
            Lineshape::Delta => vec![1.0],
            Lineshape::Lorentzian { fwhm_hz } => {
                let half_bins = ((5.0 * fwhm_hz / bin_hz).ceil() as usize).max(1);
                let hwhm = fwhm_hz / 2.0;
                let mut kernel: Vec<f64> = (-(half_bins as isize)..=half_bins as isize)
                    .map(|i| {
                        let f = i as f64 * bin_hz;
                        1.0 / (1.0 + (f / hwhm).powi(2))
                    })
                    .collect();
                let sum: f64 = kernel.iter().sum();
                for k in &mut kernel {
                    *k /= sum;
                }
                kernel
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Block duration τb, s.
    pub block_duration: f64,
    pub window: WindowKind,
    pub lineshape: Lineshape,
    /// Candidate threshold in standard deviations of the off-signal
    /// statistic distribution.
    pub threshold_sigma: f64,
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    /// One-sided bin frequencies, Hz.
    pub freq_hz: Vec<f64>,
    /// Block-averaged one-sided PSD, V²/Hz.
    pub averaged_psd: Vec<f64>,
    pub n_blocks: usize,
    /// Standardized matched-filter statistic per bin.
    pub statistic: Vec<f64>,
    /// (bin index, statistic) above threshold.
    pub candidates: Vec<(usize, f64)>,
    pub threshold_sigma: f64,
}

fn periodogram(
    block: &[f64],
    window: &[f64],
    fft: &Arc<dyn Fft<f64>>,
    sample_rate: f64,
) -> Vec<f64> {
    let n = block.len();
    let mut buf: Vec<Complex64> = block
        .iter()
        .zip(window)
        .map(|(&x, &w)| Complex64::new(x * w, 0.0))
        .collect();
    fft.process(&mut buf);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let scale = 1.0 / (sample_rate * window_power);
    (0..=n / 2)
        .map(|k| {
            let one_sided = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            one_sided * buf[k].norm_sqr() * scale
        })
        .collect()
}

/// Runs the block-average + matched-filter pipeline on `samples`.
pub fn analyze(
    samples: &[f64],
    sample_rate: f64,
    cfg: &AnalysisConfig,
) -> Result<AnalysisResult> {
    let duration = samples.len() as f64 / sample_rate;
    if cfg.block_duration > duration {
        return Err(Error::TimeSeries(format!(
            "block duration {} s exceeds record duration {duration} s",
            cfg.block_duration
        )));
    }
    if cfg.block_duration <= 0.0 {
        return Err(Error::TimeSeries("block duration must be positive".into()));
    }
    let block_len = (cfg.block_duration * sample_rate).round() as usize;
    if block_len < 8 {
        return Err(Error::TimeSeries("block too short (< 8 samples)".into()));
    }
    let n_blocks = samples.len() / block_len;
    if n_blocks == 0 {
        return Err(Error::TimeSeries("record shorter than one block".into()));
    }

    let window: Vec<f64> = match cfg.window {
        WindowKind::Rectangular => vec![1.0; block_len],
        WindowKind::Hann => (0..block_len)
            .map(|i| {
                let x = std::f64::consts::PI * i as f64 / block_len as f64;
                x.sin().powi(2)
            })
            .collect(),
    };
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(block_len);

    let partials: Vec<Vec<f64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            periodogram(&samples[b * block_len..(b + 1) * block_len], &window, &fft, sample_rate)
        })
        .collect();
    let n_bins = block_len / 2 + 1;
    let mut averaged = vec![0.0; n_bins];
    for p in &partials {
        for (a, v) in averaged.iter_mut().zip(p) {
            *a += v;
        }
    }
    for a in &mut averaged {
        *a /= n_blocks as f64;
    }

    let bin_hz = sample_rate / block_len as f64;
    let freq_hz: Vec<f64> = (0..n_bins).map(|k| k as f64 * bin_hz).collect();

    // matched filter: convolve with the normalized lineshape, renormalizing
    // at the edges where the kernel is truncated
    let kernel = cfg.lineshape.kernel(bin_hz);
    let half = kernel.len() / 2;
    let filtered: Vec<f64> = (0..n_bins)
        .map(|i| {
            let mut acc = 0.0;
            let mut weight = 0.0;
            for (j, &k) in kernel.iter().enumerate() {
                let idx = i as isize + j as isize - half as isize;
                if idx >= 0 && (idx as usize) < n_bins {
                    acc += k * averaged[idx as usize];
                    weight += k;
                }
            }
            acc / weight
        })
        .collect();

    // off-signal moments by sigma-clipping (two passes at 4 sigma)
    let interior = &filtered[1..n_bins - 1];
    let (mut mean, mut std) = mean_std(interior.iter().copied());
    for _ in 0..2 {
        let clipped = interior
            .iter()
            .copied()
            .filter(|v| (v - mean).abs() <= 4.0 * std);
        let (m, s) = mean_std(clipped);
        mean = m;
        std = s;
    }
    if std <= 0.0 {
        std = f64::MIN_POSITIVE;
    }

    let statistic: Vec<f64> = filtered.iter().map(|&v| (v - mean) / std).collect();
    let candidates: Vec<(usize, f64)> = (1..n_bins - 1)
        .filter(|&i| statistic[i] > cfg.threshold_sigma)
        .map(|i| (i, statistic[i]))
        .collect();

    Ok(AnalysisResult {
        freq_hz,
        averaged_psd: averaged,
        n_blocks,
        statistic,
        candidates,
        threshold_sigma: cfg.threshold_sigma,
    })
}

fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    if n < 2 {
        (mean, 0.0)
    } else {
        (mean, (m2 / (n - 1) as f64).sqrt())
    }
}

/// CSV: freq_Hz, psd_avg, statistic, is_candidate.
pub fn write_csv<W: Write>(result: &AnalysisResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "freq_Hz,psd_avg,statistic,is_candidate")?;
    let mut flags = vec![false; result.freq_hz.len()];
    for (i, _) in &result.candidates {
        flags[*i] = true;
    }
    for i in 0..result.freq_hz.len() {
        writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{}",
            result.freq_hz[i], result.averaged_psd[i], result.statistic[i], flags[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::synth::{synthesize, Injection, SynthesisConfig, TargetSpectrum};

    fn white_cfg(seed: u64, duration: f64) -> SynthesisConfig {
        let mut cfg =
            SynthesisConfig::new(1e4, duration, seed, TargetSpectrum::white(1e-6, 5e3));
        cfg.block_samples = 4096;
        cfg
    }

    #[test]
    fn block_duration_must_fit() {
        let run = synthesize(&white_cfg(1, 1.0)).unwrap();
        let cfg = AnalysisConfig {
            block_duration: 2.0,
            window: WindowKind::Rectangular,
            lineshape: Lineshape::Delta,
            threshold_sigma: 5.0,
        };
        assert!(analyze(&run.samples, 1e4, &cfg).is_err());
    }

    #[test]
    fn pure_tone_concentrates_power() {
        // deterministic carrier with no noise: >= 99% of total power within
        // +-2 bins of the carrier
        let mut cfg = white_cfg(3, 2.0);
        cfg.spectrum = TargetSpectrum::white(0.0, 5e3);
        cfg.injection = Some(Injection {
            amplitude: 1e-3,
            carrier_hz: 1221.0,
            coherence_time: 1e9,
            stochastic: false,
        });
        let run = synthesize(&cfg).unwrap();
        let acfg = AnalysisConfig {
            block_duration: 0.4096,
            window: WindowKind::Rectangular,
            lineshape: Lineshape::Delta,
            threshold_sigma: 5.0,
        };
        let res = analyze(&run.samples, 1e4, &acfg).unwrap();
        let total: f64 = res.averaged_psd.iter().sum();
        let peak_bin = res
            .averaged_psd
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let bin_hz = res.freq_hz[1] - res.freq_hz[0];
        assert!((res.freq_hz[peak_bin] - 1221.0).abs() <= 2.0 * bin_hz);
        let near: f64 = res.averaged_psd
            [peak_bin.saturating_sub(2)..(peak_bin + 3).min(res.averaged_psd.len())]
            .iter()
            .sum();
        assert!(near / total >= 0.99, "fraction {:.4}", near / total);
    }

    #[test]
    fn averaging_reduces_scatter_as_root_two() {
        // doubling the number of blocks shrinks the off-signal std by sqrt(2)
        let fs = 1e4;
        let run = synthesize(&white_cfg(11, 160.0)).unwrap();
        let std_of = |n_samples: usize| {
            let cfg = AnalysisConfig {
                block_duration: 0.2048,
                window: WindowKind::Rectangular,
                lineshape: Lineshape::Delta,
                threshold_sigma: 1e9,
            };
            let res = analyze(&run.samples[..n_samples], fs, &cfg).unwrap();
            let interior = &res.averaged_psd[1..res.averaged_psd.len() - 1];
            let mean: f64 = interior.iter().sum::<f64>() / interior.len() as f64;
            let var: f64 = interior.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (interior.len() - 1) as f64;
            var.sqrt()
        };
        let half = std_of(run.samples.len() / 2);
        let full = std_of(run.samples.len());
        assert!(
            (half / full - 2f64.sqrt()).abs() < 0.1 * 2f64.sqrt(),
            "ratio {:.3}",
            half / full
        );
    }

    #[test]
    fn injected_line_detected() {
        let mut cfg = white_cfg(21, 80.0);
        cfg.injection = Some(Injection {
            amplitude: 2e-3,
            carrier_hz: 2000.0,
            coherence_time: 2.0,
            stochastic: true,
        });
        let run = synthesize(&cfg).unwrap();
        let acfg = AnalysisConfig {
            block_duration: 4.0,
            window: WindowKind::Rectangular,
            lineshape: Lineshape::Lorentzian { fwhm_hz: 0.5 },
            threshold_sigma: 5.0,
        };
        let res = analyze(&run.samples, 1e4, &acfg).unwrap();
        assert!(!res.candidates.is_empty());
        let bin_hz = res.freq_hz[1] - res.freq_hz[0];
        assert!(res
            .candidates
            .iter()
            .any(|(i, _)| (res.freq_hz[*i] - 2000.0).abs() < 10.0 * bin_hz));
    }

    #[test]
    fn hann_window_also_normalized() {
        let run = synthesize(&white_cfg(31, 40.0)).unwrap();
        let psd_of = |window: WindowKind| {
            let cfg = AnalysisConfig {
                block_duration: 0.4096,
                window,
                lineshape: Lineshape::Delta,
                threshold_sigma: 1e9,
            };
            let res = analyze(&run.samples, 1e4, &cfg).unwrap();
            let inner = &res.averaged_psd[5..res.averaged_psd.len() - 5];
            inner.iter().sum::<f64>() / inner.len() as f64
        };
        let rect = psd_of(WindowKind::Rectangular);
        let hann = psd_of(WindowKind::Hann);
        assert!((rect / hann - 1.0).abs() < 0.05, "rect {rect:.3e} hann {hann:.3e}");
        assert!((rect / 1e-6 - 1.0).abs() < 0.05);
    }
}
