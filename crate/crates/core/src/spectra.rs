//! Composition of the full noise PSD at the amplifier input from the three
//! sources (spin projection, circuit Nyquist, amplifier), and the
//! spin-noise-limited design conditions.
//!
//! The spin-projection and circuit Nyquist sources sit in series with the
//! coil, so both see the spin-loaded coil transfer; the amplifier sources
//! combine over the spin-loaded probe impedance. The spin ensemble therefore
//! reshapes all three contributions, which is what produces absorbed-circuit-
//! noise dips for cold spins — no dedicated ACN term is added.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circuit::{amplifier_noise_psd, coil_transfer, probe_impedance, ProbeCircuit};
use crate::constants::{HBAR, KB, MU0};
use crate::error::Result;
use crate::grid::validate_grid;
use crate::spins::{
    loaded_state, polarization_guard, spin_impedance, spin_noise_psd, EnsembleState, SpinEnsemble,
};
use crate::units::per_rad_to_per_hz;

/// Full parameter echo carried by every spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub ensemble: SpinEnsemble,
    pub probe: ProbeCircuit,
    pub b0: f64,
    pub suppression: f64,
    pub state: EnsembleState,
    pub polarization_warning: Option<String>,
}

/// Per-source and total noise PSD at the amplifier input, V²·s/rad.
#[derive(Debug, Clone)]
pub struct NoiseSpectrum {
    /// Angular frequency grid, rad/s.
    pub omega: Vec<f64>,
    pub psd_spin: Vec<f64>,
    pub psd_circuit: Vec<f64>,
    pub psd_amplifier: Vec<f64>,
    pub psd_total: Vec<f64>,
    pub metadata: SpectrumMetadata,
}

/// Composes the three-source noise spectrum on `grid`.
///
/// The grid must bracket ω0 and ωc and resolve the narrowest linewidth with
/// at least 20 points; build one with [`crate::grid::composite_grid`].
pub fn compose_spectrum(
    ens: &SpinEnsemble,
    pc: &ProbeCircuit,
    b0: f64,
    suppression: f64,
    grid: &[f64],
) -> Result<NoiseSpectrum> {
    let qc = pc.quality_factor(pc.omega_c);
    let state = loaded_state(ens, b0, qc, suppression)?;
    validate_grid(
        grid,
        state.omega0,
        1.0 / state.t2_star,
        pc.omega_c,
        pc.omega_c / qc,
    )?;

    let q = ens.filling_factor;
    let n = grid.len();
    let mut psd_spin = Vec::with_capacity(n);
    let mut psd_circuit = Vec::with_capacity(n);
    let mut psd_amplifier = Vec::with_capacity(n);
    let mut psd_total = Vec::with_capacity(n);
    let circuit_source = 2.0 * pc.coil_r * KB * pc.theta_c / std::f64::consts::PI;
    for &w in grid {
        let spin = spin_impedance(&state, pc.coil_l, q, w);
        let h2 = coil_transfer(pc, spin, w).norm_sqr();
        let zp = probe_impedance(pc, spin, w);
        let s_spin = spin_noise_psd(&state, ens, pc.coil_l, w) * h2;
        let s_circ = circuit_source * h2;
        let s_amp = amplifier_noise_psd(pc.amp_r, pc.theta_a, zp);
        psd_spin.push(s_spin);
        psd_circuit.push(s_circ);
        psd_amplifier.push(s_amp);
        psd_total.push(s_spin + s_circ + s_amp);
    }

    Ok(NoiseSpectrum {
        omega: grid.to_vec(),
        psd_spin,
        psd_circuit,
        psd_amplifier,
        psd_total,
        metadata: SpectrumMetadata {
            ensemble: *ens,
            probe: *pc,
            b0,
            suppression,
            state,
            polarization_warning: polarization_guard(ens, b0),
        },
    })
}

/// Default composite grid for a configuration.
pub fn default_grid(ens: &SpinEnsemble, pc: &ProbeCircuit, b0: f64, suppression: f64) -> Result<Vec<f64>> {
    let qc = pc.quality_factor(pc.omega_c);
    let state = loaded_state(ens, b0, qc, suppression)?;
    Ok(crate::grid::composite_grid(
        state.omega0,
        1.0 / state.t2_star,
        pc.omega_c,
        pc.omega_c / qc,
    ))
}

/// Outcome of the noiseless-amplifier design condition:
/// circuit Nyquist noise below the spin-projection noise requires
/// kBθc < (q/4)·Qc·μ0·ħ²γ²·n·ω0·T2*.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiselessAmpCondition {
    /// kBθc, J.
    pub lhs: f64,
    /// (q/4)·Qc·μ0·ħ²γ²·n·ω0·T2*, J.
    pub rhs: f64,
    pub satisfied: bool,
}

pub fn noiseless_amp_condition(
    ens: &SpinEnsemble,
    pc: &ProbeCircuit,
    b0: f64,
    suppression: f64,
) -> Result<NoiselessAmpCondition> {
    let qc = pc.quality_factor(pc.omega_c);
    let state = loaded_state(ens, b0, qc, suppression)?;
    let lhs = KB * pc.theta_c;
    let rhs = (ens.filling_factor / 4.0)
        * qc
        * MU0
        * HBAR.powi(2)
        * ens.gamma.powi(2)
        * ens.density
        * state.omega0
        * state.t2_star;
    Ok(NoiselessAmpCondition { lhs, rhs, satisfied: lhs < rhs })
}

/// Amplifier input noise level required to reach the spin-projection limit:
/// Qc·Ra·(q/2π)·μ0·ħ²γ²·n·ω0·T2*, V²·s/rad.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplifierNoiseRequirement {
    pub threshold: f64,
    /// Present when Rs(ω0) is not small against Rc, where the underlying
    /// small-spin-impedance approximation degrades.
    pub small_impedance_warning: Option<String>,
}

pub fn amplifier_noise_requirement(
    ens: &SpinEnsemble,
    pc: &ProbeCircuit,
    b0: f64,
    suppression: f64,
) -> Result<AmplifierNoiseRequirement> {
    let qc = pc.quality_factor(pc.omega_c);
    let state = loaded_state(ens, b0, qc, suppression)?;
    let threshold = qc
        * pc.amp_r
        * (ens.filling_factor / (2.0 * std::f64::consts::PI))
        * MU0
        * HBAR.powi(2)
        * ens.gamma.powi(2)
        * ens.density
        * state.omega0
        * state.t2_star;
    let rs0 = spin_impedance(&state, pc.coil_l, ens.filling_factor, state.omega0).rs;
    let small_impedance_warning = (rs0 >= 0.1 * pc.coil_r).then(|| {
        format!(
            "Rs(omega0) = {rs0:.3e} ohm is not small against Rc = {:.3e} ohm; \
             the small-spin-impedance formula is approximate here",
            pc.coil_r
        )
    });
    Ok(AmplifierNoiseRequirement { threshold, small_impedance_warning })
}

/// A spectral feature located by [`measure_peak`].
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
    /// Full width at half maximum from interpolated half crossings, rad/s.
    pub fwhm: f64,
}

/// Finds the maximum of `psd` within [lo, hi] and measures its FWHM by
/// linear interpolation of the half-maximum crossings (baseline zero).
pub fn measure_peak(omega: &[f64], psd: &[f64], lo: f64, hi: f64) -> Option<Peak> {
    let idx: Vec<usize> =
        (0..omega.len()).filter(|&i| omega[i] >= lo && omega[i] <= hi).collect();
    if idx.len() < 5 {
        return None;
    }
    let &imax = idx.iter().max_by(|&&a, &&b| psd[a].partial_cmp(&psd[b]).unwrap())?;
    let height = psd[imax];
    if height <= 0.0 {
        return None;
    }
    let half = height / 2.0;
    // walk left and right to the half crossings
    let mut left = None;
    let mut i = imax;
    while i > 0 {
        if psd[i - 1] < half && psd[i] >= half {
            let t = (half - psd[i - 1]) / (psd[i] - psd[i - 1]);
            left = Some(omega[i - 1] + t * (omega[i] - omega[i - 1]));
            break;
        }
        i -= 1;
    }
    let mut right = None;
    let mut i = imax;
    while i + 1 < omega.len() {
        if psd[i + 1] < half && psd[i] >= half {
            let t = (psd[i] - half) / (psd[i] - psd[i + 1]);
            right = Some(omega[i] + t * (omega[i + 1] - omega[i]));
            break;
        }
        i += 1;
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(Peak { omega: omega[imax], height, fwhm: r - l }),
        _ => Some(Peak { omega: omega[imax], height, fwhm: f64::NAN }),
    }
}

/// Writes the spectrum as CSV: omega_rad_s, f_Hz, psd_spin, psd_circuit,
/// psd_amp, psd_total (scientific notation, 9 significant digits).
pub fn write_csv<W: Write>(spectrum: &NoiseSpectrum, mut out: W) -> std::io::Result<()> {
    writeln!(out, "omega_rad_s,f_Hz,psd_spin,psd_circuit,psd_amp,psd_total")?;
    for i in 0..spectrum.omega.len() {
        let w = spectrum.omega[i];
        writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
            w,
            w / (2.0 * std::f64::consts::PI),
            spectrum.psd_spin[i],
            spectrum.psd_circuit[i],
            spectrum.psd_amplifier[i],
            spectrum.psd_total[i],
        )?;
    }
    Ok(())
}

/// Integrates a PSD column over the grid (trapezoid), V².
pub fn integrate(omega: &[f64], psd: &[f64]) -> f64 {
    omega
        .windows(2)
        .zip(psd.windows(2))
        .map(|(w, p)| 0.5 * (p[0] + p[1]) * (w[1] - w[0]))
        .sum()
}

/// Coil-referred spin-noise area ∫Ṽs²(ω)dω over `grid`, V².
///
/// This is the quantity that hyperpolarization leaves unchanged: back-action
/// broadening trades peak height for width at constant area.
pub fn spin_noise_area(
    ens: &SpinEnsemble,
    pc: &ProbeCircuit,
    b0: f64,
    suppression: f64,
    grid: &[f64],
) -> Result<f64> {
    let qc = pc.quality_factor(pc.omega_c);
    let state = loaded_state(ens, b0, qc, suppression)?;
    let psd: Vec<f64> =
        grid.iter().map(|&w| spin_noise_psd(&state, ens, pc.coil_l, w)).collect();
    Ok(integrate(grid, &psd))
}

/// Converts one PSD column to per-Hz units for display.
pub fn column_per_hz(psd_per_rad: &[f64]) -> Vec<f64> {
    psd_per_rad.iter().map(|&s| per_rad_to_per_hz(s)).collect()
}
