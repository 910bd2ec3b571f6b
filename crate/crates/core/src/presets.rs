//! Canonical parameter sets: the four noise-budget scenarios (a 100 MHz
//! proton sample read out by a tuned room-temperature probe, at four
//! spin/amplifier temperature combinations) and the two axion-search
//! benchmarks (a ferroelectric ²⁰⁷Pb EDM search and a proton gradient
//! search, both 10 cm samples).

use std::f64::consts::PI;

use crate::circuit::ProbeCircuit;
use crate::constants::{PB207_GAMMA, PROTON_GAMMA};
use crate::sensitivity::{AxionSearchConfig, Coupling, SampleGeometry};
use crate::spins::{Polarization, SpinEnsemble};

/// A complete spectrum scenario: ensemble, tuned probe, bias field,
/// back-action suppression.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumPreset {
    pub ensemble: SpinEnsemble,
    pub probe: ProbeCircuit,
    pub b0: f64,
    pub suppression: f64,
}

fn noise_budget_preset(theta_s: f64, theta_a: f64) -> SpectrumPreset {
    let omega_c = 2.0 * PI * 100e6;
    let coil_l = 1e-7;
    // 1 ppm linewidth in the no-back-action limit: all of it inhomogeneous
    let ensemble = SpinEnsemble::new(
        PROTON_GAMMA,
        0.5,
        1e29,
        Polarization::Thermal { theta_s },
        1e9,
        1e-6,
        0.5,
    )
    .unwrap();
    let probe = ProbeCircuit::tuned(
        coil_l,
        omega_c * coil_l / 1e3, // Qc = 1e3
        4,
        PI * 0.005 * 0.005, // 1 cm diameter
        0.01,               // 1 cm length
        omega_c,
        50.0,
        300.0,
        theta_a,
    )
    .unwrap();
    SpectrumPreset {
        ensemble,
        probe,
        b0: 2.0 * PI * 100.1e6 / PROTON_GAMMA,
        suppression: 1.0,
    }
}

/// Noiseless amplifier: θa = 0, θc = θs = 300 K.
pub fn fig2a() -> SpectrumPreset {
    noise_budget_preset(300.0, 0.0)
}

/// Thermal equilibrium: θa = θc = θs = 300 K.
pub fn fig2b() -> SpectrumPreset {
    noise_budget_preset(300.0, 300.0)
}

/// Hyperpolarized, moderate back-action: θs = 3 K.
pub fn fig2c() -> SpectrumPreset {
    noise_budget_preset(3.0, 300.0)
}

/// Hyperpolarized, radiation damping dominates the linewidth: θs = 0.03 K.
pub fn fig2d() -> SpectrumPreset {
    noise_budget_preset(0.03, 300.0)
}

/// EDM search benchmark: ²⁰⁷Pb in ferroelectric PMN-PT, E* = 340 kV/cm,
/// T2 = 16.7 ms, 2000 ppm chemical-shift anisotropy, r = 10 cm, full
/// polarization, Qc = 1e3, 30 min per point.
///
/// The ²⁰⁷Pb number density is natural-abundance lead in PMN-PT
/// (ρ ≈ 8.1 g/cm³, one Pb per formula unit, 22.1 % abundance).
pub fn fig4a() -> AxionSearchConfig {
    AxionSearchConfig {
        coupling: Coupling::Edm,
        mass_grid: log_mass_grid(1e-12, 7e-7, 200),
        rho_dm_gev_cm3: 0.4,
        axion_quality: 1e6,
        tau_m: 1800.0,
        ensemble: SpinEnsemble::new(
            PB207_GAMMA,
            0.5,
            3.3e27,
            Polarization::Saturated,
            0.0167,
            2000e-6,
            1.0,
        )
        .unwrap(),
        geometry: SampleGeometry { radius: 0.1 },
        e_star: Some(3.4e7),
        qc: 1e3,
        suppression: 1.0,
        b0_max: 20.0,
    }
}

/// Gradient search benchmark: protons at n = 1e29 m⁻³, T2 = 1 s, 2 ppm
/// broadening, r = 10 cm, full polarization, Qc = 1e3, 30 min per point.
pub fn fig4b() -> AxionSearchConfig {
    AxionSearchConfig {
        coupling: Coupling::Gradient,
        mass_grid: log_mass_grid(1e-12, 3.5e-6, 200),
        rho_dm_gev_cm3: 0.4,
        axion_quality: 1e6,
        tau_m: 1800.0,
        ensemble: SpinEnsemble::new(
            PROTON_GAMMA,
            0.5,
            1e29,
            Polarization::Saturated,
            1.0,
            2e-6,
            1.0,
        )
        .unwrap(),
        geometry: SampleGeometry { radius: 0.1 },
        e_star: None,
        qc: 1e3,
        suppression: 1.0,
        b0_max: 20.0,
    }
}

/// Log-spaced mass grid, eV.
pub fn log_mass_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
