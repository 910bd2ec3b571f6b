//! Nuclear spin ensemble physics: equilibrium magnetization, complex
//! susceptibility, radiation damping, the spin contribution to the pickup-coil
//! impedance, and the spin-projection-noise voltage PSD.
//!
//! Everything here is a pure function of immutable inputs, so evaluation over
//! frequency grids and parameter sweeps is safe to parallelize.
//!
//! Conventions:
//! - PSDs are one-sided, per unit *angular* frequency (V²·s/rad), so white
//!   thermal noise from a resistor R at temperature θ reads 2RkBθ/π.
//! - The fluctuation-dissipation (coth) form is the single internal code path
//!   for the spin noise; the classical 2·Rs·kB·θs/π formula appears only as a
//!   test oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, KB, MU0};
use crate::error::{Error, Result};

/// Spin polarization mode.
///
/// `Thermal` uses the Curie law at spin temperature θs; `Saturated` is the
/// full-polarization limit (θs → 0): M0 = nγħI and the FDT coth factor is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Polarization {
    Thermal { theta_s: f64 },
    Saturated,
}

/// A nuclear spin ensemble and its coupling to the pickup coil.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpinEnsemble {
    /// Gyromagnetic ratio, rad/s/T.
    pub gamma: f64,
    /// Nuclear spin quantum number (positive half-integer).
    pub spin_i: f64,
    /// Spin number density, 1/m³.
    pub density: f64,
    /// Polarization mode (spin temperature or saturated).
    pub polarization: Polarization,
    /// Intrinsic transverse coherence time T2′, s.
    pub t2_intrinsic: f64,
    /// Fractional inhomogeneous linewidth (e.g. 1e-6 for 1 ppm), treated as a
    /// FWHM in angular frequency: Δω = γ·B0·broadening.
    pub inhomogeneous_broadening: f64,
    /// Filling factor q ∈ (0, 1].
    pub filling_factor: f64,
}

impl SpinEnsemble {
    pub fn new(
        gamma: f64,
        spin_i: f64,
        density: f64,
        polarization: Polarization,
        t2_intrinsic: f64,
        inhomogeneous_broadening: f64,
        filling_factor: f64,
    ) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        let twice_i = 2.0 * spin_i;
        if spin_i <= 0.0 || (twice_i - twice_i.round()).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "spin_i must be a positive half-integer, got {spin_i}"
            )));
        }
        if density <= 0.0 {
            return Err(Error::Domain(format!("density must be positive, got {density}")));
        }
        if let Polarization::Thermal { theta_s } = polarization {
            if theta_s <= 0.0 {
                return Err(Error::Domain(format!(
                    "theta_s must be positive (negative spin temperatures are rejected), got {theta_s}"
                )));
            }
        }
        if t2_intrinsic <= 0.0 {
            return Err(Error::Domain(format!(
                "t2_intrinsic must be positive, got {t2_intrinsic}"
            )));
        }
        if inhomogeneous_broadening < 0.0 {
            return Err(Error::Domain(format!(
                "inhomogeneous_broadening must be non-negative, got {inhomogeneous_broadening}"
            )));
        }
        if !(filling_factor > 0.0 && filling_factor <= 1.0) {
            return Err(Error::Domain(format!(
                "filling_factor must be in (0, 1], got {filling_factor}"
            )));
        }
        Ok(Self {
            gamma,
            spin_i,
            density,
            polarization,
            t2_intrinsic,
            inhomogeneous_broadening,
            filling_factor,
        })
    }
}

/// Spin contribution to the coil impedance at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinImpedance {
    /// Spin inductance Ls, H. Changes sign at ω = ω0.
    pub ls: f64,
    /// Spin resistance Rs, Ω. Non-negative for θs > 0.
    pub rs: f64,
    /// Angular frequency this was evaluated at, rad/s.
    pub omega: f64,
}

/// Derived ensemble state in a bias field, loaded by the pickup circuit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnsembleState {
    /// Equilibrium magnetization M0, A/m.
    pub m0: f64,
    /// Larmor angular frequency ω0 = γB0, rad/s.
    pub omega0: f64,
    /// Circuit-loaded transverse coherence time T2*, s.
    pub t2_star: f64,
    /// Intrinsic ⊕ inhomogeneous coherence time T2eff, s (no back-action).
    pub t2_eff: f64,
    /// Radiation damping time T_r, s.
    pub t_radiation: f64,
    /// Static susceptibility χ0 = μ0·M0/B0 (dimensionless).
    pub chi0: f64,
}

/// Small-field spin polarization P = tanh(ħγB0 / 2kBθs) (I = 1/2 convention).
///
/// Returns 1 for a saturated ensemble.
pub fn polarization(ens: &SpinEnsemble, b0: f64) -> f64 {
    match ens.polarization {
        Polarization::Thermal { theta_s } => (HBAR * ens.gamma * b0 / (2.0 * KB * theta_s)).tanh(),
        Polarization::Saturated => 1.0,
    }
}

/// Validity guard for the Curie-law magnetization: warns when the
/// linear-in-1/θs assumption starts to fail (P > 0.1).
pub fn polarization_guard(ens: &SpinEnsemble, b0: f64) -> Option<String> {
    if matches!(ens.polarization, Polarization::Thermal { .. }) {
        let p = polarization(ens, b0);
        if p > 0.1 {
            return Some(format!(
                "spin polarization {p:.3} exceeds 0.1; the Curie-law magnetization \
                 assumes polarization much less than unity"
            ));
        }
    }
    None
}

/// Equilibrium magnetization M0, A/m.
///
/// Thermal: M0 = n ħ² γ² I(I+1) B0 / (3 kB θs). Saturated: M0 = n γ ħ I.
pub fn magnetization(ens: &SpinEnsemble, b0: f64) -> Result<f64> {
    if b0 <= 0.0 {
        return Err(Error::Domain(format!("B0 must be positive, got {b0}")));
    }
    let m0 = match ens.polarization {
        Polarization::Thermal { theta_s } => {
            ens.density * HBAR * HBAR * ens.gamma * ens.gamma * ens.spin_i * (ens.spin_i + 1.0)
                * b0
                / (3.0 * KB * theta_s)
        }
        Polarization::Saturated => ens.density * ens.gamma * HBAR * ens.spin_i,
    };
    Ok(m0)
}

/// Radiation-damping (circuit back-action) rate 1/T_r = ½ q Qc γ μ0 M0, 1/s.
pub fn radiation_damping_rate(ens: &SpinEnsemble, qc: f64, m0: f64) -> Result<f64> {
    if qc <= 0.0 {
        return Err(Error::Domain(format!("Qc must be positive, got {qc}")));
    }
    Ok(0.5 * ens.filling_factor * qc * ens.gamma * MU0 * m0)
}

/// Ensemble state loaded by the circuit.
///
/// Rates add: 1/T2* = 1/T2′ + γB0·broadening/2 + suppression/T_r, with
/// `suppression` ∈ [0, 1] scaling the back-action (0 = feedback-cancelled).
pub fn loaded_state(
    ens: &SpinEnsemble,
    b0: f64,
    qc: f64,
    suppression: f64,
) -> Result<EnsembleState> {
    if !(0.0..=1.0).contains(&suppression) {
        return Err(Error::Domain(format!(
            "suppression must be in [0, 1], got {suppression}"
        )));
    }
    let m0 = magnetization(ens, b0)?;
    let omega0 = ens.gamma * b0;
    let inv_t2_eff =
        1.0 / ens.t2_intrinsic + ens.gamma * b0 * ens.inhomogeneous_broadening / 2.0;
    let inv_t_r = radiation_damping_rate(ens, qc, m0)?;
    let inv_t2_star = inv_t2_eff + suppression * inv_t_r;
    Ok(EnsembleState {
        m0,
        omega0,
        t2_star: 1.0 / inv_t2_star,
        t2_eff: 1.0 / inv_t2_eff,
        t_radiation: 1.0 / inv_t_r,
        chi0: MU0 * m0 / b0,
    })
}

/// Complex transverse susceptibility χ(ω) = χ′ − iχ″.
///
/// χ′ = ½ χ0 ω0 T2* (ω0−ω)T2* / (1+(ω0−ω)²T2*²),
/// χ″ = ½ χ0 ω0 T2* / (1+(ω0−ω)²T2*²).
pub fn susceptibility(state: &EnsembleState, omega: f64) -> Complex64 {
    let detuning = (state.omega0 - omega) * state.t2_star;
    let lorentz = 1.0 / (1.0 + detuning * detuning);
    let peak = 0.5 * state.chi0 * state.omega0 * state.t2_star;
    Complex64::new(peak * detuning * lorentz, -peak * lorentz)
}

/// Spin contribution to the coil impedance: Ls = q Lc χ′, Rs = q ω Lc χ″.
pub fn spin_impedance(
    state: &EnsembleState,
    coil_l: f64,
    filling_factor: f64,
    omega: f64,
) -> SpinImpedance {
    let chi = susceptibility(state, omega);
    SpinImpedance {
        ls: filling_factor * coil_l * chi.re,
        rs: -filling_factor * omega * coil_l * chi.im,
        omega,
    }
}

/// Spin-projection-noise voltage PSD at the coil, V²·s/rad (one-sided,
/// per unit angular frequency).
///
/// Ṽs²(ω) = (2Rs/π)·(ħω/2)·coth(ħω/2kBθs); the coth factor is 1 for a
/// saturated ensemble.
pub fn spin_noise_psd(state: &EnsembleState, ens: &SpinEnsemble, coil_l: f64, omega: f64) -> f64 {
    assert!(omega > 0.0, "spin_noise_psd requires omega > 0");
    let rs = spin_impedance(state, coil_l, ens.filling_factor, omega).rs;
    let quantum = match ens.polarization {
        Polarization::Thermal { theta_s } => {
            let x = HBAR * omega / (2.0 * KB * theta_s);
            (HBAR * omega / 2.0) / x.tanh()
        }
        Polarization::Saturated => HBAR * omega / 2.0,
    };
    (2.0 * rs / std::f64::consts::PI) * quantum
}

/// Pickup coil geometry for voltage-estimate bookkeeping.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoilGeometry {
    /// Number of turns.
    pub turns: u32,
    /// Cross-section area, m².
    pub area: f64,
    /// Coil length, m.
    pub length: f64,
}

/// Standard-quantum-limit estimate of the on-resonance spin-noise amplitude
/// spectral density, V·√s/√rad:
///
/// Ṽs = q ω0 η A μ0 (ħγ/V) √N √T2*, with V = qAl and N = nV.
pub fn sql_voltage_estimate(
    ens: &SpinEnsemble,
    state: &EnsembleState,
    geometry: &CoilGeometry,
) -> f64 {
    let q = ens.filling_factor;
    let volume = q * geometry.area * geometry.length;
    let n_spins = ens.density * volume;
    q * state.omega0
        * f64::from(geometry.turns)
        * geometry.area
        * MU0
        * (HBAR * ens.gamma / volume)
        * n_spins.sqrt()
        * state.t2_star.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PROTON_GAMMA;
    use std::f64::consts::PI;

    fn fig2_ensemble(theta_s: f64) -> SpinEnsemble {
        SpinEnsemble::new(
            PROTON_GAMMA,
            0.5,
            1e29,
            Polarization::Thermal { theta_s },
            1e9,
            1e-6,
            0.5,
        )
        .unwrap()
    }

    fn fig2_b0() -> f64 {
        2.0 * PI * 100.1e6 / PROTON_GAMMA
    }

    #[test]
    fn magnetization_golden_fig2() {
        // hand evaluation of the Curie law, cross-checked against the
        // small-polarization route M0 = n γ ħ P/2 with P = ħγB0/(2kBθs)
        let ens = fig2_ensemble(300.0);
        let b0 = fig2_b0();
        let m0 = magnetization(&ens, b0).unwrap();
        assert!((m0 - 1.129435789668e-2).abs() / 1.129435789668e-2 < 1e-9);

        let p = HBAR * PROTON_GAMMA * b0 / (2.0 * KB * 300.0);
        let m0_alt = ens.density * PROTON_GAMMA * HBAR * p / 2.0;
        assert!((m0 - m0_alt).abs() / m0 < 1e-12);
    }

    #[test]
    fn magnetization_vanishes_at_high_spin_temperature() {
        let ens = fig2_ensemble(1e12);
        let b0 = fig2_b0();
        let m0 = magnetization(&ens, b0).unwrap();
        let asymptote = ens.density
            * HBAR
            * HBAR
            * PROTON_GAMMA.powi(2)
            * 0.75
            * b0
            / (3.0 * KB * 1e12);
        assert!((m0 - asymptote).abs() / asymptote < 1e-10);
        assert!(m0 < 1e-11);
    }

    #[test]
    fn magnetization_linearity() {
        let b0 = fig2_b0();
        let base = magnetization(&fig2_ensemble(300.0), b0).unwrap();
        let mut doubled_n = fig2_ensemble(300.0);
        doubled_n.density *= 2.0;
        assert!((magnetization(&doubled_n, b0).unwrap() - 2.0 * base).abs() / base < 1e-12);
        let halved = magnetization(&fig2_ensemble(600.0), b0).unwrap();
        assert!((halved - base / 2.0).abs() / base < 1e-12);
    }

    #[test]
    fn magnetization_rejects_bad_domain() {
        let ens = fig2_ensemble(300.0);
        assert!(magnetization(&ens, -1.0).is_err());
        assert!(SpinEnsemble::new(
            PROTON_GAMMA,
            0.5,
            1e29,
            Polarization::Thermal { theta_s: -10.0 },
            1.0,
            0.0,
            0.5
        )
        .is_err());
        // spin must be a half-integer
        assert!(
            SpinEnsemble::new(PROTON_GAMMA, 0.7, 1e29, Polarization::Saturated, 1.0, 0.0, 0.5)
                .is_err()
        );
    }

    #[test]
    fn saturated_magnetization() {
        let mut ens = fig2_ensemble(300.0);
        ens.polarization = Polarization::Saturated;
        let m0 = magnetization(&ens, fig2_b0()).unwrap();
        assert!((m0 - ens.density * PROTON_GAMMA * HBAR * 0.5).abs() / m0 < 1e-12);
        assert_eq!(polarization(&ens, fig2_b0()), 1.0);
    }

    #[test]
    fn polarization_guard_triggers() {
        let ens = fig2_ensemble(300.0);
        assert!(polarization_guard(&ens, fig2_b0()).is_none());
        let cold = fig2_ensemble(1e-4);
        assert!(polarization_guard(&cold, fig2_b0()).is_some());
    }

    #[test]
    fn radiation_damping_golden_fig2() {
        // hand evaluation of the back-action rate; at θs = 0.03 K this must
        // exceed the circuit linewidth ωc/Qc (it dominates the resonance width)
        let ens = fig2_ensemble(300.0);
        let b0 = fig2_b0();
        let m0 = magnetization(&ens, b0).unwrap();
        let rate = radiation_damping_rate(&ens, 1e3, m0).unwrap();
        assert!((rate - 9.492294971162e2).abs() / 9.492294971162e2 < 1e-9);

        let cold = fig2_ensemble(0.03);
        let m0_cold = magnetization(&cold, b0).unwrap();
        let rate_cold = radiation_damping_rate(&cold, 1e3, m0_cold).unwrap();
        let circuit_width = 2.0 * PI * 100e6 / 1e3;
        assert!(rate_cold > circuit_width);
    }

    #[test]
    fn radiation_damping_scalings() {
        let ens = fig2_ensemble(300.0);
        let m0 = 1e-2;
        let base = radiation_damping_rate(&ens, 1e3, m0).unwrap();
        assert_eq!(radiation_damping_rate(&ens, 2e3, m0).unwrap(), 2.0 * base);
        assert_eq!(radiation_damping_rate(&ens, 1e3, 2.0 * m0).unwrap(), 2.0 * base);
        let mut q2 = ens;
        q2.filling_factor = 1.0;
        assert!((radiation_damping_rate(&q2, 1e3, m0).unwrap() - 2.0 * base).abs() < 1e-12);
        assert_eq!(radiation_damping_rate(&ens, 1e3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn loaded_state_suppression_zero_and_additivity() {
        let ens = fig2_ensemble(300.0);
        let b0 = fig2_b0();
        let free = loaded_state(&ens, b0, 1e3, 0.0).unwrap();
        assert!((free.t2_star - free.t2_eff).abs() / free.t2_eff < 1e-15);

        let full = loaded_state(&ens, b0, 1e3, 1.0).unwrap();
        let rate_diff = 1.0 / full.t2_star - 1.0 / free.t2_star;
        let inv_tr = 1.0 / full.t_radiation;
        assert!((rate_diff - inv_tr).abs() / inv_tr < 1e-12);
    }

    #[test]
    fn loaded_state_goldens_fig2() {
        let b0 = fig2_b0();
        let s300 = loaded_state(&fig2_ensemble(300.0), b0, 1e3, 1.0).unwrap();
        assert!((s300.t2_star - 7.913252259e-4).abs() / 7.913252259e-4 < 1e-9);
        let s003 = loaded_state(&fig2_ensemble(0.03), b0, 1e3, 1.0).unwrap();
        assert!((s003.t2_star - 1.053451115e-7).abs() / 1.053451115e-7 < 1e-9);
        // chi0 * B0 = mu0 * M0 exactly
        assert!((s300.chi0 * b0 - MU0 * s300.m0).abs() / (MU0 * s300.m0) < 1e-15);
    }

    #[test]
    fn fig4a_back_action_suppression_magnitude() {
        // Pb-207 sample: full back-action vs suppression 1e-4; the suppression
        // that makes T_r comparable to T2eff is around 1e-4
        let pb = SpinEnsemble::new(
            crate::constants::PB207_GAMMA,
            0.5,
            3.3e27,
            Polarization::Saturated,
            0.0167,
            2000e-6,
            1.0,
        )
        .unwrap();
        let b0 = 1e-3; // low field: inhomogeneous broadening negligible
        let full = loaded_state(&pb, b0, 1e3, 1.0).unwrap();
        let fed_back = loaded_state(&pb, b0, 1e3, 1e-4).unwrap();
        assert!(full.t2_star < fed_back.t2_star);
        let required = full.t_radiation / full.t2_eff;
        assert!(required > 1e-5 && required < 1e-3, "required = {required:.3e}");
    }

    #[test]
    fn susceptibility_on_resonance_and_half_width() {
        let ens = fig2_ensemble(300.0);
        let state = loaded_state(&ens, fig2_b0(), 1e3, 1.0).unwrap();
        let w0 = state.omega0;
        let chi = susceptibility(&state, w0);
        assert_eq!(chi.re, 0.0);
        let peak = 0.5 * ens.gamma * MU0 * state.m0 * state.t2_star;
        assert!((-chi.im - peak).abs() / peak < 1e-12);

        // w0 +- 1/T2*: the detuning subtraction rounds at ~1e-10 relative
        for sign in [-1.0, 1.0] {
            let w = w0 + sign / state.t2_star;
            let c = susceptibility(&state, w);
            assert!((c.re.abs() - (-c.im)).abs() / peak < 1e-9);
            assert!((-c.im - peak / 2.0).abs() / peak < 1e-9);
        }
    }

    #[test]
    fn susceptibility_symmetry() {
        let state = loaded_state(&fig2_ensemble(300.0), fig2_b0(), 1e3, 1.0).unwrap();
        for k in 1..40 {
            let delta = k as f64 * 0.37 / state.t2_star;
            let up = susceptibility(&state, state.omega0 + delta);
            let down = susceptibility(&state, state.omega0 - delta);
            assert!((up.im - down.im).abs() / up.im.abs() < 1e-12);
            assert!((up.re + down.re).abs() / up.re.abs().max(1e-300) < 1e-12);
        }
    }

    #[test]
    fn spin_impedance_golden_and_consistency() {
        let ens = fig2_ensemble(300.0);
        // suppression = 0 here: the golden number pins Rs at T2* = T2eff
        let state = loaded_state(&ens, fig2_b0(), 1e3, 0.0).unwrap();
        let z = spin_impedance(&state, 1e-7, ens.filling_factor, state.omega0);
        assert!((z.rs - 1.898458994232e-1).abs() / 1.898458994232e-1 < 1e-9);
        assert_eq!(z.ls, 0.0);

        // Z = Rc + iωLc(1 + qχ) decomposition holds off resonance too
        let rc = 0.0628;
        for detune in [-3.0, -0.4, 0.9, 2.5] {
            let w = state.omega0 + detune / state.t2_star;
            let chi = susceptibility(&state, w);
            let z = spin_impedance(&state, 1e-7, 0.5, w);
            let full = Complex64::new(rc, 0.0)
                + Complex64::i() * w * 1e-7 * (Complex64::new(1.0, 0.0) + 0.5 * chi);
            assert!(((full.re - rc) - z.rs).abs() / z.rs.abs() < 1e-12);
            assert!((full.im - w * (1e-7 + z.ls)).abs() / full.im.abs() < 1e-12);
        }
    }

    #[test]
    fn spin_resistance_area_is_t2_independent() {
        // numeric quadrature of Rs(ω) against the analytic Lorentzian area
        // (q/2) Lc γ μ0 M0 ω0 π, for two very different T2*
        let ens = fig2_ensemble(300.0);
        let b0 = fig2_b0();
        for suppression in [0.0, 1.0] {
            let state = loaded_state(&ens, b0, 1e3, suppression).unwrap();
            let analytic =
                0.25 * 1e-7 * ens.gamma * MU0 * state.m0 * state.omega0 * std::f64::consts::PI;
            let half_width = 1.0 / state.t2_star;
            let n = 2_000_001usize;
            let lo = state.omega0 - 4000.0 * half_width;
            let hi = state.omega0 + 4000.0 * half_width;
            let dw = (hi - lo) / (n - 1) as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let w = lo + i as f64 * dw;
                let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                sum += weight * spin_impedance(&state, 1e-7, 0.5, w).rs;
            }
            let integral = sum * dw;
            // truncation at ±4000 half-widths leaves ~1.6e-4 in the tails
            assert!(
                (integral - analytic).abs() / analytic < 5e-4,
                "suppression {suppression}: {integral:.6e} vs {analytic:.6e}"
            );
        }
    }

    #[test]
    fn spin_noise_classical_reduction() {
        // ħω ≪ kBθs: the coth form reduces to the classical 2·Rs·kB·θs/π
        let ens = fig2_ensemble(300.0);
        let state = loaded_state(&ens, fig2_b0(), 1e3, 1.0).unwrap();
        for detune in [-2.0, 0.0, 1.3] {
            let w = state.omega0 + detune / state.t2_star;
            let psd = spin_noise_psd(&state, &ens, 1e-7, w);
            let rs = spin_impedance(&state, 1e-7, 0.5, w).rs;
            let classical = 2.0 * rs * KB * 300.0 / std::f64::consts::PI;
            assert!((psd / classical - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn spin_noise_peak_independent_of_spin_temperature() {
        // at fixed n and T2*, Ṽs²(ω0) does not depend on θs; both
        // temperatures must sit deep in the classical regime for the 1e-9
        // bar (the coth correction is (ħω/2kBθ)²/3 ≈ 2e-7 already at 3 K)
        let ens_a = fig2_ensemble(300.0);
        let ens_b = fig2_ensemble(100.0);
        let t2 = 1e-4;
        let b0 = fig2_b0();
        let make_state = |ens: &SpinEnsemble, t2: f64| {
            let m0 = magnetization(ens, b0).unwrap();
            EnsembleState {
                m0,
                omega0: ens.gamma * b0,
                t2_star: t2,
                t2_eff: t2,
                t_radiation: f64::INFINITY,
                chi0: MU0 * m0 / b0,
            }
        };
        let sa = make_state(&ens_a, t2);
        let sb = make_state(&ens_b, t2);
        let pa = spin_noise_psd(&sa, &ens_a, 1e-7, sa.omega0);
        let pb = spin_noise_psd(&sb, &ens_b, 1e-7, sb.omega0);
        assert!((pa / pb - 1.0).abs() < 1e-9, "pa={pa:.9e} pb={pb:.9e}");
    }

    #[test]
    fn spin_noise_area_conserved_under_back_action() {
        // integral of Ṽs² with suppression 1 equals suppression 0 within 2%
        let ens = fig2_ensemble(3.0);
        let b0 = fig2_b0();
        let mut areas = [0.0; 2];
        for (k, suppression) in [0.0, 1.0].into_iter().enumerate() {
            let state = loaded_state(&ens, b0, 1e3, suppression).unwrap();
            let half_width = 1.0 / state.t2_star;
            let n = 800_001usize;
            let lo = (state.omega0 - 2000.0 * half_width).max(1.0);
            let hi = state.omega0 + 2000.0 * half_width;
            let dw = (hi - lo) / (n - 1) as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let w = lo + i as f64 * dw;
                let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                sum += weight * spin_noise_psd(&state, &ens, 1e-7, w);
            }
            areas[k] = sum * dw;
        }
        assert!(
            (areas[0] / areas[1] - 1.0).abs() < 0.02,
            "areas: {areas:?}"
        );
    }

    #[test]
    fn sql_estimate_matches_nyquist_up_to_constant() {
        // Eq-15-squared over the printed classical closed form is exactly 2π,
        // an order-unity constant, for any parameters
        let ens = fig2_ensemble(300.0);
        let state = loaded_state(&ens, fig2_b0(), 1e3, 1.0).unwrap();
        let geometry = CoilGeometry { turns: 4, area: 7.854e-5, length: 0.01 };
        let coil_l = MU0 * 16.0 * geometry.area / geometry.length;
        let v = sql_voltage_estimate(&ens, &state, &geometry);
        let eq13_peak = (ens.filling_factor / (2.0 * std::f64::consts::PI))
            * MU0
            * HBAR.powi(2)
            * ens.gamma.powi(2)
            * ens.density
            * state.omega0.powi(2)
            * coil_l
            * state.t2_star;
        let ratio = v * v / eq13_peak;
        assert!(ratio > 0.1 && ratio < 10.0, "ratio = {ratio}");
        assert!((ratio - 2.0 * std::f64::consts::PI).abs() / ratio < 1e-9);
    }

    #[test]
    fn sql_estimate_scalings() {
        let ens = fig2_ensemble(300.0);
        let state = loaded_state(&ens, fig2_b0(), 1e3, 1.0).unwrap();
        let g1 = CoilGeometry { turns: 4, area: 7.854e-5, length: 0.01 };
        let g2 = CoilGeometry { turns: 8, ..g1 };
        let v1 = sql_voltage_estimate(&ens, &state, &g1);
        let v2 = sql_voltage_estimate(&ens, &state, &g2);
        assert!((v2 / v1 - 2.0).abs() < 1e-12);

        let mut empty = ens;
        empty.density = 1e-300;
        let state_empty = loaded_state(&empty, fig2_b0(), 1e3, 0.0).unwrap();
        assert!(sql_voltage_estimate(&empty, &state_empty, &g1) < 1e-100);
    }
}
