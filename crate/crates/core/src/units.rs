//! Unit-convention boundaries.
//!
//! Every PSD inside this crate is one-sided per unit *angular* frequency
//! (V²·s/rad). The time-series pipeline and all CSV outputs of the analysis
//! side report per-Hz (engineering convention). These two functions are the
//! single place where the 2π crosses.

use std::f64::consts::TAU;

/// V²·s/rad → V²/Hz. S_Hz(f)·df = S_ω(ω)·dω with ω = 2πf.
pub fn per_rad_to_per_hz(psd_per_rad: f64) -> f64 {
    TAU * psd_per_rad
}

/// V²/Hz → V²·s/rad.
pub fn per_hz_to_per_rad(psd_per_hz: f64) -> f64 {
    psd_per_hz / TAU
}

/// Axion mass (eV) → ordinary frequency ν = m·c²/h, Hz.
pub fn mass_ev_to_hz(mass_ev: f64) -> f64 {
    mass_ev / (TAU * crate::constants::HBAR_EVS)
}

/// Axion mass (eV) → Compton angular frequency ω = m·c²/ħ, rad/s.
pub fn mass_ev_to_rad_s(mass_ev: f64) -> f64 {
    mass_ev / crate::constants::HBAR_EVS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_conversion_round_trip() {
        let s = 3.7e-19;
        assert_eq!(per_rad_to_per_hz(s), TAU * s);
        assert!((per_hz_to_per_rad(per_rad_to_per_hz(s)) - s).abs() / s < 1e-15);
        // white noise 2RkBθ/π per rad/s is the familiar 4RkBθ per Hz
        let per_rad = 2.0 * 50.0 * crate::constants::KB * 300.0 / std::f64::consts::PI;
        let per_hz = per_rad_to_per_hz(per_rad);
        let expected = 4.0 * 50.0 * crate::constants::KB * 300.0;
        assert!((per_hz - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn mass_frequency_conversion() {
        // 1e-9 eV sits near 242 kHz
        let f = mass_ev_to_hz(1e-9);
        assert!((f - 2.417989242e5).abs() / 2.417989242e5 < 1e-9);
        assert!((mass_ev_to_rad_s(1e-9) / f - TAU).abs() < 1e-9);
    }
}
