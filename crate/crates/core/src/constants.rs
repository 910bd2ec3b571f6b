//! Physical constants (CODATA 2018) and unit-conversion factors.
//!
//! These are fixed at full CODATA precision and are deliberately not
//! user-configurable: every golden number in the test suite depends on them.

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact in the 2019 SI).
pub const KB: f64 = 1.380_649e-23;

/// Proton gyromagnetic ratio, rad/s/T.
pub const PROTON_GAMMA: f64 = 2.675_221_874_4e8;

/// Speed of light, m/s (exact).
pub const C_LIGHT: f64 = 2.997_924_58e8;

/// Elementary charge, C (exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced Planck constant, eV·s.
pub const HBAR_EVS: f64 = 6.582_119_569e-16;

/// ħc, eV·m. One inverse meter is `HBAR_C_EVM` electron-volts.
pub const HBAR_C_EVM: f64 = 1.973_269_804e-7;

/// ²⁰⁷Pb gyromagnetic ratio, rad/s/T (Ξ = 20.920599 % of the proton).
pub const PB207_GAMMA: f64 = 0.209_205_99 * PROTON_GAMMA;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_positive_and_precise() {
        for v in [MU0, HBAR, KB, PROTON_GAMMA, C_LIGHT, E_CHARGE, HBAR_EVS, HBAR_C_EVM] {
            assert!(v > 0.0);
        }
        // 9+ significant digits spot checks
        assert_eq!(KB, 1.380649e-23);
        assert_eq!(PROTON_GAMMA, 2.6752218744e8);
        // hbar in eV·s consistent with hbar in J·s via the elementary charge
        let hbar_evs = HBAR / E_CHARGE;
        assert!((hbar_evs - HBAR_EVS).abs() / HBAR_EVS < 1e-9);
        // hbar*c in eV·m consistent
        let hc = HBAR * C_LIGHT / E_CHARGE;
        assert!((hc - HBAR_C_EVM).abs() / HBAR_C_EVM < 1e-9);
    }
}
