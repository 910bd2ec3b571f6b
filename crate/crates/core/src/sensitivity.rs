//! Spin-projection-noise-limited coupling projections versus axion mass, for
//! the EDM and gradient interactions, including back-action suppression.
//!
//! Unit conventions (documented here, exercised by the dimensional audit):
//! - Field amplitudes are carried in natural units (eV powers):
//!   a0 = √(2ρ)/m with ρ in eV⁴, so [a0] = eV; the gradient amplitude is
//!   |∇a| = a0·m·v with v = 1e-3 c, so [|∇a|] = eV².
//! - An electric field E in V/m enters the EDM chain as e·E expressed in
//!   natural units: E_nat = E · ħc[eV·m] in eV².
//! - Rabi frequencies convert to SI via ħ in eV·s:
//!   EDM:      Ω1[rad/s] = κ · g_d[eV⁻²] · a0[eV] · E_nat[eV²] / ħ[eV·s]
//!   gradient: Ω1[rad/s] = κ · g_aNN[eV⁻¹] · a0·m·v[eV²] / ħ[eV·s]
//!   κ is the rotating-frame convention factor [`RABI_CONVENTION`].
//! - Coupling limits are reported in GeV⁻² (g_d) and GeV⁻¹ (g_aNN).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR_C_EVM, HBAR_EVS, MU0};
use crate::error::{Error, Result};
use crate::spins::{
    loaded_state, spin_noise_psd, CoilGeometry, EnsembleState, SpinEnsemble,
};
use crate::units::{mass_ev_to_hz, mass_ev_to_rad_s};

/// Rotating-frame convention factor in Ω1: half of the oscillating amplitude
/// drives the co-rotating component. Exposed because the exact factor is a
/// convention choice; all reported limits scale as 1/κ.
pub const RABI_CONVENTION: f64 = 0.5;

/// Dark-matter virial velocity in units of c.
pub const VIRIAL_VELOCITY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    Edm,
    Gradient,
}

/// Cylindrical sample, height equal to diameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SampleGeometry {
    /// Cylinder radius, m.
    pub radius: f64,
}

impl SampleGeometry {
    /// Notional pickup coil wrapped around the sample. The turn count cancels
    /// in the sensitivity chain; four turns is kept for concreteness.
    pub fn coil(&self) -> CoilGeometry {
        CoilGeometry {
            turns: 4,
            area: std::f64::consts::PI * self.radius * self.radius,
            length: 2.0 * self.radius,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxionSearchConfig {
    pub coupling: Coupling,
    /// Strictly increasing mass grid, eV.
    pub mass_grid: Vec<f64>,
    /// Local dark-matter density, GeV/cm³.
    pub rho_dm_gev_cm3: f64,
    /// Axion coherence quality ν/Δν (τa = Q·2π/ωa).
    pub axion_quality: f64,
    /// Measurement time per mass point, s.
    pub tau_m: f64,
    pub ensemble: SpinEnsemble,
    pub geometry: SampleGeometry,
    /// Effective electric field E*, V/m (EDM coupling only).
    pub e_star: Option<f64>,
    /// Probe quality factor entering the back-action rate.
    pub qc: f64,
    /// Back-action suppression s ∈ [0, 1].
    pub suppression: f64,
    /// Mass points needing B0 above this are marked unreachable, T.
    pub b0_max: f64,
}

/// Halo field amplitudes at one mass.
#[derive(Debug, Clone, Copy)]
pub struct AxionField {
    /// Scalar field amplitude a0 = √(2ρ)/m, eV.
    pub a0_ev: f64,
    /// Gradient amplitude |∇a| = a0·m·v, eV².
    pub gradient_ev2: f64,
}

/// Halo amplitudes from the local density and mass.
pub fn axion_field_amplitude(mass_ev: f64, rho_dm_gev_cm3: f64) -> Result<AxionField> {
    if mass_ev <= 0.0 {
        return Err(Error::Domain(format!("axion mass must be positive, got {mass_ev}")));
    }
    // GeV/cm³ → eV⁴: 1 GeV/cm³ = 1e15 eV/m³, and 1/m = ħc eV
    let rho_ev4 = rho_dm_gev_cm3 * 1e15 * HBAR_C_EVM.powi(3);
    let a0_ev = (2.0 * rho_ev4).sqrt() / mass_ev;
    Ok(AxionField { a0_ev, gradient_ev2: a0_ev * mass_ev * VIRIAL_VELOCITY })
}

/// Smallest detectable Rabi frequency given the on-resonance noise PSD and
/// the signal transduction V1 = α0·μ0·M0·Ω1·T2*.
///
/// For τm ≥ τa (averaging over many coherence times) the detectable signal
/// power is Ṽs²(ω0)/√(τm·τa); for τm < τa the run is fully coherent and the
/// power is Ṽs²(ω0)/τm.
pub fn minimum_rabi_from_noise(
    v_s_sq: f64,
    alpha0: f64,
    m0: f64,
    t2_star: f64,
    tau_m: f64,
    tau_a: f64,
) -> Result<f64> {
    if m0 <= 0.0 {
        return Err(Error::Domain(
            "minimum_rabi: M0 = 0, the ensemble transduces no signal".into(),
        ));
    }
    if tau_m <= 0.0 || tau_a <= 0.0 {
        return Err(Error::Domain("tau_m and tau_a must be positive".into()));
    }
    let v1_sq = if tau_m >= tau_a {
        v_s_sq / (tau_m * tau_a).sqrt()
    } else {
        v_s_sq / tau_m
    };
    Ok(v1_sq.sqrt() / (alpha0 * MU0 * m0 * t2_star))
}

/// Smallest detectable Rabi frequency for a loaded ensemble read out by a
/// coil wrapped around it.
pub fn minimum_rabi(
    ens: &SpinEnsemble,
    state: &EnsembleState,
    coil: &CoilGeometry,
    tau_m: f64,
    tau_a: f64,
) -> Result<f64> {
    let coil_l = crate::circuit::ProbeCircuit::solenoid_inductance(
        coil.turns, coil.area, coil.length,
    );
    let v_s_sq = spin_noise_psd(state, ens, coil_l, state.omega0);
    let alpha0 = ens.filling_factor * state.omega0 * f64::from(coil.turns) * coil.area;
    minimum_rabi_from_noise(v_s_sq, alpha0, state.m0, state.t2_star, tau_m, tau_a)
}

/// One mass point of a sensitivity projection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub mass_ev: f64,
    pub freq_hz: f64,
    /// GeV⁻² (EDM) or GeV⁻¹ (gradient); None when B0 would exceed the cap.
    pub coupling_limit: Option<f64>,
    pub t2_star: Option<f64>,
    /// suppression/T_r exceeds 1/T2eff at this point.
    pub back_action_limited: bool,
    /// τm < τa here: the coherent-averaging branch was used.
    pub coherent_branch: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub coupling: Coupling,
    pub points: Vec<SensitivityPoint>,
    /// Largest suppression for which back-action never limits the curve:
    /// min over the grid of T_r/T2eff.
    pub required_suppression: f64,
    /// Configuration echo.
    pub config: AxionSearchConfig,
}

/// EDM-coupling projection g_d(m) from the configured search.
pub fn edm_limit(cfg: &AxionSearchConfig) -> Result<SensitivityCurve> {
    if cfg.coupling != Coupling::Edm {
        return Err(Error::Domain("edm_limit called with a non-EDM configuration".into()));
    }
    if cfg.e_star.is_none() {
        return Err(Error::Domain("EDM coupling requires the effective field e_star".into()));
    }
    limit_curve(cfg)
}

/// Gradient-coupling projection g_aNN(m) from the configured search.
pub fn gradient_limit(cfg: &AxionSearchConfig) -> Result<SensitivityCurve> {
    if cfg.coupling != Coupling::Gradient {
        return Err(Error::Domain(
            "gradient_limit called with a non-gradient configuration".into(),
        ));
    }
    limit_curve(cfg)
}

fn limit_curve(cfg: &AxionSearchConfig) -> Result<SensitivityCurve> {
    if cfg.mass_grid.windows(2).any(|w| w[1] <= w[0]) || cfg.mass_grid.is_empty() {
        return Err(Error::Domain("mass grid must be non-empty and strictly increasing".into()));
    }
    if cfg.tau_m <= 0.0 {
        return Err(Error::Domain("tau_m must be positive".into()));
    }
    let coil = cfg.geometry.coil();
    let mut points = Vec::with_capacity(cfg.mass_grid.len());
    let mut required_suppression = f64::INFINITY;
    for &mass in &cfg.mass_grid {
        let omega_a = mass_ev_to_rad_s(mass);
        let freq_hz = mass_ev_to_hz(mass);
        let b0 = omega_a / cfg.ensemble.gamma;
        if b0 > cfg.b0_max {
            points.push(SensitivityPoint {
                mass_ev: mass,
                freq_hz,
                coupling_limit: None,
                t2_star: None,
                back_action_limited: false,
                coherent_branch: false,
            });
            continue;
        }
        let state = loaded_state(&cfg.ensemble, b0, cfg.qc, cfg.suppression)?;
        required_suppression = required_suppression.min(state.t_radiation / state.t2_eff);
        let tau_a = cfg.axion_quality * 2.0 * std::f64::consts::PI / omega_a;
        let omega1_min = minimum_rabi(&cfg.ensemble, &state, &coil, cfg.tau_m, tau_a)?;
        let field = axion_field_amplitude(mass, cfg.rho_dm_gev_cm3)?;
        let limit = match cfg.coupling {
            Coupling::Edm => {
                let e_star = cfg.e_star.ok_or_else(|| {
                    Error::Domain("EDM coupling requires the effective field e_star".into())
                })?;
                let e_nat = e_star * HBAR_C_EVM; // eV²
                let g_ev2 = omega1_min * HBAR_EVS / (RABI_CONVENTION * field.a0_ev * e_nat);
                g_ev2 * 1e18 // eV⁻² → GeV⁻²
            }
            Coupling::Gradient => {
                let g_ev1 =
                    omega1_min * HBAR_EVS / (RABI_CONVENTION * field.gradient_ev2);
                g_ev1 * 1e9 // eV⁻¹ → GeV⁻¹
            }
        };
        points.push(SensitivityPoint {
            mass_ev: mass,
            freq_hz,
            coupling_limit: Some(limit),
            t2_star: Some(state.t2_star),
            back_action_limited: cfg.suppression * state.t2_eff / state.t_radiation > 1.0,
            coherent_branch: cfg.tau_m < tau_a,
        });
    }
    Ok(SensitivityCurve {
        coupling: cfg.coupling,
        points,
        required_suppression,
        config: cfg.clone(),
    })
}

fn write_point<W: Write>(out: &mut W, p: &SensitivityPoint) -> std::io::Result<()> {
    match (p.coupling_limit, p.t2_star) {
        (Some(limit), Some(t2)) => write!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e},{}",
            p.mass_ev, p.freq_hz, limit, t2, p.back_action_limited
        ),
        _ => write!(out, "{:.8e},{:.8e},nan,nan,false", p.mass_ev, p.freq_hz),
    }
}

/// CSV: mass_eV, freq_Hz, coupling_limit, t2star_s, back_action_limited.
pub fn write_csv<W: Write>(curve: &SensitivityCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "mass_eV,freq_Hz,coupling_limit,t2star_s,back_action_limited")?;
    for p in &curve.points {
        write_point(&mut out, p)?;
        writeln!(out)?;
    }
    Ok(())
}

/// CSV for a suppression sweep, one labeled curve per suppression value.
pub fn write_csv_sweep<W: Write>(
    curves: &[(f64, SensitivityCurve)],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "mass_eV,freq_Hz,coupling_limit,t2star_s,back_action_limited,suppression"
    )?;
    for (suppression, curve) in curves {
        for p in &curve.points {
            write_point(&mut out, p)?;
            writeln!(out, ",{suppression:.8e}")?;
        }
    }
    Ok(())
}
