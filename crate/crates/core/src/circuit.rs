//! Linear AC model of the tuned-and-matched NMR probe.
//!
//! Topology: the coil branch (Rc+Rs in series with Lc+Ls) is parallel-tuned by
//! C1, then series-matched by C2 to the amplifier input resistance Ra. All
//! network algebra is exact complex arithmetic, no high-Q approximations.
//!
//! Noise sources and their transfer to the amplifier input:
//! - sources in series with the coil (spin noise Vs, circuit Nyquist noise Vc)
//!   see the voltage gain `h_coil`;
//! - the amplifier's own voltage/current sources combine as
//!   Ṽn² = Ṽa²·Ra²/|Ra+Zp|² + Ĩa²·Ra²·|Zp|²/|Ra+Zp|².

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{KB, MU0};
use crate::error::{Error, Result};
use crate::spins::SpinImpedance;

/// Tuned-and-matched probe circuit with amplifier input model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeCircuit {
    /// Coil inductance Lc, H.
    pub coil_l: f64,
    /// Coil series resistance Rc, Ω.
    pub coil_r: f64,
    /// Number of turns.
    pub turns: u32,
    /// Coil cross-section, m².
    pub area: f64,
    /// Coil length, m.
    pub length: f64,
    /// Tuning capacitance C1 (across the coil branch), F.
    pub c1: f64,
    /// Matching capacitance C2 (in series to the amplifier), F.
    pub c2: f64,
    /// Circuit resonance frequency the probe was tuned to, rad/s.
    pub omega_c: f64,
    /// Amplifier input resistance Ra, Ω.
    pub amp_r: f64,
    /// Circuit temperature θc, K.
    pub theta_c: f64,
    /// Amplifier noise temperature θa, K.
    pub theta_a: f64,
}

impl ProbeCircuit {
    /// Builds a probe from coil values and tunes it to `omega_c`.
    #[allow(clippy::too_many_arguments)]
    pub fn tuned(
        coil_l: f64,
        coil_r: f64,
        turns: u32,
        area: f64,
        length: f64,
        omega_c: f64,
        amp_r: f64,
        theta_c: f64,
        theta_a: f64,
    ) -> Result<Self> {
        if coil_l <= 0.0 || coil_r <= 0.0 || amp_r <= 0.0 {
            return Err(Error::Domain(
                "coil_l, coil_r and amp_r must be positive".into(),
            ));
        }
        if theta_c < 0.0 || theta_a < 0.0 {
            return Err(Error::Domain("temperatures must be non-negative".into()));
        }
        let (c1, c2) = tune(coil_l, coil_r, omega_c, amp_r)?;
        Ok(Self {
            coil_l,
            coil_r,
            turns,
            area,
            length,
            c1,
            c2,
            omega_c,
            amp_r,
            theta_c,
            theta_a,
        })
    }

    /// Empty-solenoid inductance from the coil geometry: Lc = μ0 η² A / l.
    pub fn solenoid_inductance(turns: u32, area: f64, length: f64) -> f64 {
        MU0 * f64::from(turns).powi(2) * area / length
    }

    /// Coil quality factor at `omega`, without the spin sample.
    pub fn quality_factor(&self, omega: f64) -> f64 {
        omega * self.coil_l / self.coil_r
    }
}

/// No spin sample: zero spin impedance at every frequency.
pub fn no_spins(omega: f64) -> SpinImpedance {
    SpinImpedance { ls: 0.0, rs: 0.0, omega }
}

/// Solves for (C1, C2) such that, with no spins, Zp(ωc) = Ra (real).
///
/// 2-D damped Newton on (Re Zp − Ra, Im Zp), started from the high-Q
/// analytic approximation C1+C2 ≈ 1/(ωc²Lc), C2/(C1+C2) ≈ √(Ra/(Qc·ωc·Lc)).
pub fn tune(coil_l: f64, coil_r: f64, omega_c: f64, amp_r: f64) -> Result<(f64, f64)> {
    let tank = (omega_c * coil_l / coil_r) * omega_c * coil_l; // Qc·ωc·Lc
    if tank <= amp_r {
        return Err(Error::Unmatchable { tank_ohm: tank, ra_ohm: amp_r });
    }
    let c_total = 1.0 / (omega_c * omega_c * coil_l);
    let x = (amp_r / tank).sqrt();
    let mut c1 = c_total * (1.0 - x);
    let mut c2 = c_total * x;

    let residual = |c1: f64, c2: f64| -> [f64; 2] {
        let zp = probe_impedance_raw(coil_l, coil_r, c1, c2, no_spins(omega_c), omega_c);
        [(zp.re - amp_r) / amp_r, zp.im / amp_r]
    };
    let norm2 = |f: &[f64; 2]| f[0] * f[0] + f[1] * f[1];

    let tol = 1e-9;
    let mut f = residual(c1, c2);
    for iteration in 0..100 {
        if f[0].abs() <= tol && f[1].abs() <= tol {
            return Ok((c1, c2));
        }
        // forward-difference Jacobian
        let h1 = c1 * 1e-7;
        let h2 = c2 * 1e-7;
        let fa = residual(c1 + h1, c2);
        let fb = residual(c1, c2 + h2);
        let j = [
            [(fa[0] - f[0]) / h1, (fb[0] - f[0]) / h2],
            [(fa[1] - f[1]) / h1, (fb[1] - f[1]) / h2],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::TuneNonConvergence {
                iterations: iteration,
                re_residual: f[0].abs(),
                im_residual: f[1].abs(),
            });
        }
        let mut d1 = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let mut d2 = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;

        // damp: halve the step until the residual shrinks and C stays positive
        let mut accepted = false;
        for _ in 0..40 {
            let (t1, t2) = (c1 + d1, c2 + d2);
            if t1 > 0.0 && t2 > 0.0 {
                let ft = residual(t1, t2);
                if norm2(&ft) < norm2(&f) {
                    c1 = t1;
                    c2 = t2;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            d1 *= 0.5;
            d2 *= 0.5;
        }
        if !accepted {
            return Err(Error::TuneNonConvergence {
                iterations: iteration,
                re_residual: f[0].abs(),
                im_residual: f[1].abs(),
            });
        }
    }
    let f = residual(c1, c2);
    if f[0].abs() <= tol && f[1].abs() <= tol {
        Ok((c1, c2))
    } else {
        Err(Error::TuneNonConvergence {
            iterations: 100,
            re_residual: f[0].abs(),
            im_residual: f[1].abs(),
        })
    }
}

fn probe_impedance_raw(
    coil_l: f64,
    coil_r: f64,
    c1: f64,
    c2: f64,
    spin: SpinImpedance,
    omega: f64,
) -> Complex64 {
    let z_coil = Complex64::new(coil_r + spin.rs, omega * (coil_l + spin.ls));
    let z_c1 = Complex64::new(0.0, -1.0 / (omega * c1));
    let z_tank = z_coil * z_c1 / (z_coil + z_c1);
    z_tank + Complex64::new(0.0, -1.0 / (omega * c2))
}

/// Probe impedance seen from the amplifier terminals, Ω.
pub fn probe_impedance(pc: &ProbeCircuit, spin: SpinImpedance, omega: f64) -> Complex64 {
    probe_impedance_raw(pc.coil_l, pc.coil_r, pc.c1, pc.c2, spin, omega)
}

/// Voltage gain from a source in series with the coil branch to the amplifier
/// input node, by nodal analysis.
pub fn coil_transfer(pc: &ProbeCircuit, spin: SpinImpedance, omega: f64) -> Complex64 {
    let z_coil = Complex64::new(pc.coil_r + spin.rs, omega * (pc.coil_l + spin.ls));
    let y_coil = z_coil.inv();
    let y1 = Complex64::new(0.0, omega * pc.c1);
    let y2 = Complex64::new(0.0, omega * pc.c2);
    let ga = Complex64::new(1.0 / pc.amp_r, 0.0);
    y_coil * y2 / ((y_coil + y1 + y2) * (y2 + ga) - y2 * y2)
}

/// Amplifier input noise PSD, V²·s/rad, from independent voltage and current
/// sources Ṽa² = 2kBθaRa/π and Ĩa² = 2kBθa/(πRa) combined over complex Zp.
pub fn amplifier_noise_psd(amp_r: f64, theta_a: f64, zp: Complex64) -> f64 {
    let va2 = 2.0 * KB * theta_a * amp_r / std::f64::consts::PI;
    let ia2 = 2.0 * KB * theta_a / (std::f64::consts::PI * amp_r);
    let denom = (Complex64::new(amp_r, 0.0) + zp).norm_sqr();
    (va2 * amp_r * amp_r + ia2 * amp_r * amp_r * zp.norm_sqr()) / denom
}

/// Complex transfer functions of the probe over a frequency grid.
#[derive(Debug, Clone)]
pub struct TransferSet {
    /// Angular frequency grid, rad/s (strictly increasing).
    pub omega: Vec<f64>,
    /// Probe impedance at each grid point, Ω.
    pub zp: Vec<Complex64>,
    /// Coil-series-source voltage gain at each grid point.
    pub h_coil: Vec<Complex64>,
    /// Amplifier voltage-noise gain Ra/(Ra+Zp).
    pub h_amp_v: Vec<Complex64>,
    /// Amplifier current-noise transimpedance Ra·Zp/(Ra+Zp), Ω.
    pub h_amp_i: Vec<Complex64>,
}

/// Evaluates Zp and all transfer functions over `grid`, with the spin
/// impedance supplied per frequency by `spin`.
pub fn transfer_set<F>(pc: &ProbeCircuit, spin: F, grid: &[f64]) -> Result<TransferSet>
where
    F: Fn(f64) -> SpinImpedance + Sync,
{
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let ra = Complex64::new(pc.amp_r, 0.0);
    let rows: Vec<(Complex64, Complex64, Complex64, Complex64)> = grid
        .par_iter()
        .map(|&w| {
            let s = spin(w);
            let zp = probe_impedance(pc, s, w);
            let h = coil_transfer(pc, s, w);
            let hv = ra / (ra + zp);
            let hi = ra * zp / (ra + zp);
            (zp, h, hv, hi)
        })
        .collect();
    let mut out = TransferSet {
        omega: grid.to_vec(),
        zp: Vec::with_capacity(rows.len()),
        h_coil: Vec::with_capacity(rows.len()),
        h_amp_v: Vec::with_capacity(rows.len()),
        h_amp_i: Vec::with_capacity(rows.len()),
    };
    for (zp, h, hv, hi) in rows {
        out.zp.push(zp);
        out.h_coil.push(h);
        out.h_amp_v.push(hv);
        out.h_amp_i.push(hi);
    }
    Ok(out)
}
