//! Composite frequency grids: a coarse background plus refinement windows
//! around the spin and circuit resonances.
//!
//! A single uniform grid is wasteful here: the spin line can be four orders of
//! magnitude narrower (or broader) than the circuit resonance depending on the
//! spin temperature.

use crate::error::{Error, Result};

/// Minimum points per resolved linewidth required of any grid fed to the
/// spectrum composer.
pub const POINTS_PER_LINEWIDTH: f64 = 20.0;

fn push_linspace(out: &mut Vec<f64>, lo: f64, hi: f64, step: f64) {
    if hi <= lo || step <= 0.0 {
        return;
    }
    let n = ((hi - lo) / step).ceil() as usize;
    for i in 0..=n {
        out.push(lo + i as f64 * (hi - lo) / n as f64);
    }
}

/// Builds a grid covering both resonances: fine cores at the narrowest scale,
/// medium zones spanning each feature, and a coarse background reaching at
/// least ±130 circuit linewidths for floor checks.
///
/// `spin_hwhm` is 1/T2* (half width), `circuit_fwhm` is ωc/Qc.
pub fn composite_grid(omega0: f64, spin_hwhm: f64, omega_c: f64, circuit_fwhm: f64) -> Vec<f64> {
    let spin_fwhm = 2.0 * spin_hwhm;
    let w_req = spin_hwhm.min(circuit_fwhm);
    let fine = w_req / 25.0;

    let mut pts = Vec::new();
    // fine cores where the resolution requirement applies
    push_linspace(&mut pts, omega0 - 8.0 * w_req, omega0 + 8.0 * w_req, fine);
    push_linspace(&mut pts, omega_c - 8.0 * w_req, omega_c + 8.0 * w_req, fine);
    // medium zones spanning each feature at its own scale
    push_linspace(
        &mut pts,
        omega0 - 60.0 * spin_fwhm,
        omega0 + 60.0 * spin_fwhm,
        spin_fwhm / 25.0,
    );
    // factor 2: matching roughly doubles the loaded circuit width
    push_linspace(
        &mut pts,
        omega_c - 60.0 * 2.0 * circuit_fwhm,
        omega_c + 60.0 * 2.0 * circuit_fwhm,
        circuit_fwhm / 25.0,
    );
    // coarse background, wide enough for >=100-linewidth floor checks and
    // for the broad-line spin noise area
    let lo = (omega0 - 120.0 * spin_fwhm)
        .min(omega_c - 130.0 * circuit_fwhm)
        .max(1e-3 * omega_c.min(omega0));
    let hi = (omega0 + 120.0 * spin_fwhm).max(omega_c + 130.0 * circuit_fwhm);
    push_linspace(&mut pts, lo, hi, (hi - lo) / 6000.0);

    pts.retain(|w| *w > 0.0);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // drop near-duplicates so the grid is strictly increasing
    let mut grid = Vec::with_capacity(pts.len());
    let mut last = f64::NEG_INFINITY;
    for w in pts {
        if w - last > 1e-12 * w.abs().max(1.0) {
            grid.push(w);
            last = w;
        }
    }
    grid
}

/// Validates that `grid` brackets both features and resolves the narrowest
/// linewidth with at least [`POINTS_PER_LINEWIDTH`] points near each feature.
pub fn validate_grid(
    grid: &[f64],
    omega0: f64,
    spin_hwhm: f64,
    omega_c: f64,
    circuit_fwhm: f64,
) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let (lo, hi) = (grid[0], *grid.last().unwrap());
    if lo > omega0 || hi < omega0 {
        return Err(Error::Domain(format!(
            "grid [{lo:.3e}, {hi:.3e}] does not cover the Larmor frequency {omega0:.3e}"
        )));
    }
    if lo > omega_c || hi < omega_c {
        return Err(Error::Domain(format!(
            "grid [{lo:.3e}, {hi:.3e}] does not cover the circuit resonance {omega_c:.3e}"
        )));
    }
    let w_req = spin_hwhm.min(circuit_fwhm);
    let required = w_req / POINTS_PER_LINEWIDTH;
    for (center, feature) in [(omega0, "the Larmor frequency"), (omega_c, "the circuit resonance")]
    {
        for pair in grid.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            if (mid - center).abs() <= 5.0 * w_req {
                let spacing = pair[1] - pair[0];
                if spacing > required {
                    return Err(Error::UnderResolvedGrid {
                        feature,
                        required,
                        found: spacing,
                    });
                }
            }
        }
    }
    Ok(())
}
