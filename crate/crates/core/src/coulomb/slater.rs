//! Radial Slater integrals by the inner/outer cumulative-integral algorithm.

use crate::error::{LabError, Result};
use crate::grid::RadialGrid;

/// `rho_ab = P_a P_b + Q_a Q_b` at the quadrature points.
pub fn pair_density(pa: &[f64], qa: &[f64], pb: &[f64], qb: &[f64]) -> Vec<f64> {
    (0..pa.len()).map(|i| pa[i] * pb[i] + qa[i] * qb[i]).collect()
}

/// `y_k(r) = r^{-(k+1)} ∫_0^r s^k rho + r^k ∫_r^R s^{-(k+1)} rho`, where `rho`
/// already carries the radial measure.
pub fn yk_potential(grid: &RadialGrid, rho: &[f64], k: u32) -> Vec<f64> {
    let r = grid.points();
    let k = k as i32;
    let inner: Vec<f64> = rho.iter().zip(r).map(|(v, s)| v * s.powi(k)).collect();
    let outer: Vec<f64> = rho.iter().zip(r).map(|(v, s)| v * s.powi(-(k + 1))).collect();
    let a = grid.cumulative_from_origin(&inner);
    let b = grid.cumulative_to_box(&outer);
    (0..r.len()).map(|i| a[i] * r[i].powi(-(k + 1)) + b[i] * r[i].powi(k)).collect()
}

/// `∬ rho1(r) r_<^k / r_>^{k+1} rho2(s) dr ds`, symmetrized over the two
/// orders of evaluation so that swapping the densities is exact.
pub fn slater_rk(grid: &RadialGrid, rho1: &[f64], rho2: &[f64], k: u32) -> Result<f64> {
    if rho1.len() != grid.len() || rho2.len() != grid.len() {
        return Err(LabError::GridMismatch(format!(
            "densities of length {} and {} on a grid of {} points",
            rho1.len(),
            rho2.len(),
            grid.len()
        )));
    }
    let y2 = yk_potential(grid, rho2, k);
    let y1 = yk_potential(grid, rho1, k);
    let a: f64 = (0..grid.len()).map(|i| grid.weights()[i] * rho1[i] * y2[i]).sum();
    let b: f64 = (0..grid.len()).map(|i| grid.weights()[i] * rho2[i] * y1[i]).sum();
    Ok(0.5 * (a + b))
}

/// `R^k(ab, cd)` with densities `rho_ac` and `rho_bd` built from the given
/// (P, Q) samples.
#[allow(clippy::too_many_arguments)]
pub fn slater_integral(
    grid: &RadialGrid,
    a: (&[f64], &[f64]),
    b: (&[f64], &[f64]),
    c: (&[f64], &[f64]),
    d: (&[f64], &[f64]),
    k: u32,
) -> Result<f64> {
    let rho_ac = pair_density(a.0, a.1, c.0, c.1);
    let rho_bd = pair_density(b.0, b.1, d.0, d.1);
    slater_rk(grid, &rho_ac, &rho_bd, k)
}
