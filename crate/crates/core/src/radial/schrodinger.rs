//! Nonrelativistic radial channel `-u''/2 + (l(l+1)/2r^2 + V) u = mu u` on
//! the same spline basis as the Dirac solver.

use nalgebra::DMatrix;

use super::{count_nodes, generalized_eigen, RadialModel};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SchrodingerState {
    pub l: u32,
    pub energy: f64,
    pub coefficients: Vec<f64>,
    /// u(r) and u'(r) at the quadrature points, normalized to ∫u^2 = 1
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub nodes: usize,
}

/// Eigenpairs of the channel `l`, ascending.
pub fn schrodinger_channel(model: &RadialModel, l: u32) -> Result<Vec<SchrodingerState>> {
    let b = &model.basis;
    let n = b.len();
    let r = model.grid.points();
    let w = model.grid.weights();
    let v = model.potential_values();
    let centrifugal = (l * (l + 1)) as f64 / 2.0;
    let mut h = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let Some((lo, hi)) = b.overlap(i, j) else { continue };
            let (mut hij, mut sij) = (0.0, 0.0);
            for k in lo..hi {
                let bb = b.values(i)[k] * b.values(j)[k];
                hij += w[k] * (0.5 * b.derivs(i)[k] * b.derivs(j)[k] + (centrifugal / (r[k] * r[k]) + v[k]) * bb);
                sij += w[k] * bb;
            }
            h[(i, j)] = hij;
            h[(j, i)] = hij;
            s[(i, j)] = sij;
            s[(j, i)] = sij;
        }
    }
    let (values, x) = generalized_eigen(&h, &s)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, &energy)| {
            let mut coefficients: Vec<f64> = x.column(k).iter().copied().collect();
            let (mut u, mut du) = b.expand(&coefficients);
            let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if u.iter().find(|v| v.abs() > 1e-6 * peak).is_some_and(|v| *v < 0.0) {
                coefficients.iter_mut().for_each(|v| *v = -*v);
                u.iter_mut().for_each(|v| *v = -*v);
                du.iter_mut().for_each(|v| *v = -*v);
            }
            let nodes = count_nodes(&u, 1e-8);
            SchrodingerState { l, energy, coefficients, u, du, nodes }
        })
        .collect())
}
