//! Dual kinetic balance discretization of the radial Dirac operator.
//!
//! Radial spinors are `(P, Q)` with `psi = (1/r) (P Omega_{kappa m}, i Q Omega_{-kappa m})`;
//! the radial operator is
//! `[[V + c^2, -c (d/dr - kappa/r)], [c (d/dr + kappa/r), V - c^2]]`.
//! Upper basis functions are `(B, (B' + kappa B / r) / 2c)`, lower ones
//! `((B' - kappa B / r) / 2c, B)`. The two families are exactly orthogonal,
//! so the overlap is block diagonal.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{count_nodes, generalized_eigen, schrodinger_channel, Channel, RadialModel};
use crate::error::Result;

/// Discrete Dirac matrices of one channel. `h_shifted = H - c^2 S` is kept
/// separately so that bound-state energies do not lose digits to `c^2`.
#[derive(Debug, Clone)]
pub struct ChannelMatrices {
    pub channel: Channel,
    pub c: f64,
    pub h_shifted: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl ChannelMatrices {
    pub fn h(&self) -> DMatrix<f64> {
        &self.h_shifted + &self.s * (self.c * self.c)
    }
}

#[derive(Debug, Clone)]
pub struct RadialOrbital {
    pub channel: Channel,
    /// eigenvalue lambda
    pub energy: f64,
    /// lambda - c^2, computed without cancellation
    pub shifted: f64,
    /// upper coefficients followed by lower coefficients
    pub coefficients: Vec<f64>,
    /// large and small components at the quadrature points
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub nodes: usize,
    pub spurious: bool,
}

impl RadialOrbital {
    /// State in the spectral gap `(-c^2, c^2)`.
    pub fn is_bound(&self, c: f64) -> bool {
        self.shifted < 0.0 && self.energy > -c * c
    }

    pub fn is_negative(&self) -> bool {
        self.energy < 0.0
    }
}

/// Per-point tables for one spline: a = B, p = B' + kB/r, m = B' - kB/r and
/// t = B'' - k(k-1) B / r^2.
struct Tables {
    a: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
    t: Vec<Vec<f64>>,
}

fn tables(model: &RadialModel, kappa: f64) -> Tables {
    let b = &model.basis;
    let r = model.grid.points();
    let n = b.len();
    let mut out = Tables { a: Vec::with_capacity(n), p: Vec::with_capacity(n), m: Vec::with_capacity(n), t: Vec::with_capacity(n) };
    for i in 0..n {
        let v = b.values(i);
        let d = b.derivs(i);
        let d2 = b.second_derivs(i);
        out.a.push(v.to_vec());
        out.p.push((0..r.len()).map(|k| d[k] + kappa * v[k] / r[k]).collect());
        out.m.push((0..r.len()).map(|k| d[k] - kappa * v[k] / r[k]).collect());
        out.t.push((0..r.len()).map(|k| d2[k] - kappa * (kappa - 1.0) * v[k] / (r[k] * r[k])).collect());
    }
    out
}

pub fn channel_matrix(model: &RadialModel, channel: Channel) -> ChannelMatrices {
    let n = model.basis.len();
    let c = model.c;
    let c2 = c * c;
    let kappa = channel.kappa as f64;
    let tb = tables(model, kappa);
    let w = model.grid.weights();
    let v = model.potential_values();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let Some((lo, hi)) = model.basis.overlap(i, j) else { continue };
            let (mut aa, mut pp, mut mm, mut vu, mut vl, mut vx, mut kin) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for k in lo..hi {
                let (ai, aj) = (tb.a[i][k], tb.a[j][k]);
                let (pi, pj) = (tb.p[i][k], tb.p[j][k]);
                let (mi, mj) = (tb.m[i][k], tb.m[j][k]);
                let wk = w[k];
                aa += wk * ai * aj;
                pp += wk * pi * pj;
                mm += wk * mi * mj;
                vu += wk * v[k] * (ai * aj + pi * pj / (4.0 * c2));
                vl += wk * v[k] * (mi * mj / (4.0 * c2) + ai * aj);
                vx += wk * v[k] * (ai * mj + pi * aj);
                kin += wk * pi * tb.t[j][k];
            }
            s[(i, j)] = aa + pp / (4.0 * c2);
            s[(n + i, n + j)] = mm / (4.0 * c2) + aa;
            h[(i, j)] = vu + 0.5 * pp;
            h[(n + i, n + j)] = vl - 2.0 * c2 * aa - mm;
            let cross = vx / (2.0 * c) + kin / (4.0 * c);
            h[(i, n + j)] = cross;
            h[(n + j, i)] = cross;
        }
    }
    // the upper and lower diagonal blocks are symmetric analytically; remove
    // rounding asymmetry from the accumulation order
    let h = (&h + h.transpose()) * 0.5;
    let s = (&s + s.transpose()) * 0.5;
    ChannelMatrices { channel, c, h_shifted: h, s }
}

/// Component samples `(P, Q)` of a coefficient vector.
pub(crate) fn components(model: &RadialModel, kappa: f64, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = model.basis.len();
    let c = model.c;
    let r = model.grid.points();
    let mut p = vec![0.0; r.len()];
    let mut q = vec![0.0; r.len()];
    for i in 0..n {
        let (xu, xl) = (x[i], x[n + i]);
        let (lo, hi) = model.basis.support(i);
        let v = model.basis.values(i);
        let d = model.basis.derivs(i);
        for k in lo..hi {
            let plus = d[k] + kappa * v[k] / r[k];
            let minus = d[k] - kappa * v[k] / r[k];
            p[k] += xu * v[k] + xl * minus / (2.0 * c);
            q[k] += xu * plus / (2.0 * c) + xl * v[k];
        }
    }
    (p, q)
}

/// All eigenpairs of the channel, ascending. Bound states are compared with
/// the Schrodinger levels of the same large-component `l`; a bound state with
/// neither a matching level nor the expected node count is flagged spurious.
pub fn solve_channel(model: &RadialModel, channel: Channel) -> Result<Vec<RadialOrbital>> {
    let mats = channel_matrix(model, channel);
    let (shifted, x) = generalized_eigen(&mats.h_shifted, &mats.s)?;
    let c2 = model.c * model.c;
    let kappa = channel.kappa as f64;
    let nonrel = schrodinger_channel(model, channel.l_large() as u32)?;
    let mut orbitals: Vec<RadialOrbital> = (0..shifted.len())
        .into_par_iter()
        .map(|k| {
            let mut coefficients: Vec<f64> = x.column(k).iter().copied().collect();
            let (mut p, mut q) = components(model, kappa, &coefficients);
            // phase: large component positive near the origin
            let peak = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if let Some(first) = p.iter().find(|v| v.abs() > 1e-6 * peak) {
                if *first < 0.0 {
                    coefficients.iter_mut().for_each(|v| *v = -*v);
                    p.iter_mut().for_each(|v| *v = -*v);
                    q.iter_mut().for_each(|v| *v = -*v);
                }
            }
            let nodes = count_nodes(&p, 1e-8);
            RadialOrbital {
                channel,
                energy: shifted[k] + c2,
                shifted: shifted[k],
                coefficients,
                p,
                q,
                nodes,
                spurious: false,
            }
        })
        .collect();
    let mut index = 0;
    for orb in orbitals.iter_mut().filter(|o| o.is_bound(model.c)) {
        let expected = nonrel.get(index).filter(|s| s.energy < 0.0);
        let energy_ok = expected.is_some_and(|s| (orb.shifted - s.energy).abs() <= 50.0 * s.energy.abs() / c2 + 1e-8);
        orb.spurious = !energy_ok && orb.nodes != index;
        index += 1;
    }
    Ok(orbitals)
}
