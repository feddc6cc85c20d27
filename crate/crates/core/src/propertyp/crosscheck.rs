//! First-order negative-energy leak of a relativistic shell orbital under
//! the rotated exchange field, summed over every negative state of the
//! radial solver, compared with the `||f|| / 2c^3` prediction.
//!
//! The Dirac-Fock basis keeps only a few negative states per channel, which
//! captures a small fraction of this leak; the table over the number of
//! negative states kept shows the saturation.

use nalgebra::DVector;
use rayon::prelude::*;

use super::field::f_field;
use super::pauli::pauli_orbital;
use crate::angular::harmonics::{kappa_l, spinor_harmonic, SphereRule};
use crate::angular::{wigner_block, RotationSU2, C64};
use crate::coulomb::multipole::{hartree_multipoles, DensityExpansion};
use crate::error::{LabError, Result};
use crate::radial::{solve_channel, Channel, RadialModel, RadialOrbital};

const I: C64 = C64::new(0.0, 1.0);

struct DiracOrbital<'a> {
    kappa: i32,
    orb: &'a RadialOrbital,
    radii: &'a [f64],
    coefficients: DVector<C64>,
}

impl DiracOrbital<'_> {
    fn value(&self, p: usize, theta: f64, phi: f64) -> [C64; 4] {
        let tj = 2 * self.kappa.abs() - 1;
        let mut out = [C64::new(0.0, 0.0); 4];
        let r = self.radii[p];
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let tm = tj - 2 * i as i32;
            let up = spinor_harmonic(self.kappa, tm, theta, phi);
            let dn = spinor_harmonic(-self.kappa, tm, theta, phi);
            let (a, b) = (c * (self.orb.p[p] / r), c * I * (self.orb.q[p] / r));
            out[0] += up[0] * a;
            out[1] += up[1] * a;
            out[2] += dn[0] * b;
            out[3] += dn[1] * b;
        }
        out
    }
}

fn inner4(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone)]
pub struct LeakCrossCheck {
    pub c: f64,
    pub shell_shifted: f64,
    /// `||T||` with all negative states, so that `||P^- psi|| ~ kappa ||T||`
    pub t_full: f64,
    /// `(states kept per channel, ||T||)` keeping the states nearest the gap
    pub t_by_count: Vec<(usize, f64)>,
    pub f_norm: f64,
    /// `||f|| / (2 c^3)`
    pub prediction: f64,
}

impl LeakCrossCheck {
    pub fn ratio(&self) -> f64 {
        self.t_full / self.prediction
    }

    pub fn within_factor(&self, factor: f64) -> bool {
        let r = self.ratio();
        r >= 1.0 / factor && r <= factor
    }
}

pub fn leak_cross_check(model: &RadialModel, kappa: i32, level: usize, a: &RotationSU2, kmax: u32) -> Result<LeakCrossCheck> {
    let channel = Channel::new(kappa)?;
    let states = solve_channel(model, channel)?;
    let orb = states
        .iter()
        .filter(|o| o.is_bound(model.c) && !o.spurious)
        .nth(level)
        .ok_or_else(|| LabError::NoMatchingLevel(format!("no relativistic level {level} in kappa={kappa}")))?;
    let radii = model.grid.points();
    let tj = channel.two_j();
    let mut coefficients = DVector::zeros((tj + 1) as usize);
    coefficients[((tj - 1) / 2) as usize] = C64::new(1.0, 0.0);
    let psi = DiracOrbital { kappa, orb, radii, coefficients: coefficients.clone() };
    let apsi = DiracOrbital { kappa, orb, radii, coefficients: wigner_block(tj, a) * coefficients };

    // direct and exchange potentials of the rotated orbital
    let maxl = kappa_l(kappa).max(kappa_l(-kappa)) as usize;
    let lmax = 2 * maxl;
    let grid = &model.grid;
    let rho1 = DensityExpansion::project(grid, lmax, |p, t, ph| {
        let v = apsi.value(p, t, ph);
        inner4(&v, &v)
    });
    let rho2 = DensityExpansion::project(grid, lmax, |p, t, ph| inner4(&apsi.value(p, t, ph), &psi.value(p, t, ph)));
    let u1 = hartree_multipoles(grid, &rho1, lmax)?;
    let u2 = hartree_multipoles(grid, &rho2, lmax)?;

    // spinor-harmonic components of g = Omega_{A psi} psi
    let channels = Channel::up_to(kmax);
    let rule = SphereRule::for_degree(2 * lmax + maxl + kmax as usize + 2);
    // per channel, per tm: (upper, lower) radial tables
    type Tables = Vec<Vec<(Vec<C64>, Vec<C64>)>>;
    let per_point: Vec<Vec<Vec<(C64, C64)>>> = (0..radii.len())
        .into_par_iter()
        .map(|p| {
            let g: Vec<[C64; 4]> = rule
                .points
                .iter()
                .map(|&(t, ph)| {
                    let (v1, v2) = (u1.potential_at(p, t, ph), u2.potential_at(p, t, ph));
                    let (x, y) = (psi.value(p, t, ph), apsi.value(p, t, ph));
                    [0, 1, 2, 3].map(|i| v1 * x[i] - v2 * y[i])
                })
                .collect();
            channels
                .iter()
                .map(|ch| {
                    let tjc = ch.two_j();
                    (0..=tjc as usize)
                        .map(|i| {
                            let tm = tjc - 2 * i as i32;
                            let mut up = C64::new(0.0, 0.0);
                            let mut lo = C64::new(0.0, 0.0);
                            for ((&(t, ph), w), gv) in rule.points.iter().zip(&rule.weights).zip(&g) {
                                let ou = spinor_harmonic(ch.kappa, tm, t, ph);
                                let ol = spinor_harmonic(-ch.kappa, tm, t, ph);
                                up += (ou[0].conj() * gv[0] + ou[1].conj() * gv[1]) * *w;
                                lo += (ol[0].conj() * gv[2] + ol[1].conj() * gv[3]) * *w;
                            }
                            (up, lo)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let tables: Tables = channels
        .iter()
        .enumerate()
        .map(|(ci, ch)| {
            (0..=ch.two_j() as usize)
                .map(|m| {
                    let up = per_point.iter().map(|v| v[ci][m].0).collect();
                    let lo = per_point.iter().map(|v| v[ci][m].1).collect();
                    (up, lo)
                })
                .collect()
        })
        .collect();

    // amplitudes over the negative states, nearest the gap first
    let c2 = model.c * model.c;
    let w = grid.weights();
    let mut contributions: Vec<Vec<f64>> = Vec::new();
    for (ci, ch) in channels.iter().enumerate() {
        let all = solve_channel(model, *ch)?;
        let mut neg: Vec<&RadialOrbital> = all.iter().filter(|o| o.energy <= -c2).collect();
        neg.sort_by(|a, b| b.energy.total_cmp(&a.energy));
        let per_state: Vec<f64> = neg
            .iter()
            .map(|n| {
                let denom = orb.shifted - n.shifted;
                tables[ci]
                    .iter()
                    .map(|(up, lo)| {
                        let amp: C64 = (0..radii.len()).map(|p| (up[p] * n.p[p] - I * lo[p] * n.q[p]) * (w[p] * radii[p])).sum();
                        (amp / denom).norm_sqr()
                    })
                    .sum()
            })
            .collect();
        contributions.push(per_state);
    }
    let longest = contributions.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut t_by_count = Vec::new();
    let mut count = 1;
    while count < longest {
        let s: f64 = contributions.iter().map(|v| v.iter().take(count).sum::<f64>()).sum();
        t_by_count.push((count, s.sqrt()));
        count *= 2;
    }
    let t_full = contributions.iter().map(|v| v.iter().sum::<f64>()).sum::<f64>().sqrt();
    t_by_count.push((longest, t_full));

    let phi = pauli_orbital(model, kappa, level)?;
    let f_norm = f_field(grid, &phi, a)?.norm(grid);
    let c3 = model.c.powi(3);
    Ok(LeakCrossCheck { c: model.c, shell_shifted: orb.shifted, t_full, t_by_count, f_norm, prediction: f_norm / (2.0 * c3) })
}
