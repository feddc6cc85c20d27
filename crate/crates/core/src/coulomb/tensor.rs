//! Spin-orbital Coulomb integrals `(ab|cd) = ∬ psi_a^* psi_b (x) psi_c^* psi_d (y) / |x - y|`
//! over a truncated one-particle basis.
//!
//! With real radial functions and the Condon-Shortley harmonics every
//! integral is real: `(ab|cd) = sum_k R^k(rho_ab, rho_cd) G(b,a,k) G(c,d,k)`,
//! where `G` are the angular coefficients of `C^k_q`. The stored values obey
//! `(ab|cd) = (ba|dc) = (cd|ab)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::slater::{pair_density, yk_potential};
use crate::angular::gaunt::{multipole_range, GauntTable};
use crate::angular::C64;
use crate::fock::basis::OneParticleBasis;

#[derive(Debug, Clone)]
pub struct TwoElectronTensor {
    n: usize,
    index: Vec<[u16; 4]>,
    value: Vec<f64>,
    /// R^k by (k, radial pair, radial pair), pair indices canonical
    slater: HashMap<(u32, usize, usize), f64>,
    radial_count: usize,
}

fn pair_id(a: usize, b: usize, n: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo * n + hi
}

impl TwoElectronTensor {
    pub fn new(basis: &OneParticleBasis) -> Self {
        let grid = &basis.model.grid;
        let nr = basis.radial.len();
        let kmax = basis.radial.iter().map(|f| f.channel.kappa.abs()).max().unwrap_or(1);
        let gaunt = GauntTable::new(kmax);
        // radial pair densities and their y_k potentials
        let pairs: Vec<(usize, usize)> = (0..nr).flat_map(|a| (a..nr).map(move |b| (a, b))).collect();
        let pair_data: Vec<(usize, Vec<f64>, Vec<(u32, Vec<f64>)>)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (fa, fb) = (&basis.radial[a], &basis.radial[b]);
                let rho = pair_density(&fa.p, &fa.q, &fb.p, &fb.q);
                let ys = multipole_range(fa.channel.kappa, fb.channel.kappa)
                    .map(|k| (k as u32, yk_potential(grid, &rho, k as u32)))
                    .collect();
                (pair_id(a, b, nr), rho, ys)
            })
            .collect();
        let w = grid.weights();
        let slater: HashMap<(u32, usize, usize), f64> = (0..pair_data.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let pair_data = &pair_data;
                (i..pair_data.len()).flat_map(move |j| {
                    let (pi, rho_i, ys_i) = &pair_data[i];
                    let (pj, rho_j, ys_j) = &pair_data[j];
                    ys_i.iter().filter_map(move |(k, yi)| {
                        let yj = &ys_j.iter().find(|(kk, _)| kk == k)?.1;
                        let a: f64 = (0..w.len()).map(|p| w[p] * rho_i[p] * yj[p]).sum();
                        let b: f64 = (0..w.len()).map(|p| w[p] * rho_j[p] * yi[p]).sum();
                        let v = 0.5 * (a + b);
                        Some([((*k, *pi, *pj), v), ((*k, *pj, *pi), v)])
                    })
                })
            })
            .flatten_iter()
            .collect();
        // spin-orbital pairs grouped by 2q = tm_b - tm_a with their angular factors
        let n = basis.len();
        let mut groups: HashMap<i32, Vec<(usize, usize, usize, Vec<(u32, f64)>)>> = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                let (oa, ob) = (basis.orbitals[a], basis.orbitals[b]);
                let (ka, kb) = (basis.radial[oa.radial].channel.kappa, basis.radial[ob.radial].channel.kappa);
                let factors: Vec<(u32, f64)> = multipole_range(ka, kb)
                    .map(|k| (k as u32, gaunt.get(kb, ob.tm, ka, oa.tm, k)))
                    .filter(|(_, g)| *g != 0.0)
                    .collect();
                if factors.is_empty() {
                    continue;
                }
                groups.entry(ob.tm - oa.tm).or_default().push((a, b, pair_id(oa.radial, ob.radial, nr), factors));
            }
        }
        let gaunt = &gaunt;
        let mut index = Vec::new();
        let mut value = Vec::new();
        for (q2, left) in &groups {
            let Some(right) = groups.get(&-q2) else { continue };
            let chunk: Vec<([u16; 4], f64)> = left
                .par_iter()
                .flat_map_iter(|(a, b, pab, fab)| {
                    let slater = &slater;
                    // entries (c, d) of the -q2 group have tm_c - tm_d = q2
                    right.iter().filter_map(move |(c, d, pcd, _)| {
                        let oc = basis.orbitals[*c];
                        let od = basis.orbitals[*d];
                        let (kc, kd) = (basis.radial[oc.radial].channel.kappa, basis.radial[od.radial].channel.kappa);
                        let mut v = 0.0;
                        for (k, g1) in fab {
                            let g2 = gaunt.get(kc, oc.tm, kd, od.tm, *k as i32);
                            if g2 == 0.0 {
                                continue;
                            }
                            v += g1 * g2 * slater.get(&(*k, *pab, *pcd)).copied().unwrap_or(0.0);
                        }
                        (v.abs() > 1e-16).then_some(([*a as u16, *b as u16, *c as u16, *d as u16], v))
                    })
                })
                .collect();
            for (i, v) in chunk {
                index.push(i);
                value.push(v);
            }
        }
        Self { n, index, value, slater, radial_count: nr }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nonzeros(&self) -> usize {
        self.value.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.index.iter().zip(&self.value).map(|(i, v)| ([i[0] as usize, i[1] as usize, i[2] as usize, i[3] as usize], *v))
    }

    /// `R^k` between radial pair densities `rho_ab` and `rho_cd`.
    pub fn slater(&self, k: u32, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.radial_count;
        self.slater.get(&(k, pair_id(a, b, n), pair_id(c, d, n))).copied().unwrap_or(0.0)
    }

    /// Direct and exchange matrices `J_ab = sum (ab|cd) D_dc`,
    /// `K_ab = sum (ad|cb) D_dc`.
    pub fn coulomb_exchange(&self, d: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
        let n = self.n;
        let chunk = (self.value.len() / rayon::current_num_threads().max(1)).max(4096);
        self.index
            .par_chunks(chunk)
            .zip(self.value.par_chunks(chunk))
            .map(|(idx, val)| {
                let mut j = DMatrix::<C64>::zeros(n, n);
                let mut k = DMatrix::<C64>::zeros(n, n);
                for (i, v) in idx.iter().zip(val) {
                    let (a, b, c, dd) = (i[0] as usize, i[1] as usize, i[2] as usize, i[3] as usize);
                    j[(a, b)] += d[(dd, c)] * *v;
                    k[(a, dd)] += d[(b, c)] * *v;
                }
                (j, k)
            })
            .reduce(|| (DMatrix::zeros(n, n), DMatrix::zeros(n, n)), |(j1, k1), (j2, k2)| (j1 + j2, k1 + k2))
    }

    /// Dense lookup of one integral (linear scan; for tests and small checks).
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let key = [a as u16, b as u16, c as u16, d as u16];
        self.index.iter().position(|i| *i == key).map_or(0.0, |p| self.value[p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{BasisSettings, OneParticleBasis};
    use crate::grid::GridSpec;
    use crate::nucleus::{NuclearModel, Potential};
    use crate::radial::RadialModel;
    use std::collections::HashMap as Map;

    fn setup() -> (OneParticleBasis, TwoElectronTensor) {
        let m = RadialModel::new(GridSpec::default(), Potential::Smeared(NuclearModel::new(0.5, 4).unwrap()), 100.0, 60)
            .unwrap();
        let settings = BasisSettings { kmax: 1, n_pos: 2, n_neg: 1, ..BasisSettings::default() };
        let b = OneParticleBasis::new(&m, &settings).unwrap();
        let t = TwoElectronTensor::new(&b);
        (b, t)
    }

    #[test]
    fn permutation_symmetry() {
        let (_, t) = setup();
        let map: Map<[usize; 4], f64> = t.entries().collect();
        for ([a, b, c, d], v) in t.entries() {
            let s = map.get(&[c, d, a, b]).copied().unwrap_or(0.0);
            let r = map.get(&[b, a, d, c]).copied().unwrap_or(0.0);
            assert!((v - s).abs() < 1e-12 && (v - r).abs() < 1e-12, "{a}{b}{c}{d}: {v} {s} {r}");
        }
    }

    #[test]
    fn closed_s_shell_is_plain_coulomb() {
        // two electrons in the lowest s_{1/2}: E_2 = (J - K) = F^0(1s,1s)
        let (b, t) = setup();
        let occ = b.level_orbitals(crate::radial::Channel { kappa: -1 }, 0);
        let n = b.len();
        let mut d = DMatrix::<C64>::zeros(n, n);
        for &i in &occ {
            d[(i, i)] = C64::new(1.0, 0.0);
        }
        let (j, k) = t.coulomb_exchange(&d);
        let e2 = 0.5 * ((j - k) * &d).trace().re;
        let f = &b.radial[0];
        let f0 = crate::coulomb::slater_integral(&b.model.grid, (&f.p, &f.q), (&f.p, &f.q), (&f.p, &f.q), (&f.p, &f.q), 0)
            .unwrap();
        assert!((e2 - f0).abs() < 1e-12, "{e2} {f0}");
    }

    #[test]
    fn interaction_is_nonnegative_on_random_sets() {
        use rand::SeedableRng;
        let (b, t) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = b.len();
        for _ in 0..5 {
            let u = crate::fock::random_unitary(n, &mut rng);
            let w = u.columns(0, 3).clone_owned();
            let d = &w * w.adjoint();
            let (j, k) = t.coulomb_exchange(&d);
            let jd = (&j * &d).trace();
            let kd = (&k * &d).trace();
            assert!(jd.im.abs() < 1e-12 && kd.im.abs() < 1e-12);
            assert!(jd.re - kd.re > 0.0 && kd.re >= -1e-14);
            assert!(((&j - j.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()))) < 1e-12);
        }
    }
}
