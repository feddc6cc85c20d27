//! Angular matrix elements `<Omega_{ka ma}| C^k_q |Omega_{kb mb}>` with
//! `C^k_q = sqrt(4 pi / (2k+1)) Y_kq`. Magnetic labels are doubled.

use std::collections::HashMap;

use super::harmonics::kappa_l;
use super::threej::{three_j, triangle};

fn sign(e: i32) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduced matrix element `<ka || C^k || kb>`.
pub fn reduced_ck(ka: i32, kb: i32, k: i32) -> f64 {
    let (la, lb) = (kappa_l(ka), kappa_l(kb));
    let (tja, tjb) = (2 * ka.abs() - 1, 2 * kb.abs() - 1);
    if (la + lb + k) % 2 != 0 || !triangle(tja, 2 * k, tjb) {
        return 0.0;
    }
    sign((tja + 1) / 2) * (((tja + 1) * (tjb + 1)) as f64).sqrt() * three_j(tja, 2 * k, tjb, 1, 0, -1)
}

pub fn gaunt(ka: i32, tma: i32, kb: i32, tmb: i32, k: i32, q: i32) -> f64 {
    if tma != 2 * q + tmb {
        return 0.0;
    }
    let red = reduced_ck(ka, kb, k);
    if red == 0.0 {
        return 0.0;
    }
    let tja = 2 * ka.abs() - 1;
    let tjb = 2 * kb.abs() - 1;
    let v = sign((tja - tma) / 2) * three_j(tja, 2 * k, tjb, -tma, 2 * q, tmb) * red;
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

/// Allowed multipole orders between two channels.
pub fn multipole_range(ka: i32, kb: i32) -> impl Iterator<Item = i32> {
    let (tja, tjb) = (2 * ka.abs() - 1, 2 * kb.abs() - 1);
    let lo = (tja - tjb).abs() / 2;
    let hi = (tja + tjb) / 2;
    (lo..=hi).filter(move |k| (kappa_l(ka) + kappa_l(kb) + k) % 2 == 0)
}

/// Precomputed coefficients for all channels `|kappa| <= kmax`.
#[derive(Debug, Clone, Default)]
pub struct GauntTable {
    values: HashMap<(i32, i32, i32, i32, i32), f64>,
}

impl GauntTable {
    pub fn new(kmax: i32) -> Self {
        let kappas: Vec<i32> = (1..=kmax).flat_map(|k| [-k, k]).collect();
        let mut values = HashMap::new();
        for &ka in &kappas {
            for &kb in &kappas {
                let (tja, tjb) = (2 * ka.abs() - 1, 2 * kb.abs() - 1);
                for k in multipole_range(ka, kb) {
                    for tma in (-tja..=tja).step_by(2) {
                        for tmb in (-tjb..=tjb).step_by(2) {
                            let q2 = tma - tmb;
                            if q2.abs() > 2 * k {
                                continue;
                            }
                            let g = gaunt(ka, tma, kb, tmb, k, q2 / 2);
                            if g != 0.0 {
                                values.insert((ka, tma, kb, tmb, k), g);
                            }
                        }
                    }
                }
            }
        }
        Self { values }
    }

    /// Coefficient with `q = (tma - tmb)/2` implied.
    pub fn get(&self, ka: i32, tma: i32, kb: i32, tmb: i32, k: i32) -> f64 {
        self.values.get(&(ka, tma, kb, tmb, k)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
