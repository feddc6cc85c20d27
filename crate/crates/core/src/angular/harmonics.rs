//! Spherical harmonics (Condon-Shortley phase), spinor spherical harmonics and
//! a product Gauss rule on the unit sphere.

use std::f64::consts::PI;

use super::su2::C64;
use super::threej::clebsch_gordan;
use crate::quadrature::gauss_legendre;

fn factorial(n: i32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Associated Legendre `P_l^m(x)`, `m >= 0`, including the `(-1)^m` phase.
pub fn assoc_legendre(l: i32, m: i32, x: f64) -> f64 {
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = (x * (2 * ll - 1) as f64 * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

pub fn spherical_harmonic(l: i32, m: i32, theta: f64, phi: f64) -> C64 {
    if m.abs() > l || l < 0 {
        return C64::new(0.0, 0.0);
    }
    let am = m.abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    let y = C64::from_polar(norm * assoc_legendre(l, am, theta.cos()), am as f64 * phi);
    if m >= 0 {
        y
    } else if am % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// Orbital angular momentum of the spinor harmonic with label `kappa`.
pub fn kappa_l(kappa: i32) -> i32 {
    if kappa < 0 {
        -kappa - 1
    } else {
        kappa
    }
}

/// `Omega_{kappa m}` with `tm = 2m`, as (spin up, spin down) components.
pub fn spinor_harmonic(kappa: i32, tm: i32, theta: f64, phi: f64) -> [C64; 2] {
    let l = kappa_l(kappa);
    let tj = 2 * kappa.abs() - 1;
    let mut out = [C64::new(0.0, 0.0); 2];
    for (s, ts) in [(0usize, 1i32), (1, -1)] {
        let tml = tm - ts;
        if tml.abs() > 2 * l {
            continue;
        }
        let cg = clebsch_gordan(2 * l, tml, 1, ts, tj, tm);
        out[s] = spherical_harmonic(l, tml / 2, theta, phi) * cg;
    }
    out
}

/// Product rule on S^2: Gauss-Legendre in cos(theta), uniform in phi. Exact
/// for spherical polynomials of degree below `min(2 n_theta, n_phi)`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            for k in 0..n_phi {
                points.push((xi.acos(), 2.0 * PI * k as f64 / n_phi as f64));
                weights.push(wi * 2.0 * PI / n_phi as f64);
            }
        }
        Self { points, weights }
    }

    /// Rule exact for degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1, degree + 1)
    }

    pub fn unit_vectors(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
            .collect()
    }
}

/// Polar angles of a unit vector.
pub fn angles(x: [f64; 3]) -> (f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    ((x[2] / r).clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        let (t, p) = (0.7f64, 1.3f64);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert!((spherical_harmonic(1, 0, t, p).re - y10).abs() < 1e-15);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * t.sin() * C64::from_polar(1.0, p);
        assert!((spherical_harmonic(1, 1, t, p) - y11).norm() < 1e-15);
        let y1m1 = (3.0 / (8.0 * PI)).sqrt() * t.sin() * C64::from_polar(1.0, -p);
        assert!((spherical_harmonic(1, -1, t, p) - y1m1).norm() < 1e-15);
    }

    #[test]
    fn orthonormality_under_sphere_rule() {
        let rule = SphereRule::for_degree(12);
        for (l1, m1, l2, m2) in [(2, 1, 2, 1), (3, -2, 3, -2), (2, 1, 3, 1), (4, 0, 2, 0), (1, 1, 1, -1)] {
            let s: C64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(&(t, p), w)| spherical_harmonic(l1, m1, t, p).conj() * spherical_harmonic(l2, m2, t, p) * w)
                .sum();
            let expected = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((s - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn spinor_harmonics_orthonormal() {
        let rule = SphereRule::for_degree(10);
        let labels = [(-1, 1), (-1, -1), (1, 1), (-2, 3), (2, -1), (-3, 5)];
        for &(ka, ma) in &labels {
            for &(kb, mb) in &labels {
                let s: C64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&(t, p), w)| {
                        let a = spinor_harmonic(ka, ma, t, p);
                        let b = spinor_harmonic(kb, mb, t, p);
                        (a[0].conj() * b[0] + a[1].conj() * b[1]) * w
                    })
                    .sum();
                let expected = if (ka, ma) == (kb, mb) { 1.0 } else { 0.0 };
                assert!((s - expected).norm() < 1e-13, "{ka} {ma} {kb} {mb}");
            }
        }
    }

    #[test]
    fn sigma_r_maps_kappa_to_minus_kappa() {
        // (sigma . x) Omega_{kappa m} = -Omega_{-kappa m}
        for &(k, m) in &[(-1, 1), (1, -1), (-2, 3), (2, 1)] {
            for &(t, p) in &[(0.3, 0.2), (1.9, -2.0), (2.5, 4.0)] {
                let x = [f64::sin(t) * f64::cos(p), f64::sin(t) * f64::sin(p), f64::cos(t)];
                let o = spinor_harmonic(k, m, t, p);
                let up = o[0] * x[2] + o[1] * C64::new(x[0], -x[1]);
                let dn = o[0] * C64::new(x[0], x[1]) - o[1] * x[2];
                let other = spinor_harmonic(-k, m, t, p);
                assert!((up + other[0]).norm() < 1e-13 && (dn + other[1]).norm() < 1e-13, "{k} {m}");
            }
        }
    }
}
