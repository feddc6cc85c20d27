//! Multipole Hartree potentials and electrostatic fields of densities given
//! as spherical-harmonic expansions `rho(x) = sum rho_kq(r) Y_kq(x/|x|)`.

use std::f64::consts::PI;

use crate::angular::harmonics::{spherical_harmonic, SphereRule};
use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::grid::RadialGrid;

#[derive(Debug, Clone)]
pub struct DensityExpansion {
    pub lmax: usize,
    /// ((k, q), rho_kq at the quadrature points)
    pub terms: Vec<((i32, i32), Vec<C64>)>,
}

impl DensityExpansion {
    /// Project a density sampled as `f(point index, theta, phi)` onto
    /// harmonics up to `lmax`; exact when `f` is band limited to `lmax`.
    pub fn project<F>(grid: &RadialGrid, lmax: usize, f: F) -> Self
    where
        F: Fn(usize, f64, f64) -> C64 + Sync,
    {
        use rayon::prelude::*;
        let rule = SphereRule::for_degree(2 * lmax);
        let ylm: Vec<Vec<C64>> = (0..=lmax as i32)
            .flat_map(|k| (-k..=k).map(move |q| (k, q)))
            .map(|(k, q)| rule.points.iter().map(|&(t, p)| spherical_harmonic(k, q, t, p).conj()).collect())
            .collect();
        let n_terms = ylm.len();
        let per_point: Vec<Vec<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|p| {
                let vals: Vec<C64> = rule.points.iter().map(|&(t, ph)| f(p, t, ph)).collect();
                (0..n_terms)
                    .map(|i| vals.iter().zip(&ylm[i]).zip(&rule.weights).map(|((v, y), w)| v * y * w).sum())
                    .collect()
            })
            .collect();
        let labels = (0..=lmax as i32).flat_map(|k| (-k..=k).map(move |q| (k, q)));
        let terms = labels.enumerate().map(|(i, kq)| (kq, per_point.iter().map(|v| v[i]).collect())).collect();
        Self { lmax, terms }
    }

    /// Total charge `∫ rho d^3x`.
    pub fn charge(&self, grid: &RadialGrid) -> C64 {
        self.terms
            .iter()
            .find(|(kq, _)| *kq == (0, 0))
            .map(|(_, v)| {
                (0..grid.len()).map(|i| v[i] * grid.weights()[i] * grid.points()[i].powi(2)).sum::<C64>() * (4.0 * PI).sqrt()
            })
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct MultipoleField {
    /// ((k, q), u_kq, du_kq/dr) at the quadrature points
    pub terms: Vec<((i32, i32), Vec<C64>, Vec<C64>)>,
    radii: Vec<f64>,
}

fn cumulative_complex(grid: &RadialGrid, v: &[C64], forward: bool) -> Vec<C64> {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let (a, b) = if forward {
        (grid.cumulative_from_origin(&re), grid.cumulative_from_origin(&im))
    } else {
        (grid.cumulative_to_box(&re), grid.cumulative_to_box(&im))
    };
    a.iter().zip(&b).map(|(x, y)| C64::new(*x, *y)).collect()
}

/// Potential `u_kq` of each multipole, with
/// `u = 4pi/(2k+1) [r^{-(k+1)} ∫_0^r s^{k+2} rho + r^k ∫_r^R s^{1-k} rho]`.
pub fn hartree_multipoles(grid: &RadialGrid, density: &DensityExpansion, lmax: usize) -> Result<MultipoleField> {
    if density.lmax > lmax {
        return Err(LabError::LmaxExceeded { requested: density.lmax, lmax });
    }
    let r = grid.points();
    let terms = density
        .terms
        .iter()
        .map(|&((k, q), ref rho)| {
            let inner: Vec<C64> = rho.iter().zip(r).map(|(v, s)| v * s.powi(k + 2)).collect();
            let outer: Vec<C64> = rho.iter().zip(r).map(|(v, s)| v * s.powi(1 - k)).collect();
            let a = cumulative_complex(grid, &inner, true);
            let b = cumulative_complex(grid, &outer, false);
            let f = 4.0 * PI / (2 * k + 1) as f64;
            let kf = k as f64;
            let u = (0..r.len()).map(|i| (a[i] * r[i].powi(-(k + 1)) + b[i] * r[i].powi(k)) * f).collect();
            let du = (0..r.len())
                .map(|i| (a[i] * (-(kf + 1.0) * r[i].powi(-(k + 2))) + b[i] * (kf * r[i].powi(k - 1))) * f)
                .collect();
            ((k, q), u, du)
        })
        .collect();
    Ok(MultipoleField { terms, radii: r.to_vec() })
}

/// Same tables as [`hartree_multipoles`]; the field `-grad Phi` is read off
/// with [`MultipoleField::field_at`].
pub fn field_convolution(grid: &RadialGrid, density: &DensityExpansion) -> Result<MultipoleField> {
    hartree_multipoles(grid, density, density.lmax)
}

/// `d Y_lm / d theta`.
pub fn dtheta_harmonic(l: i32, m: i32, theta: f64, phi: f64) -> C64 {
    let mut v = spherical_harmonic(l, m, theta, phi) * (m as f64 * theta.cos() / theta.sin());
    if m < l {
        let c = (((l - m) * (l + m + 1)) as f64).sqrt();
        v += C64::from_polar(c, -phi) * spherical_harmonic(l, m + 1, theta, phi);
    }
    v
}

impl MultipoleField {
    pub fn potential_at(&self, p: usize, theta: f64, phi: f64) -> C64 {
        self.terms.iter().map(|((k, q), u, _)| u[p] * spherical_harmonic(*k, *q, theta, phi)).sum()
    }

    /// Cartesian components of `-grad Phi` at quadrature radius `p`.
    pub fn field_at(&self, p: usize, theta: f64, phi: f64) -> [C64; 3] {
        let r = self.radii[p];
        let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
        let mut er = C64::default();
        let mut et = C64::default();
        let mut ep = C64::default();
        for ((k, q), u, du) in &self.terms {
            let y = spherical_harmonic(*k, *q, theta, phi);
            er += du[p] * y;
            et += u[p] / r * dtheta_harmonic(*k, *q, theta, phi);
            ep += u[p] / (r * st) * C64::new(0.0, *q as f64) * y;
        }
        [
            -(er * (st * cp) + et * (ct * cp) - ep * sp),
            -(er * (st * sp) + et * (ct * sp) + ep * cp),
            -(er * ct - et * st),
        ]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::quadrature::{adaptive_gk, gauss_legendre};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> RadialGrid {
        RadialGrid::new(GridSpec::default(), 0.5).unwrap()
    }

    #[test]
    fn monopole_tail_and_gauss_law() {
        let g = grid();
        // e^{-r} / (8 pi) has unit charge
        let d = DensityExpansion::project(&g, 0, |p, _, _| C64::new((-g.points()[p]).exp() / (8.0 * PI), 0.0));
        assert!((d.charge(&g).re - 1.0).abs() < 1e-12);
        let f = hartree_multipoles(&g, &d, 6).unwrap();
        for (p, &r) in g.points().iter().enumerate().filter(|(_, r)| **r > 40.0) {
            assert!((f.potential_at(p, 0.4, 0.1).re - 1.0 / r).abs() < 1e-8);
            let e = f.field_at(p, 0.4, 0.1);
            let mag = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((mag * r * r - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn dipole_density_has_no_monopole() {
        let g = grid();
        let d = DensityExpansion::project(&g, 1, |p, t, _| C64::new((-g.points()[p]).exp() * t.cos(), 0.0));
        let f = hartree_multipoles(&g, &d, 6).unwrap();
        let u00 = &f.terms.iter().find(|(kq, _, _)| *kq == (0, 0)).unwrap().1;
        assert!(u00.iter().all(|z| z.norm() < 1e-14));
        assert!(hartree_multipoles(&g, &d, 0).is_err());
        let zero = DensityExpansion::project(&g, 2, |_, _, _| C64::default());
        let fz = field_convolution(&g, &zero).unwrap();
        assert!(fz.field_at(100, 1.0, 2.0).iter().all(|z| z.norm() == 0.0));
    }

    /// Potential on the z axis of rho = f(s) P_k(cos theta) by nested adaptive
    /// quadrature over (s, cos theta'), no multipole expansion involved.
    fn direct_potential(f: &dyn Fn(f64) -> f64, k: usize, z: f64) -> f64 {
        let legendre = |x: f64| crate::quadrature::legendre_all(k, x)[k];
        let angular = |s: f64| {
            adaptive_gk(
                |c| vec![2.0 * PI * legendre(c) / (z * z + s * s - 2.0 * z * s * c).max(1e-300).sqrt()],
                -1.0,
                1.0,
                1,
                1e-12,
                1e-11,
            )
            .unwrap()[0]
        };
        let radial = |a: f64, b: f64| adaptive_gk(|s| vec![s * s * f(s) * angular(s)], a, b, 1, 1e-11, 1e-10).unwrap()[0];
        radial(0.0, z) + radial(z, 60.0)
    }

    #[test]
    fn potential_matches_direct_quadrature() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in [0usize, 1, 2] {
            let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = move |s: f64| (c[0] + c[1] * s + c[2] * s * s) * s.powi(k as i32) * (-1.5 * s).exp();
            let d = DensityExpansion::project(&g, k, |p, t, _| {
                C64::new(f(g.points()[p]) * crate::quadrature::legendre_all(k, t.cos())[k], 0.0)
            });
            let field = hartree_multipoles(&g, &d, 6).unwrap();
            for p in [150, 300, 450, 600, 800] {
                let r = g.points()[p];
                let direct = direct_potential(&f, k, r);
                let ours = field.potential_at(p, 0.0, 0.0).re;
                assert!((ours - direct).abs() < 1e-6 * (1.0 + direct.abs()), "k={k} r={r} {ours} {direct}");
            }
        }
    }

    #[test]
    fn field_matches_finite_differences() {
        let g = grid();
        let d = DensityExpansion::project(&g, 2, |p, t, ph| {
            let r = g.points()[p];
            C64::new((-r).exp() * (1.0 + 0.3 * t.cos() + 0.2 * t.sin() * t.sin() * (2.0 * ph).cos()), 0.4 * r * (-r).exp() * t.sin() * ph.sin())
        });
        let f = field_convolution(&g, &d).unwrap();
        // radial derivative by Lagrange differentiation on the Gauss points of one interval
        let order = g.order();
        let (x, _) = gauss_legendre(order);
        let iv = 40;
        let nodes = g.nodes();
        let half = 0.5 * (nodes[iv + 1] - nodes[iv]);
        let (t, ph) = (1.1, 0.7);
        let vals: Vec<C64> = (0..order).map(|i| f.potential_at(iv * order + i, t, ph)).collect();
        for i in 0..order {
            let mut deriv = C64::default();
            for j in 0..order {
                // derivative of the j-th Lagrange polynomial at x_i
                let mut lj = 0.0;
                for m in 0..order {
                    if m == j {
                        continue;
                    }
                    let mut prod = 1.0 / (x[j] - x[m]);
                    for n in 0..order {
                        if n != j && n != m {
                            prod *= (x[i] - x[n]) / (x[j] - x[n]);
                        }
                    }
                    lj += prod;
                }
                deriv += vals[j] * (lj / half);
            }
            let p = iv * order + i;
            let r = g.points()[p];
            let e = f.field_at(p, t, ph);
            let (st, ct, sp, cp) = (f64::sin(t), f64::cos(t), f64::sin(ph), f64::cos(ph));
            let er = e[0] * (st * cp) + e[1] * (st * sp) + e[2] * ct;
            assert!((er + deriv).norm() < 1e-7, "{er} {deriv}");
            // angular components by central differences
            let h = 1e-5;
            let dt = (f.potential_at(p, t + h, ph) - f.potential_at(p, t - h, ph)) / (2.0 * h);
            let dp = (f.potential_at(p, t, ph + h) - f.potential_at(p, t, ph - h)) / (2.0 * h);
            let et = e[0] * (ct * cp) + e[1] * (ct * sp) - e[2] * st;
            let ep = -e[0] * sp + e[1] * cp;
            assert!((et + dt / r).norm() < 1e-7);
            assert!((ep + dp / (r * st)).norm() < 1e-7);
        }
    }
}
