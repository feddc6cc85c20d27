//! The field `f(A, phi) = (|A•phi|^2 * x.sigma/|x|^3) phi - (<A•phi, phi> * x.sigma/|x|^3) A•phi`
//! and the surface integral `I(r) = ∫_{S^2} <(x.sigma) phi, f>(r w) dw`.
//!
//! Densities are projected onto harmonics up to their exact degree and all
//! angular integrals use a product rule exact for the degree of the
//! integrand, so each radius carries only relative round-off; this is what
//! keeps the exponential tail meaningful.

use rayon::prelude::*;

use super::pauli::PauliOrbital;
use crate::angular::harmonics::SphereRule;
use crate::angular::su2::pauli;
use crate::angular::{RotationSU2, C64};
use crate::coulomb::multipole::{field_convolution, DensityExpansion};
use crate::error::Result;
use crate::grid::RadialGrid;

fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// `(v.sigma) s` for a complex vector `v`.
fn sigma_dot(v: &[C64; 3], s: &[C64; 2]) -> [C64; 2] {
    let sig = pauli();
    let mut out = [C64::new(0.0, 0.0); 2];
    for k in 0..3 {
        for i in 0..2 {
            out[i] += v[k] * (sig[k][(i, 0)] * s[0] + sig[k][(i, 1)] * s[1]);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct FField {
    pub rule: SphereRule,
    pub radii: Vec<f64>,
    /// f at every (radius, rule point)
    pub values: Vec<Vec<[C64; 2]>>,
    /// max over the sphere of the field of `|A•phi|^2` at each radius
    pub field_scale: Vec<f64>,
}

impl FField {
    /// `||f||` in L^2(R^3).
    pub fn norm(&self, grid: &RadialGrid) -> f64 {
        let per_r: Vec<f64> = self
            .values
            .iter()
            .zip(&self.radii)
            .map(|(v, r)| r * r * v.iter().zip(&self.rule.weights).map(|(f, w)| w * (f[0].norm_sqr() + f[1].norm_sqr())).sum::<f64>())
            .collect();
        grid.integrate(&per_r).sqrt()
    }
}

pub fn f_field(grid: &RadialGrid, phi: &PauliOrbital, a: &RotationSU2) -> Result<FField> {
    let aphi = phi.rotated(a);
    let l = phi.l() as usize;
    let lmax = 2 * l;
    let rho1 = DensityExpansion::project(grid, lmax, |p, t, ph| {
        let v = aphi.value(p, t, ph);
        C64::new(v[0].norm_sqr() + v[1].norm_sqr(), 0.0)
    });
    let rho2 = DensityExpansion::project(grid, lmax, |p, t, ph| inner(&aphi.value(p, t, ph), &phi.value(p, t, ph)));
    let e1 = field_convolution(grid, &rho1)?;
    let e2 = field_convolution(grid, &rho2)?;
    // |f|^2 has degree 2(3l + 1)
    let rule = SphereRule::for_degree(6 * l + 4);
    let radii = grid.points().to_vec();
    let rows: Vec<(Vec<[C64; 2]>, f64)> = (0..radii.len())
        .into_par_iter()
        .map(|p| {
            let mut scale = 0.0f64;
            let vals = rule
                .points
                .iter()
                .map(|&(t, ph)| {
                    let f1 = e1.field_at(p, t, ph);
                    let f2 = e2.field_at(p, t, ph);
                    scale = scale.max(f1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
                    let x = sigma_dot(&f1, &phi.value(p, t, ph));
                    let y = sigma_dot(&f2, &aphi.value(p, t, ph));
                    [x[0] - y[0], x[1] - y[1]]
                })
                .collect();
            (vals, scale)
        })
        .collect();
    let (values, field_scale) = rows.into_iter().unzip();
    Ok(FField { rule, radii, values, field_scale })
}

/// `I(r)` at every quadrature radius.
pub fn surface_integral(phi: &PauliOrbital, f: &FField) -> Vec<C64> {
    let dirs = f.rule.unit_vectors();
    (0..f.radii.len())
        .into_par_iter()
        .map(|p| {
            let r = f.radii[p];
            f.rule
                .points
                .iter()
                .zip(&dirs)
                .zip(&f.rule.weights)
                .zip(&f.values[p])
                .map(|((((t, ph), d), w), fv)| {
                    let x = [C64::new(r * d[0], 0.0), C64::new(r * d[1], 0.0), C64::new(r * d[2], 0.0)];
                    inner(&sigma_dot(&x, &phi.value(p, *t, *ph)), fv) * *w
                })
                .sum()
        })
        .collect()
}

/// `∫|phi|^2 - |∫<A•phi, phi>|`; the radial parts coincide, so only the
/// multiplet coefficients enter.
pub fn cauchy_schwarz_margin(phi: &PauliOrbital, a: &RotationSU2) -> f64 {
    let aphi = phi.rotated(a);
    phi.coefficients.norm_squared() - aphi.coefficients.dotc(&phi.coefficients).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::nucleus::{NuclearModel, Potential};
    use crate::propertyp::pauli::pauli_orbital;
    use crate::radial::RadialModel;
    use rand::SeedableRng;

    fn model() -> RadialModel {
        RadialModel::new(GridSpec::default(), Potential::Smeared(NuclearModel::new(0.5, 4).unwrap()), 100.0, 60).unwrap()
    }

    fn y_half() -> RotationSU2 {
        RotationSU2::candidates()[0].1
    }

    #[test]
    fn trivial_rotations_give_no_field() {
        let m = model();
        let phi = pauli_orbital(&m, -1, 1).unwrap();
        for a in [RotationSU2::identity(), RotationSU2::minus_identity()] {
            let f = f_field(&m.grid, &phi, &a).unwrap();
            assert!(f.norm(&m.grid) < 1e-14, "{}", f.norm(&m.grid));
            assert!(surface_integral(&phi, &f).iter().all(|z| z.norm() < 1e-14));
            assert!(cauchy_schwarz_margin(&phi, &a).abs() < 1e-14);
        }
    }

    #[test]
    fn s_orbital_with_quarter_turn_has_a_field() {
        let m = model();
        let phi = pauli_orbital(&m, -1, 1).unwrap();
        let f = f_field(&m.grid, &phi, &y_half()).unwrap();
        assert!(f.norm(&m.grid) > 1e-3);
        let margin = cauchy_schwarz_margin(&phi, &y_half());
        assert!(margin > 0.0 && margin <= 1.0);
    }

    #[test]
    fn phase_and_rotation_covariance() {
        let m = model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for (kappa, level) in [(-1, 1), (1, 0), (-2, 0)] {
            let phi = pauli_orbital(&m, kappa, level).unwrap();
            let a = y_half();
            let n0 = f_field(&m.grid, &phi, &a).unwrap().norm(&m.grid);
            let n1 = f_field(&m.grid, &phi.phased(0.7), &a).unwrap().norm(&m.grid);
            assert!((n0 - n1).abs() < 1e-12 * n0.max(1.0), "{n0} {n1}");
            let b = RotationSU2::random(&mut rng);
            let conj = b.compose(&a).compose(&b.inverse());
            let n2 = f_field(&m.grid, &phi.rotated(&b), &conj).unwrap().norm(&m.grid);
            assert!((n0 - n2).abs() < 1e-10 * n0.max(1.0), "kappa={kappa}: {n0} {n2}");
        }
    }

    #[test]
    fn surface_integral_decays() {
        let m = model();
        let phi = pauli_orbital(&m, -1, 1).unwrap();
        let f = f_field(&m.grid, &phi, &y_half()).unwrap();
        let i = surface_integral(&phi, &f);
        let n = i.len();
        let peak = i.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(i[n - 1].norm() < 1e-8 * peak);
    }
}
