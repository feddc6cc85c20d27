//! The momentum-space resolvent average
//! `L(p) = ∫ (-iu + beta + alpha.p/c)^{-1} (-iu + 1)^{-1} du` of the free
//! Dirac operator, by quadrature and by residues.

use std::f64::consts::PI;

use nalgebra::Matrix4;

use crate::angular::su2::pauli;
use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::quadrature::adaptive_gk;

pub type Matrix4c = Matrix4<C64>;

#[derive(Debug, Clone)]
pub struct ResolventAverage {
    pub p: [f64; 3],
    pub c: f64,
    pub quadrature: Matrix4c,
    pub closed_form: Matrix4c,
}

impl ResolventAverage {
    /// Spectral norm of the difference of the two evaluations.
    pub fn discrepancy(&self) -> f64 {
        spectral_norm(&(self.quadrature - self.closed_form))
    }

    /// `||(2/pi) L - (beta - 1 + alpha.p/c)||`.
    pub fn expansion_remainder(&self) -> f64 {
        let leading = free_symbol(self.p, self.c) - Matrix4c::identity();
        spectral_norm(&(self.closed_form * C64::new(2.0 / PI, 0.0) - leading))
    }
}

pub fn spectral_norm(m: &Matrix4c) -> f64 {
    m.singular_values().max()
}

pub fn beta() -> Matrix4c {
    Matrix4c::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0).map(|x| C64::new(x, 0.0)))
}

/// `alpha_k = [[0, sigma_k], [sigma_k, 0]]`.
pub fn alpha() -> [Matrix4c; 3] {
    pauli().map(|s| {
        let mut a = Matrix4c::zeros();
        a.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
        a.fixed_view_mut::<2, 2>(2, 0).copy_from(&s);
        a
    })
}

/// `beta + alpha.p/c`.
pub fn free_symbol(p: [f64; 3], c: f64) -> Matrix4c {
    let a = alpha();
    let mut d = beta();
    for k in 0..3 {
        d += a[k] * C64::new(p[k] / c, 0.0);
    }
    d
}

/// Residue evaluation: only the pole of the negative branch lies in the
/// upper half plane, giving `-2 pi Lambda_- / (1 + omega)` with
/// `omega = sqrt(1 + |p|^2/c^2)`.
pub fn resolvent_closed_form(p: [f64; 3], c: f64) -> Matrix4c {
    let omega = (1.0 + (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (c * c)).sqrt();
    let d = free_symbol(p, c);
    let lambda_minus = (Matrix4c::identity() - d * C64::new(1.0 / omega, 0.0)) * C64::new(0.5, 0.0);
    lambda_minus * C64::new(-2.0 * PI / (1.0 + omega), 0.0)
}

/// Quadrature with `u = tan(t)` over `t in (-pi/2, pi/2)`; the mapped
/// integrand is bounded, so no tail correction is needed.
pub fn resolvent_quadrature(p: [f64; 3], c: f64, tol: f64) -> Result<Matrix4c> {
    let d = free_symbol(p, c);
    let integrand = |t: f64| -> Vec<f64> {
        let u = t.tan();
        let jac = 1.0 + u * u;
        let z = C64::new(0.0, -u);
        let m = (d + Matrix4c::identity() * z).try_inverse().unwrap_or_else(Matrix4c::zeros);
        let s = C64::new(jac, 0.0) / (z + 1.0);
        (m * s).iter().flat_map(|v| [v.re, v.im]).collect()
    };
    let half = 0.5 * PI;
    let v = adaptive_gk(integrand, -half, half, 32, tol, 0.0)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(LabError::Quadrature("non-finite resolvent average".into()));
    }
    Ok(Matrix4c::from_iterator((0..16).map(|i| C64::new(v[2 * i], v[2 * i + 1]))))
}

pub fn resolvent_average(p: [f64; 3], c: f64) -> Result<ResolventAverage> {
    Ok(ResolventAverage { p, c, quadrature: resolvent_quadrature(p, c, 1e-11)?, closed_form: resolvent_closed_form(p, c) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_momentum_gives_beta_minus_one() {
        let r = resolvent_average([0.0; 3], 100.0).unwrap();
        assert!(r.discrepancy() < 1e-8, "{}", r.discrepancy());
        let target = beta() - Matrix4c::identity();
        assert!(spectral_norm(&(r.quadrature * C64::new(2.0 / PI, 0.0) - target)) < 1e-8);
    }

    #[test]
    fn two_evaluations_agree_for_random_momenta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = [rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)];
            let r = resolvent_average(p, 100.0).unwrap();
            assert!(r.discrepancy() < 1e-8, "{p:?} {}", r.discrepancy());
        }
    }

    #[test]
    fn expansion_remainder_is_quadratic() {
        for x in [0.02, 0.05, 0.1] {
            let p = [x * 100.0 * 0.6, 0.0, x * 100.0 * 0.8];
            let r = resolvent_average(p, 100.0).unwrap();
            assert!(r.expansion_remainder() <= 2.0 * x * x, "{x}: {}", r.expansion_remainder());
            assert!(r.expansion_remainder() > 0.1 * x * x);
        }
    }
}
