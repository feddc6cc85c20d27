//! Maximization check along the negative-energy fiber: rotations mixing the
//! occupied orbitals with negative eigenvectors of their own mean field.
//!
//! With `psi_i -> psi_i + sum_a t_ai n_a` (and re-orthonormalization) the
//! energy expands as `E0 + g.t + t^T M t + O(t^3)` in the real parameters
//! `(Re t, Im t)`; a critical point that is a maximum in these directions has
//! `g = 0` and `M` negative definite.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::angular::C64;
use crate::error::Result;
use crate::fock::energy::{check_gram, trace_product};
use crate::fock::meanfield::{hermitize, mean_field};
use crate::fock::occupied::OccupiedSet;
use crate::fock::DfSystem;

#[derive(Debug, Clone)]
pub struct FiberReport {
    pub gradient_norm: f64,
    /// largest eigenvalue of the quadratic form, per unit `|t|^2`
    pub max_curvature: f64,
    pub parameters: usize,
    pub critical: bool,
    pub local_max: bool,
}

impl FiberReport {
    pub fn margin(&self) -> f64 {
        -self.max_curvature
    }
}

/// Gradient and quadratic form of the energy along the negative fiber.
pub fn fiber_expansion(sys: &DfSystem, w: &OccupiedSet, kappa: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_gram(w)?;
    let mf = mean_field(sys, w, kappa)?;
    let f = &mf.shifted;
    let v = mf.negative_basis();
    let wc = &w.coefficients;
    let (nv, no) = (v.ncols(), wc.ncols());
    let f_vv = hermitize(&(v.adjoint() * f * &v));
    let f_oo = hermitize(&(wc.adjoint() * f * wc));
    let np = 2 * nv * no;
    let unit = |p: usize| -> DMatrix<C64> {
        let mut t = DMatrix::zeros(nv, no);
        let (q, imag) = (p / 2, p % 2 == 1);
        t[(q % nv, q / nv)] = if imag { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
        t
    };
    let deltas: Vec<DMatrix<C64>> = (0..np)
        .map(|p| {
            let x = &v * unit(p) * wc.adjoint();
            &x + x.adjoint()
        })
        .collect();
    let fields: Vec<DMatrix<C64>> = deltas
        .par_iter()
        .map(|d| {
            let (j, k) = sys.tensor.coulomb_exchange(d);
            j - k
        })
        .collect();
    let g = DVector::from_iterator(np, deltas.iter().map(|d| trace_product(f, d).re));
    let mut m = DMatrix::zeros(np, np);
    for p in 0..np {
        let tp = unit(p);
        for q in p..np {
            let tq = unit(q);
            let one_body = trace_product(&tp.adjoint(), &(&f_vv * &tq)).re - trace_product(&(tp.adjoint() * &tq), &f_oo).re;
            let one_body_t = trace_product(&tq.adjoint(), &(&f_vv * &tp)).re - trace_product(&(tq.adjoint() * &tp), &f_oo).re;
            let two_body = 0.5 * kappa * trace_product(&fields[p], &deltas[q]).re;
            let val = 0.5 * (one_body + one_body_t) + two_body;
            m[(p, q)] = val;
            m[(q, p)] = val;
        }
    }
    Ok((g, m))
}

/// `gradient_tol` decides criticality.
pub fn fiber_max_check(sys: &DfSystem, w: &OccupiedSet, kappa: f64, gradient_tol: f64) -> Result<FiberReport> {
    let (g, m) = fiber_expansion(sys, w, kappa)?;
    let max_curvature = m.symmetric_eigenvalues().iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
    let gradient_norm = g.norm();
    let critical = gradient_norm <= gradient_tol;
    Ok(FiberReport {
        gradient_norm,
        max_curvature,
        parameters: g.len(),
        critical,
        local_max: critical && max_curvature < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::energy::energy_difference;
    use crate::fock::scf::{aufbau_start, scf_selfconsistent, ScfOptions};
    use crate::fock::test_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn expansion_matches_finite_differences() {
        let sys = test_system();
        let kappa = 0.3;
        let w = aufbau_start(&sys, 2).unwrap();
        let (g, m) = fiber_expansion(&sys, &w, kappa).unwrap();
        let mf = mean_field(&sys, &w, kappa).unwrap();
        let v = mf.negative_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dir: Vec<f64> = (0..g.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let dir = DVector::from_vec(dir).normalize();
        let energy_at = |s: f64| {
            let mut t = DMatrix::<C64>::zeros(v.ncols(), 2);
            for p in 0..dir.len() {
                let q = p / 2;
                let z = if p % 2 == 1 { C64::new(0.0, dir[p]) } else { C64::new(dir[p], 0.0) };
                t[(q % v.ncols(), q / v.ncols())] += z * s;
            }
            let moved = OccupiedSet::new(&w.coefficients + &v * t, "moved").unwrap();
            energy_difference(&sys, &w, &moved, kappa).unwrap()
        };
        let s = 1e-4;
        let (ep, em) = (energy_at(s), energy_at(-s));
        let slope = (ep - em) / (2.0 * s);
        let curv = (ep + em) / (2.0 * s * s);
        let predicted = (dir.transpose() * &m * &dir)[(0, 0)];
        assert!((slope - g.dot(&dir)).abs() < 1e-6 * (1.0 + slope.abs()), "{slope} {}", g.dot(&dir));
        assert!((curv - predicted).abs() < 1e-5 * predicted.abs(), "{curv} {predicted}");
    }

    #[test]
    fn linear_and_closed_shell_solutions_are_fiber_maxima() {
        let sys = test_system();
        let c2 = sys.c() * sys.c();
        let w = aufbau_start(&sys, 2).unwrap();
        let r0 = fiber_max_check(&sys, &w, 0.0, 1e-8).unwrap();
        assert!(r0.local_max && r0.margin() > c2);
        let scf = scf_selfconsistent(&sys, 2, 1e-2, &w, &ScfOptions::default()).unwrap();
        let r = fiber_max_check(&sys, &scf.occupied, 1e-2, 1e-6).unwrap();
        assert!(r.local_max && r.margin() >= 0.5 * c2, "{r:?}");
    }

    #[test]
    fn non_critical_set_is_rejected() {
        let sys = test_system();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = aufbau_start(&sys, 2).unwrap();
        let mut c = w.coefficients.clone();
        for a in 0..sys.dim() {
            c[(a, 0)] += C64::new(0.05 * { let x: f64 = StandardNormal.sample(&mut rng); x }, 0.0);
        }
        let bent = OccupiedSet::new(c, "bent").unwrap();
        let r = fiber_max_check(&sys, &bent, 1e-2, 1e-6).unwrap();
        assert!(!r.critical && r.gradient_norm > 1e-3);
    }
}
