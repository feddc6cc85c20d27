//! Certificate that a minimizing Dirac-Fock solution does not minimize the
//! energy inside its own positive spectral subspace.
//!
//! For a rotation A, `A•W*` has the same energy as `W*`. Projecting it into
//! `ran P^+_{W*}` removes a negative-energy component `X = P^-_{W*}(A•W*)`,
//! and the energy drops by about `2c^2 |X|^2`. The drop is evaluated from the
//! exact expansion in `X`, so values far below `c^2 * eps_machine` stay
//! meaningful.

use nalgebra::DMatrix;

use crate::angular::{RotationSU2, C64};
use crate::error::Result;
use crate::fock::energy::trace_product;
use crate::fock::{
    energy_difference, mean_field, projected_minimize, rotate_occupied, DfSystem, OccupiedSet, ScfOptions, SpectralGraph,
};

#[derive(Debug, Clone)]
pub struct RotationGap {
    pub rotation: String,
    /// `||P^-_{W*}(A•W*)||` (Frobenius)
    pub leak: f64,
    /// `E(W*) - E(W')`, with `W'` the normalized projection of `A•W*`
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub kappa: f64,
    /// best lower bound on `E(W*) - inf_{ran P^+_{W*}} E`
    pub gap: f64,
    pub best_rotation: String,
    pub per_rotation: Vec<RotationGap>,
    /// energy change of a projected minimization started at the best `W'`
    /// (round-off level; reported, not added to the gap)
    pub relaxation: f64,
}

/// `E(W') - E(V)` for `W' = (V - X)(I - X^*X)^{-1/2}`, `X = P^- V`, from the
/// expansion in `X`; `f_v` is the shifted mean field of `V`.
fn projection_energy_change(sys: &DfSystem, v: &OccupiedSet, x: &DMatrix<C64>, f_v: &DMatrix<C64>, kappa: f64) -> f64 {
    let vc = &v.coefficients;
    let s = x.adjoint() * x;
    // (I - S)^{-1} - I as a short series; |S| is tiny
    let z = &s + &s * &s + &s * &s * &s;
    let m = f_v * vc;
    let vfv = vc.adjoint() * &m;
    let xfx = x.adjoint() * f_v * x;
    let xm = x.adjoint() * &m;
    let inner = &vfv - &xm - xm.adjoint() + &xfx;
    let one = -2.0 * trace_product(&m.adjoint(), x).re + xfx.trace().re + trace_product(&z, &inner).re;
    let vx = vc - x;
    let delta = -(x * vc.adjoint()) - vc * x.adjoint() + x * x.adjoint() + &vx * &z * vx.adjoint();
    let (j, k) = sys.tensor.coulomb_exchange(&delta);
    one + 0.5 * kappa * trace_product(&(j - k), &delta).re
}

pub fn gap_certificate(
    sys: &DfSystem,
    w_star: &OccupiedSet,
    kappa: f64,
    candidates: &[(String, RotationSU2)],
    opts: &ScfOptions,
) -> Result<GapCertificate> {
    let mf = mean_field(sys, w_star, kappa)?;
    let graph = SpectralGraph::new(sys, &mf.shifted)?;
    let w = graph.project_onto_graph(w_star)?;
    let mut per_rotation = Vec::new();
    let mut best: Option<(f64, OccupiedSet, String)> = None;
    for (name, a) in candidates {
        let v = rotate_occupied(&sys.basis, &w, a);
        let x = graph.negative_part(&v.coefficients);
        let f_v = mean_field(sys, &v, kappa)?.shifted;
        let gap = -projection_energy_change(sys, &v, &x, &f_v, kappa);
        per_rotation.push(RotationGap { rotation: name.clone(), leak: x.norm(), gap });
        if best.as_ref().is_none_or(|b| gap > b.0) {
            let projected = OccupiedSet::new(&v.coefficients - &x, "projected rotation")?;
            best = Some((gap, projected, name.clone()));
        }
    }
    let (gap, start, best_rotation) = best.unwrap_or((0.0, w.clone(), "none".into()));
    let gap = gap.max(0.0);
    let relaxation = match projected_minimize(sys, &mf.positive_basis(), w.n_electrons(), kappa, Some(&start), opts) {
        Ok(r) => energy_difference(sys, &start, &r.occupied, kappa)?,
        Err(_) => f64::NAN,
    };
    Ok(GapCertificate { kappa, gap, best_rotation, per_rotation, relaxation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{aufbau_start, scf_selfconsistent, test_system};

    fn solve(n: usize, kappa: f64) -> (DfSystem, OccupiedSet) {
        let sys = test_system();
        let start = aufbau_start(&sys, n).unwrap();
        let r = scf_selfconsistent(&sys, n, kappa, &start, &ScfOptions::default()).unwrap();
        (sys, r.occupied)
    }

    #[test]
    fn closed_shell_has_no_gap() {
        let (sys, w) = solve(2, 1e-2);
        let cert = gap_certificate(&sys, &w, 1e-2, &RotationSU2::candidates(), &ScfOptions::default()).unwrap();
        let e = crate::fock::df_energy(&sys, &w, 1e-2).unwrap().total;
        assert!(cert.gap <= 1e-8 * e.abs(), "{}", cert.gap);
    }

    #[test]
    fn open_shell_gap_matches_leak() {
        let (sys, w) = solve(3, 1e-2);
        let cert = gap_certificate(&sys, &w, 1e-2, &RotationSU2::candidates(), &ScfOptions::default()).unwrap();
        assert!(cert.gap > 0.0);
        let c2 = sys.c() * sys.c();
        for r in cert.per_rotation.iter().filter(|r| r.leak > 1e-12) {
            let model = 2.0 * c2 * r.leak * r.leak;
            assert!(r.gap > 0.5 * model && r.gap < 2.0 * model, "{}: {} vs {}", r.rotation, r.gap, model);
        }
    }

    #[test]
    fn linear_problem_has_no_gap() {
        let (sys, w) = solve(3, 0.0);
        let cert = gap_certificate(&sys, &w, 0.0, &RotationSU2::candidates(), &ScfOptions::default()).unwrap();
        assert!(cert.gap < 1e-20, "{}", cert.gap);
    }
}
