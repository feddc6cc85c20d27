//! Projected and self-consistent Dirac-Fock iterations.
//!
//! Each step diagonalizes the mean field inside the admissible space (a fixed
//! projector range, or the positive range of the current mean field) and
//! fills the N lowest levels. Densities are mixed with the previous iterate
//! and purified back to a rank-N projector.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::fock::energy::{df_energy, energy_difference, EnergyBreakdown};
use crate::fock::meanfield::{hermitian_eigen, hermitize, mean_field, MeanFieldState};
use crate::fock::occupied::OccupiedSet;
use crate::fock::DfSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// weight kept from the previous density when mixing
    pub damping: f64,
    /// shift added to unoccupied levels before selecting the new occupied set
    pub level_shift: f64,
    /// Pulay history length; 0 gives plain damped iteration
    pub diis: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 300, damping: 0.3, level_shift: 0.0, diis: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    pub occupied: OccupiedSet,
    /// Lagrange multipliers shifted by `-c^2`, ascending
    pub multipliers: Vec<f64>,
    pub energy: EnergyBreakdown,
    pub mean_field: MeanFieldState,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    /// energy changes between successive iterates
    pub energy_steps: Vec<f64>,
    /// occupied multipliers are the N lowest admissible levels
    pub aufbau: bool,
    /// `||P^-_{kappa,W} W||` at the returned set
    pub negative_leak: f64,
}

impl ScfResult {
    /// Multipliers lie strictly between 0 and c^2.
    pub fn multipliers_in_gap(&self) -> bool {
        let c2 = self.energy.c * self.energy.c;
        self.multipliers.iter().all(|e| *e > -c2 && *e < 0.0)
    }
}

/// The N lowest positive linear levels; ties keep the basis order.
pub fn aufbau_start(sys: &DfSystem, n: usize) -> Result<OccupiedSet> {
    let h = sys.basis.h_shifted();
    let mut pos: Vec<usize> = (0..sys.dim()).filter(|&a| sys.basis.is_positive(a)).collect();
    if pos.len() < n {
        return Err(LabError::NotEnoughStates { requested: n, available: pos.len() });
    }
    pos.sort_by(|&a, &b| h[a].total_cmp(&h[b]).then(a.cmp(&b)));
    Ok(OccupiedSet::from_indices(sys.dim(), &pos[..n], "aufbau"))
}

/// Random perturbation of size `eps` inside the positive basis states.
pub fn perturbed_start<R: Rng>(sys: &DfSystem, w: &OccupiedSet, eps: f64, rng: &mut R) -> Result<OccupiedSet> {
    let mut c = w.coefficients.clone();
    for a in (0..sys.dim()).filter(|&a| sys.basis.is_positive(a)) {
        for i in 0..c.ncols() {
            c[(a, i)] += C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * eps;
        }
    }
    OccupiedSet::new(c, "perturbed")
}

/// Admissible space of one iteration.
enum Space<'a> {
    Fixed(&'a DMatrix<C64>),
    Positive,
}

/// Rank-N projector closest to a mixed density.
fn purify(d: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let (_, v) = hermitian_eigen(&hermitize(d));
    let k = v.ncols();
    v.columns(k - n, n).clone_owned()
}

struct Step {
    /// admissible orthonormal basis and the mean field restricted to it
    space: DMatrix<C64>,
    restricted: DMatrix<C64>,
}

fn admissible(mf: &MeanFieldState, space: &Space) -> Step {
    let u = match space {
        Space::Fixed(u) => (*u).clone(),
        Space::Positive => mf.positive_basis(),
    };
    let restricted = hermitize(&(u.adjoint() * &mf.shifted * &u));
    Step { space: u, restricted }
}

/// Energy-change threshold: `tol^2`, but never below the round-off of a sum
/// of N multipliers of order one.
fn energy_floor(tol: f64, n: usize) -> f64 {
    (tol * tol).max(64.0 * f64::EPSILON * n as f64)
}

/// `[F, D]` restricted to the admissible space.
fn commutator(f: &DMatrix<C64>, d: &DMatrix<C64>, u: &DMatrix<C64>, space: &Space) -> DMatrix<C64> {
    let c = f * d - d * f;
    match space {
        Space::Positive => c,
        Space::Fixed(_) => u.adjoint() * c * u,
    }
}

/// Pulay extrapolation of mean-field matrices from commutator residuals.
struct Diis {
    depth: usize,
    fock: Vec<DMatrix<C64>>,
    error: Vec<DMatrix<C64>>,
}

impl Diis {
    fn new(depth: usize) -> Self {
        Self { depth, fock: Vec::new(), error: Vec::new() }
    }

    fn clear(&mut self) {
        self.fock.clear();
        self.error.clear();
    }

    fn push(&mut self, f: &DMatrix<C64>, e: DMatrix<C64>) {
        if self.depth == 0 {
            return;
        }
        if self.fock.len() == self.depth {
            self.fock.remove(0);
            self.error.remove(0);
        }
        self.fock.push(f.clone());
        self.error.push(e);
    }

    fn extrapolate(&self) -> Option<DMatrix<C64>> {
        let m = self.fock.len();
        if m < 2 {
            return None;
        }
        let mut b = DMatrix::<f64>::zeros(m + 1, m + 1);
        let scale = self.error.iter().map(|e| e.norm_squared()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = self.error[i].iter().zip(self.error[j].iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>() / scale;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = nalgebra::DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let coef = b.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let mut f = DMatrix::<C64>::zeros(self.fock[0].nrows(), self.fock[0].ncols());
        for (fi, ci) in self.fock.iter().zip(coef.iter()) {
            f += fi * C64::new(*ci, 0.0);
        }
        Some(f)
    }
}

/// Orbitals of the N lowest admissible levels, virtuals raised by the level shift.
fn fill(step: &Step, w: &OccupiedSet, n: usize, level_shift: f64) -> Result<DMatrix<C64>> {
    let k = step.space.ncols();
    if k < n {
        return Err(LabError::NotEnoughStates { requested: n, available: k });
    }
    let x = step.space.adjoint() * &w.coefficients;
    let shifted = &step.restricted + (DMatrix::<C64>::identity(k, k) - &x * x.adjoint()) * C64::new(level_shift, 0.0);
    let (_, y) = hermitian_eigen(&shifted);
    Ok(&step.space * y.columns(0, n))
}

/// Residual `max_i ||P F P psi_i - eps_i psi_i||` for the occupied columns
/// and the multipliers (shifted), computed in the admissible space.
fn residual(step: &Step, w: &OccupiedSet) -> (f64, Vec<f64>) {
    let x = step.space.adjoint() * &w.coefficients;
    let fx = &step.restricted * &x;
    let proj = &x * (x.adjoint() * &fx);
    let r = (fx - proj).column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let small = hermitize(&(x.adjoint() * &step.restricted * &x));
    let (eps, _) = hermitian_eigen(&small);
    (r, eps.iter().copied().collect())
}

fn run(sys: &DfSystem, n: usize, kappa: f64, start: &OccupiedSet, space: Space, opts: &ScfOptions) -> Result<ScfResult> {
    if start.n_electrons() != n {
        return Err(LabError::InvalidParameter(format!("start has {} orbitals, expected {n}", start.n_electrons())));
    }
    if let Space::Fixed(u) = &space {
        if u.ncols() < n {
            return Err(LabError::NotEnoughStates { requested: n, available: u.ncols() });
        }
    }
    let mut w = start.clone();
    if let Space::Fixed(u) = &space {
        // start inside ran P
        let c = *u * (u.adjoint() * &w.coefficients);
        w = OccupiedSet::new(c, start.tag.clone())?;
    }
    let mut weight_new = 1.0 - opts.damping;
    let mut residuals = Vec::new();
    let mut steps = Vec::new();
    let mut diis = Diis::new(opts.diis);
    let mut mf = mean_field(sys, &w, kappa)?;
    for it in 1..=opts.max_iter {
        let step = admissible(&mf, &space);
        let d = w.density();
        diis.push(&mf.shifted, commutator(&mf.shifted, &d, &step.space, &space));
        let next = match diis.extrapolate() {
            Some(f) if it > 1 => {
                let restricted = hermitize(&(step.space.adjoint() * &f * &step.space));
                fill(&Step { space: step.space.clone(), restricted }, &w, n, opts.level_shift)?
            }
            _ => {
                let fresh = fill(&step, &w, n, opts.level_shift)?;
                if it == 1 {
                    fresh
                } else {
                    let mixed = &fresh * fresh.adjoint() * C64::new(weight_new, 0.0) + &d * C64::new(1.0 - weight_new, 0.0);
                    purify(&mixed, n)
                }
            }
        };
        let next = OccupiedSet::new(next, start.tag.clone())?;
        let de = energy_difference(sys, &w, &next, kappa)?;
        let floor = energy_floor(opts.tol, n);
        if de > floor && it > 1 {
            // energy rose: restart the extrapolation and damp harder
            diis.clear();
            weight_new = (weight_new * 0.5).max(1e-3);
        }
        w = next;
        mf = mean_field(sys, &w, kappa)?;
        let step = admissible(&mf, &space);
        let (r, _) = residual(&step, &w);
        let leak = match space {
            Space::Positive => mf.negative_leak(&w),
            Space::Fixed(_) => 0.0,
        };
        // energy change the next undamped step would still make
        let ahead = OccupiedSet::new(fill(&step, &w, n, opts.level_shift)?, "ahead")?;
        let pending = energy_difference(sys, &w, &ahead, kappa)?;
        residuals.push(r.max(leak));
        steps.push(de);
        if r.max(leak) <= opts.tol && pending.abs() <= floor {
            return finish(sys, w, kappa, mf, &space, it, residuals, steps);
        }
    }
    Err(LabError::ScfNotConverged {
        iterations: opts.max_iter,
        last_residual: residuals.last().copied().unwrap_or(f64::NAN),
        residuals,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    sys: &DfSystem,
    w: OccupiedSet,
    kappa: f64,
    mf: MeanFieldState,
    space: &Space,
    iterations: usize,
    residuals: Vec<f64>,
    energy_steps: Vec<f64>,
) -> Result<ScfResult> {
    let step = admissible(&mf, space);
    let (_, multipliers) = residual(&step, &w);
    let (levels, _) = hermitian_eigen(&step.restricted);
    let n = w.n_electrons();
    let top = multipliers.last().copied().unwrap_or(f64::NEG_INFINITY);
    let scale = 1e-8 * (1.0 + top.abs());
    let aufbau = n == levels.len() || top <= levels[n] + scale;
    let negative_leak = mf.negative_leak(&w);
    // canonical orbitals: eigenvectors of the occupied block
    let small = hermitize(&(w.coefficients.adjoint() * &mf.shifted * &w.coefficients));
    let (_, u) = hermitian_eigen(&small);
    let occupied = w.gauge(&u);
    let energy = df_energy(sys, &occupied, kappa)?;
    Ok(ScfResult {
        occupied,
        multipliers,
        energy,
        mean_field: mf,
        iterations,
        residuals,
        energy_steps,
        aufbau,
        negative_leak,
    })
}

/// Minimize the energy over N-dimensional subspaces of `ran P`, with
/// `projector_basis` holding orthonormal columns spanning `ran P`.
pub fn projected_minimize(
    sys: &DfSystem,
    projector_basis: &DMatrix<C64>,
    n: usize,
    kappa: f64,
    start: Option<&OccupiedSet>,
    opts: &ScfOptions,
) -> Result<ScfResult> {
    let start = match start {
        Some(w) => w.clone(),
        None => {
            // lowest levels of the linear operator inside ran P
            let h = sys.basis.h_shifted();
            let hp = hermitize(&(projector_basis.adjoint()
                * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(h.len(), h.iter().map(|v| C64::new(*v, 0.0))))
                * projector_basis));
            let (_, y) = hermitian_eigen(&hp);
            if y.ncols() < n {
                return Err(LabError::NotEnoughStates { requested: n, available: y.ncols() });
            }
            OccupiedSet::new(projector_basis * y.columns(0, n), "projected")?
        }
    };
    run(sys, n, kappa, &start, Space::Fixed(projector_basis), opts)
}

/// Solve the Dirac-Fock equations: W spans N eigenvectors of its own mean
/// field with the lowest positive multipliers.
pub fn scf_selfconsistent(sys: &DfSystem, n: usize, kappa: f64, start: &OccupiedSet, opts: &ScfOptions) -> Result<ScfResult> {
    run(sys, n, kappa, start, Space::Positive, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::test_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_problem_converges_in_one_step() {
        let sys = test_system();
        let start = aufbau_start(&sys, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noisy = perturbed_start(&sys, &start, 0.1, &mut rng).unwrap();
        let r = scf_selfconsistent(&sys, 2, 0.0, &noisy, &ScfOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        let h = sys.basis.h_shifted();
        assert!((r.energy.total - (h[0] + h[1])).abs() < 1e-12);
        let p = sys.free.positive_basis.clone();
        let rp = projected_minimize(&sys, &p, 2, 0.0, None, &ScfOptions::default()).unwrap();
        assert_eq!(rp.iterations, 1);
    }

    #[test]
    fn closed_shell_unique_solution() {
        let sys = test_system();
        let start = aufbau_start(&sys, 2).unwrap();
        let opts = ScfOptions::default();
        let r0 = scf_selfconsistent(&sys, 2, 1e-2, &start, &opts).unwrap();
        assert!(r0.negative_leak <= 1e-8 && r0.aufbau && r0.multipliers_in_gap());
        let lin = df_energy(&sys, &start, 0.0).unwrap().total;
        assert!(r0.energy.total > lin);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let s = perturbed_start(&sys, &start, 0.05, &mut rng).unwrap();
            let r = scf_selfconsistent(&sys, 2, 1e-2, &s, &opts).unwrap();
            assert!(r.occupied.principal_angle(&r0.occupied) < 1e-7);
        }
    }

    #[test]
    fn projected_matches_selfconsistent_on_own_projector() {
        let sys = test_system();
        let start = aufbau_start(&sys, 2).unwrap();
        let opts = ScfOptions::default();
        let r = scf_selfconsistent(&sys, 2, 1e-2, &start, &opts).unwrap();
        let p = projected_minimize(&sys, &r.mean_field.positive_basis(), 2, 1e-2, Some(&r.occupied), &opts).unwrap();
        assert!(p.occupied.principal_angle(&r.occupied) < 1e-7);
    }
}
