//! The open-shell reduced problem: filled shells plus a k-frame in the
//! d-dimensional partially filled shell, minimized over the Grassmannian.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::fock::{df_energy, mean_field, random_unitary, DfSystem, OccupiedSet};
use crate::games::shells::ShellSplit;

const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct GrassmannPoint {
    /// d x k, orthonormal columns in the coordinates of `orbitals`
    pub frame: DMatrix<C64>,
    /// basis spin-orbitals spanning the open shell
    pub orbitals: Vec<usize>,
    pub filled: Vec<usize>,
    /// number of completely filled shells
    pub filled_shells: usize,
}

impl GrassmannPoint {
    pub fn new(sys: &DfSystem, split: &ShellSplit, frame: DMatrix<C64>) -> Result<Self> {
        let orbitals = split.open_orbitals(&sys.basis)?;
        let filled = split.filled_orbitals(&sys.basis)?;
        if frame.nrows() != orbitals.len() || frame.ncols() != split.k {
            return Err(LabError::InvalidParameter(format!(
                "frame is {}x{}, shell needs {}x{}",
                frame.nrows(),
                frame.ncols(),
                orbitals.len(),
                split.k
            )));
        }
        let frame = retract(frame);
        Ok(Self { frame, orbitals, filled, filled_shells: split.filled })
    }

    /// `(cos(theta/2), e^{i phi} sin(theta/2))` for d = 2, k = 1.
    pub fn on_sphere(sys: &DfSystem, split: &ShellSplit, theta: f64, phi: f64) -> Result<Self> {
        let f = DMatrix::from_column_slice(
            2,
            1,
            &[C64::new((0.5 * theta).cos(), 0.0), C64::from_polar((0.5 * theta).sin(), phi)],
        );
        Self::new(sys, split, f)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.frame.ncols();
        (self.frame.adjoint() * &self.frame - DMatrix::<C64>::identity(k, k)).norm()
    }

    /// The embedded determinant: filled orbitals followed by the frame.
    pub fn embed(&self, dim: usize) -> OccupiedSet {
        let nf = self.filled.len();
        let mut c = DMatrix::<C64>::zeros(dim, nf + self.frame.ncols());
        for (j, &a) in self.filled.iter().enumerate() {
            c[(a, j)] = C64::new(1.0, 0.0);
        }
        for j in 0..self.frame.ncols() {
            for (r, &a) in self.orbitals.iter().enumerate() {
                c[(a, nf + j)] = self.frame[(r, j)];
            }
        }
        OccupiedSet::from_orthonormal(c, "S0 point")
    }

    fn with_frame(&self, frame: DMatrix<C64>) -> Self {
        Self { frame, ..self.clone() }
    }
}

/// QR retraction with the phase of the diagonal of R removed.
fn retract(m: DMatrix<C64>) -> DMatrix<C64> {
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            let col = q.column(j) * ph;
            q.set_column(j, &col);
        }
    }
    q
}

pub fn reduced_openshell_energy(sys: &DfSystem, z: &GrassmannPoint, kappa: f64) -> Result<f64> {
    Ok(df_energy(sys, &z.embed(sys.dim()), kappa)?.total)
}

/// Riemannian gradient `(I - zz^*) 2 F_oo z` on the Grassmannian.
fn gradient(sys: &DfSystem, z: &GrassmannPoint, kappa: f64) -> Result<DMatrix<C64>> {
    let f = mean_field(sys, &z.embed(sys.dim()), kappa)?.shifted;
    let d = z.orbitals.len();
    let foo = DMatrix::from_fn(d, d, |i, j| f[(z.orbitals[i], z.orbitals[j])]);
    let g = foo * &z.frame * C64::new(2.0, 0.0);
    Ok(&g - &z.frame * (z.frame.adjoint() * &g))
}

#[derive(Debug, Clone)]
pub struct S0Minimum {
    pub point: GrassmannPoint,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// final energy of every start
    pub starts: Vec<f64>,
}

/// Projected gradient descent with QR retraction and Armijo backtracking from
/// one start.
pub fn descend(sys: &DfSystem, start: GrassmannPoint, kappa: f64, max_iter: usize, tol: f64) -> Result<(GrassmannPoint, f64, f64, usize)> {
    let mut z = start;
    let mut e = reduced_openshell_energy(sys, &z, kappa)?;
    let mut g = gradient(sys, &z, kappa)?;
    let mut it = 0;
    while it < max_iter && g.norm() > tol {
        it += 1;
        let g2 = g.norm_squared();
        let mut t = 0.1;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = z.with_frame(retract(&z.frame - &g * C64::new(t, 0.0)));
            let et = reduced_openshell_energy(sys, &trial, kappa)?;
            if et <= e - ARMIJO * t * g2 {
                accepted = Some((trial, et));
                break;
            }
            t *= 0.5;
        }
        let Some((nz, ne)) = accepted else { break };
        z = nz;
        e = ne;
        g = gradient(sys, &z, kappa)?;
    }
    let gn = g.norm();
    Ok((z, e, gn, it))
}

pub fn minimize_on_s0(sys: &DfSystem, split: &ShellSplit, kappa: f64, n_starts: usize, seed: u64) -> Result<S0Minimum> {
    if split.k == 0 {
        return Err(LabError::InvalidParameter("minimize_on_S0 needs an open shell".into()));
    }
    let d = split.open_orbitals(&sys.basis)?.len();
    let runs: Vec<Result<(GrassmannPoint, f64, f64, usize)>> = (0..n_starts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let u = random_unitary(d, &mut rng);
            let start = GrassmannPoint::new(sys, split, u.columns(0, split.k).clone_owned())?;
            descend(sys, start, kappa, 200, 1e-10)
        })
        .collect();
    let mut best: Option<S0Minimum> = None;
    let mut starts = Vec::new();
    for r in runs {
        let (z, e, gn, it) = r?;
        starts.push(e);
        if best.as_ref().is_none_or(|b| e < b.energy) {
            best = Some(S0Minimum { point: z, energy: e, gradient_norm: gn, iterations: it, starts: vec![] });
        }
    }
    let mut best = best.expect("at least one start");
    best.starts = starts;
    Ok(best)
}

/// Minimum of the reduced energy over a 24 x 30 (theta, phi) grid of the
/// frame sphere (d = 2, k = 1).
pub fn exhaustive_sphere_minimum(sys: &DfSystem, split: &ShellSplit, kappa: f64) -> Result<(f64, f64, f64)> {
    if split.d != 2 || split.k != 1 {
        return Err(LabError::InvalidParameter(format!("exhaustive search needs d=2, k=1 (got d={}, k={})", split.d, split.k)));
    }
    let points: Vec<(f64, f64)> = (0..24)
        .flat_map(|i| (0..30).map(move |j| (std::f64::consts::PI * i as f64 / 23.0, std::f64::consts::TAU * j as f64 / 30.0)))
        .collect();
    let values: Vec<Result<(f64, f64, f64)>> = points
        .par_iter()
        .map(|&(th, ph)| Ok((reduced_openshell_energy(sys, &GrassmannPoint::on_sphere(sys, split, th, ph)?, kappa)?, th, ph)))
        .collect();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for v in values {
        let v = v?;
        if v.0 < best.0 {
            best = v;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::test_system;
    use crate::games::shells::classify_shells;

    #[test]
    fn energy_is_constant_on_the_two_dimensional_shells() {
        let sys = test_system();
        for n in [1, 3] {
            let split = classify_shells(n, &sys.basis.spectrum).unwrap();
            let e0 = reduced_openshell_energy(&sys, &GrassmannPoint::on_sphere(&sys, &split, 0.0, 0.0).unwrap(), 1e-2).unwrap();
            for (th, ph) in [(0.7, 0.3), (2.0, 4.0), (std::f64::consts::PI, 1.0)] {
                let z = GrassmannPoint::on_sphere(&sys, &split, th, ph).unwrap();
                let e = reduced_openshell_energy(&sys, &z, 1e-2).unwrap();
                assert!((e - e0).abs() < 1e-10, "N={n}: {e} {e0}");
                // U(1) gauge
                let zg = z.with_frame(&z.frame * C64::from_polar(1.0, 0.9));
                assert!((reduced_openshell_energy(&sys, &zg, 1e-2).unwrap() - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimizer_matches_exhaustive_search() {
        let sys = test_system();
        let split = classify_shells(3, &sys.basis.spectrum).unwrap();
        let m = minimize_on_s0(&sys, &split, 1e-2, 3, 4).unwrap();
        assert!(m.point.orthonormality_defect() < 1e-12);
        let (ex, _, _) = exhaustive_sphere_minimum(&sys, &split, 1e-2).unwrap();
        assert!((m.energy - ex).abs() < 1e-9, "{} {}", m.energy, ex);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let u = random_unitary(2, &mut rng);
            let z = GrassmannPoint::new(&sys, &split, u.columns(0, 1).clone_owned()).unwrap();
            assert!(m.energy <= reduced_openshell_energy(&sys, &z, 1e-2).unwrap() + 1e-12);
        }
    }

    #[test]
    fn linear_problem_is_flat() {
        let sys = test_system();
        let split = classify_shells(3, &sys.basis.spectrum).unwrap();
        let (ex, _, _) = exhaustive_sphere_minimum(&sys, &split, 0.0).unwrap();
        let h = sys.basis.h_shifted();
        let open = split.open_orbitals(&sys.basis).unwrap();
        let e0: f64 = split.filled_orbitals(&sys.basis).unwrap().iter().map(|&a| h[a]).sum::<f64>() + h[open[0]];
        assert!((ex - e0).abs() < 1e-12, "{ex} {e0}");
    }
}
