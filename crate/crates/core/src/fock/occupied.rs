//! Occupied sets: N orthonormal spin-orbitals as columns over the truncated basis.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::angular::{wigner_block, RotationSU2, C64};
use crate::error::{LabError, Result};
use crate::fock::basis::OneParticleBasis;

#[derive(Debug, Clone)]
pub struct OccupiedSet {
    pub coefficients: DMatrix<C64>,
    /// which experiment produced the set
    pub tag: String,
}

impl OccupiedSet {
    /// Orthonormalizes the columns (Lowdin) and rejects rank deficiency.
    pub fn new(coefficients: DMatrix<C64>, tag: impl Into<String>) -> Result<Self> {
        let mut w = Self { coefficients, tag: tag.into() };
        if w.n_electrons() > w.dim() {
            return Err(LabError::NotEnoughStates { requested: w.n_electrons(), available: w.dim() });
        }
        w.orthonormalize()?;
        Ok(w)
    }

    /// Columns taken as given; the caller guarantees orthonormality.
    pub fn from_orthonormal(coefficients: DMatrix<C64>, tag: impl Into<String>) -> Self {
        Self { coefficients, tag: tag.into() }
    }

    /// Unit vectors on the listed basis indices.
    pub fn from_indices(dim: usize, indices: &[usize], tag: impl Into<String>) -> Self {
        let mut c = DMatrix::zeros(dim, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            c[(i, col)] = C64::new(1.0, 0.0);
        }
        Self::from_orthonormal(c, tag)
    }

    pub fn dim(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn n_electrons(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn gram(&self) -> DMatrix<C64> {
        self.coefficients.adjoint() * &self.coefficients
    }

    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let n = g.nrows();
        (g - DMatrix::identity(n, n)).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Density matrix `D = C C^*`.
    pub fn density(&self) -> DMatrix<C64> {
        &self.coefficients * self.coefficients.adjoint()
    }

    pub fn orthonormalize(&mut self) -> Result<()> {
        let g = self.gram();
        let eig = g.symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| *v < 1e-12) {
            return Err(LabError::GramViolation(eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v))));
        }
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(1.0 / v.sqrt(), 0.0)))
            * eig.eigenvectors.adjoint();
        self.coefficients = &self.coefficients * inv_sqrt;
        Ok(())
    }

    /// Right multiplication by a unitary `u` (gauge change).
    pub fn gauge(&self, u: &DMatrix<C64>) -> Self {
        Self { coefficients: &self.coefficients * u, tag: self.tag.clone() }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// Orthonormal basis of the spanned subspace is unchanged by gauge; the
    /// largest principal angle to `other` (radians).
    pub fn principal_angle(&self, other: &OccupiedSet) -> f64 {
        let m = self.coefficients.adjoint() * &other.coefficients;
        let s = m.singular_values();
        let smin = s.iter().fold(f64::INFINITY, |a, v| a.min(*v)).min(1.0);
        // sin of the angle from the complement is better conditioned for tiny angles
        let resid = &other.coefficients - &self.coefficients * (&self.coefficients.adjoint() * &other.coefficients);
        let sin = resid.singular_values().iter().fold(0.0f64, |a, v| a.max(*v));
        if sin < 0.5 {
            sin.asin()
        } else {
            smin.acos()
        }
    }
}

/// Random unitary of size `n` (QR of a complex Gaussian matrix).
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }));
    q * phases
}

/// The SU(2) action on an occupied set: the Wigner block of each radial
/// function's m-multiplet is applied to its rows. Radial parts are untouched.
pub fn rotate_occupied(basis: &OneParticleBasis, w: &OccupiedSet, a: &RotationSU2) -> OccupiedSet {
    let mut c = w.coefficients.clone();
    for (i, f) in basis.radial.iter().enumerate() {
        let tj = f.channel.two_j();
        let d = wigner_block(tj, a);
        let off = basis.offsets[i];
        let dim = (tj + 1) as usize;
        let block = w.coefficients.rows(off, dim).clone_owned();
        c.rows_mut(off, dim).copy_from(&(d * block));
    }
    OccupiedSet { coefficients: c, tag: format!("{}+rotated", w.tag) }
}

/// Unitary matrix of the SU(2) action on the whole basis.
pub fn rotation_matrix(basis: &OneParticleBasis, a: &RotationSU2) -> DMatrix<C64> {
    let n = basis.len();
    let mut u = DMatrix::zeros(n, n);
    for (i, f) in basis.radial.iter().enumerate() {
        let tj = f.channel.two_j();
        let d = wigner_block(tj, a);
        let off = basis.offsets[i];
        let dim = (tj + 1) as usize;
        u.view_mut((off, off), (dim, dim)).copy_from(&d);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lowdin_and_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = DMatrix::from_fn(8, 3, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let w = OccupiedSet::new(c, "test").unwrap();
        assert!(w.gram_defect() < 1e-14);
        let u = random_unitary(3, &mut rng);
        let wu = w.gauge(&u);
        assert!(w.principal_angle(&wu) < 1e-7);
        let d = w.density();
        assert!((&d * &d - &d).iter().fold(0.0f64, |m, z| m.max(z.norm())) < 1e-13);
        let e = OccupiedSet::from_indices(8, &[0, 1, 2], "e");
        let f = OccupiedSet::from_indices(8, &[0, 1, 3], "f");
        assert!((e.principal_angle(&f) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_rejected() {
        let c = DMatrix::from_element(4, 2, C64::new(1.0, 0.0));
        assert!(OccupiedSet::new(c, "bad").is_err());
    }
}
