//! Mean-field operator `H_lin + kappa (J - K)`, its spectral projectors and
//! the epsilon-closeness to the free positive projector.

use nalgebra::{DMatrix, DVector};

use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::fock::energy::check_gram;
use crate::fock::occupied::OccupiedSet;
use crate::fock::DfSystem;

/// Relative half-width of the window around zero in which an eigenvalue
/// makes the positive projector ill-defined.
pub const ZERO_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MeanFieldState {
    pub kappa: f64,
    pub c: f64,
    /// the operator shifted by `-c^2`
    pub shifted: DMatrix<C64>,
    /// `(H_{kappa,W} - H_lin) / kappa = J - K`
    pub omega: DMatrix<C64>,
    /// ascending, shifted by `-c^2`
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<C64>,
    /// number of eigenvalues below zero (unshifted)
    pub n_negative: usize,
    pub closeness: f64,
}

impl MeanFieldState {
    /// Orthonormal basis of `ran P^+`.
    pub fn positive_basis(&self) -> DMatrix<C64> {
        let n = self.eigenvectors.ncols();
        self.eigenvectors.columns(self.n_negative, n - self.n_negative).clone_owned()
    }

    pub fn negative_basis(&self) -> DMatrix<C64> {
        self.eigenvectors.columns(0, self.n_negative).clone_owned()
    }

    pub fn positive_projector(&self) -> DMatrix<C64> {
        let u = self.positive_basis();
        &u * u.adjoint()
    }

    /// Positive eigenvalues (shifted by `-c^2`), ascending.
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().skip(self.n_negative).copied().collect()
    }

    /// `||P^- W||` (largest singular value).
    pub fn negative_leak(&self, w: &OccupiedSet) -> f64 {
        let m = self.negative_basis().adjoint() * &w.coefficients;
        m.singular_values().iter().fold(0.0, |a, v| a.max(*v))
    }

    /// The operator including the rest energy.
    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.shifted.nrows();
        &self.shifted + DMatrix::<C64>::identity(n, n) * C64::new(self.c * self.c, 0.0)
    }
}

/// Ascending Hermitian eigen-decomposition.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).clone_owned()).collect::<Vec<_>>());
    (values, vectors)
}

pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Mean field of an arbitrary one-particle density (no Gram check).
pub fn mean_field_of_density(sys: &DfSystem, d: &DMatrix<C64>, kappa: f64) -> Result<MeanFieldState> {
    let c = sys.c();
    let (j, k) = sys.tensor.coulomb_exchange(d);
    let omega = hermitize(&(j - k));
    let h = sys.basis.h_shifted();
    let mut shifted = &omega * C64::new(kappa, 0.0);
    for (a, v) in h.iter().enumerate() {
        shifted[(a, a)] += C64::new(*v, 0.0);
    }
    let (values, vectors) = hermitian_eigen(&shifted);
    let c2 = c * c;
    if let Some(v) = values.iter().find(|v| (*v + c2).abs() < ZERO_WINDOW * c2) {
        return Err(LabError::ZeroEigenvalue(v + c2));
    }
    let n_negative = values.iter().filter(|v| **v + c2 < 0.0).count();
    let positive = vectors.columns(n_negative, vectors.ncols() - n_negative).clone_owned();
    let closeness = epsilon_closeness(sys, &positive);
    Ok(MeanFieldState { kappa, c, shifted, omega, eigenvalues: values, eigenvectors: vectors, n_negative, closeness })
}

pub fn mean_field(sys: &DfSystem, w: &OccupiedSet, kappa: f64) -> Result<MeanFieldState> {
    check_gram(w)?;
    mean_field_of_density(sys, &w.density(), kappa)
}

/// `|| B^{1/2} (P - Lambda_+) B^{-1/2} ||` with `B = |H_free|` on the
/// truncated space; `projector_basis` holds orthonormal columns spanning P.
pub fn epsilon_closeness(sys: &DfSystem, projector_basis: &DMatrix<C64>) -> f64 {
    let p = projector_basis * projector_basis.adjoint();
    let f = &sys.free;
    let x = &f.b_half * (p - &f.lambda_plus) * &f.b_half_inv;
    x.singular_values().iter().fold(0.0, |a, v| a.max(*v))
}
