//! Positive spectral subspaces as graphs over the linear eigenbasis.
//!
//! The basis states split into positive and negative linear eigenstates. The
//! positive spectral subspace of a mean field `F` is the range of `[I; Y]`
//! (positive rows first), where `Y` solves the block Riccati equation
//! `F_np + F_nn Y - Y F_pp - Y F_pn Y = 0`. `Y` is of order `kappa / c^2`
//! and is computed to relative precision, so negative components of order
//! `1e-13` stay meaningful where an eigendecomposition of `F` (norm `~2c^2`)
//! would only resolve `1e-16` absolutely.

use nalgebra::DMatrix;

use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::fock::meanfield::{hermitian_eigen, hermitize};
use crate::fock::occupied::OccupiedSet;
use crate::fock::DfSystem;

#[derive(Debug, Clone)]
pub struct SpectralGraph {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    /// negative rows x positive columns
    pub y: DMatrix<C64>,
}

fn select(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn rows_of(m: &DMatrix<C64>, rows: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

impl SpectralGraph {
    /// Graph of the positive spectral subspace of `shifted` (`F - c^2`).
    pub fn new(sys: &DfSystem, shifted: &DMatrix<C64>) -> Result<Self> {
        let n = sys.dim();
        let positive: Vec<usize> = (0..n).filter(|&a| sys.basis.is_positive(a)).collect();
        let negative: Vec<usize> = (0..n).filter(|&a| !sys.basis.is_positive(a)).collect();
        let two_c2 = 2.0 * sys.c() * sys.c();
        let f_pp = hermitize(&select(shifted, &positive, &positive));
        // negative block re-centred at -2c^2 to keep its eigenvalues small
        let mut f_nn = hermitize(&select(shifted, &negative, &negative));
        for i in 0..negative.len() {
            f_nn[(i, i)] += C64::new(two_c2, 0.0);
        }
        let f_np = select(shifted, &negative, &positive);
        let f_pn = f_np.adjoint();
        let (lp, up) = hermitian_eigen(&f_pp);
        let (ln, un) = hermitian_eigen(&f_nn);
        // F_nn Y - Y F_pp = rhs, in the eigenbases of the diagonal blocks
        let sylvester = |rhs: &DMatrix<C64>| -> DMatrix<C64> {
            let r = un.adjoint() * rhs * &up;
            let t = DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| r[(i, j)] / ((ln[i] - two_c2) - lp[j]));
            &un * t * up.adjoint()
        };
        let mut y = sylvester(&(-&f_np));
        for _ in 0..50 {
            let next = sylvester(&(&y * &f_pn * &y - &f_np));
            let change = (&next - &y).norm();
            y = next;
            if change <= 1e-15 * y.norm() {
                return Ok(Self { positive, negative, y });
            }
        }
        Err(LabError::Eigensolver("Riccati iteration for the spectral graph did not converge".into()))
    }

    /// `P^- v` in full coordinates.
    pub fn negative_part(&self, v: &DMatrix<C64>) -> DMatrix<C64> {
        let vn = rows_of(v, &self.negative);
        let vp = rows_of(v, &self.positive);
        let s = vn - &self.y * vp;
        let k = self.negative.len();
        let gram = DMatrix::<C64>::identity(k, k) + &self.y * self.y.adjoint();
        let coef = gram.cholesky().expect("I + Y Y^* is positive definite").solve(&s);
        let mut out = DMatrix::zeros(v.nrows(), v.ncols());
        let top = -self.y.adjoint() * &coef;
        for (i, &a) in self.positive.iter().enumerate() {
            out.row_mut(a).copy_from(&top.row(i));
        }
        for (i, &a) in self.negative.iter().enumerate() {
            out.row_mut(a).copy_from(&coef.row(i));
        }
        out
    }

    /// Replace the negative components of `w` by `Y w_p`, so that `w` lies
    /// exactly in the positive subspace; columns are re-orthonormalized.
    pub fn project_onto_graph(&self, w: &OccupiedSet) -> Result<OccupiedSet> {
        let wp = rows_of(&w.coefficients, &self.positive);
        let wn = &self.y * &wp;
        let mut c = DMatrix::zeros(w.dim(), w.n_electrons());
        for (i, &a) in self.positive.iter().enumerate() {
            c.row_mut(a).copy_from(&wp.row(i));
        }
        for (i, &a) in self.negative.iter().enumerate() {
            c.row_mut(a).copy_from(&wn.row(i));
        }
        OccupiedSet::new(c, w.tag.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::meanfield::mean_field;
    use crate::fock::occupied::random_unitary;
    use crate::fock::scf::aufbau_start;
    use crate::fock::test_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_eigen_projector() {
        let sys = test_system();
        let w = aufbau_start(&sys, 3).unwrap();
        let mf = mean_field(&sys, &w, 0.5).unwrap();
        let g = SpectralGraph::new(&sys, &mf.shifted).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_unitary(sys.dim(), &mut rng).columns(0, 4).clone_owned();
        let pm = mf.negative_basis() * (mf.negative_basis().adjoint() * &v);
        let diff = (&pm - g.negative_part(&v)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-12, "{diff}");
        // graph-projected sets have no negative part
        let gw = g.project_onto_graph(&w).unwrap();
        assert!(g.negative_part(&gw.coefficients).norm() < 1e-15);
    }

    #[test]
    fn linear_operator_has_empty_graph() {
        let sys = test_system();
        let w = aufbau_start(&sys, 2).unwrap();
        let mf = mean_field(&sys, &w, 0.0).unwrap();
        let g = SpectralGraph::new(&sys, &mf.shifted).unwrap();
        assert_eq!(g.y.norm(), 0.0);
    }
}
