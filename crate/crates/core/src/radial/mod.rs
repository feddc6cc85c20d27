//! Radial Dirac and Schrodinger channel solvers on a shared spline basis.

mod dirac;
mod nonrel;
mod schrodinger;
mod spectrum;

pub use dirac::{channel_matrix, solve_channel, RadialOrbital};
pub use nonrel::{log_log_slope, nonrel_limit_study, NonrelRow, NonrelStudy};
pub use schrodinger::{schrodinger_channel, SchrodingerState};
pub use spectrum::{assemble_spectrum, Shell, SpectrumTable};

use crate::bspline::BSplineBasis;
use crate::error::{LabError, Result};
use crate::grid::{GridSpec, RadialGrid};
use crate::nucleus::Potential;

pub const SPLINE_ORDER: usize = 7;

/// Relativistic angular channel labelled by `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub kappa: i32,
}

impl Channel {
    pub fn new(kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(LabError::InvalidParameter("kappa must be nonzero".into()));
        }
        Ok(Self { kappa })
    }

    /// Twice the total angular momentum, `2 j = 2|kappa| - 1`.
    pub fn two_j(&self) -> i32 {
        2 * self.kappa.abs() - 1
    }

    pub fn j(&self) -> f64 {
        self.kappa.abs() as f64 - 0.5
    }

    pub fn degeneracy(&self) -> usize {
        2 * self.kappa.unsigned_abs() as usize
    }

    pub fn l_large(&self) -> i32 {
        if self.kappa < 0 {
            -self.kappa - 1
        } else {
            self.kappa
        }
    }

    pub fn l_small(&self) -> i32 {
        if self.kappa < 0 {
            -self.kappa
        } else {
            self.kappa - 1
        }
    }

    /// Spectroscopic label such as `2p3/2` for principal number `n`.
    pub fn label(&self, n: usize) -> String {
        const L: [char; 6] = ['s', 'p', 'd', 'f', 'g', 'h'];
        format!("{n}{}{}/2", L[self.l_large() as usize], self.two_j())
    }

    /// Channels with `|kappa| <= kmax`, ordered -1, +1, -2, +2, ...
    pub fn up_to(kmax: u32) -> Vec<Channel> {
        (1..=kmax as i32).flat_map(|k| [Channel { kappa: -k }, Channel { kappa: k }]).collect()
    }
}

/// Grid, spline basis, potential and speed of light shared by all channels.
#[derive(Debug, Clone)]
pub struct RadialModel {
    pub grid: RadialGrid,
    pub basis: BSplineBasis,
    pub potential: Potential,
    pub c: f64,
    /// V sampled at the quadrature points
    potential_values: Vec<f64>,
}

impl RadialModel {
    /// `basis_per_channel` spline functions per component; the grid intervals
    /// must be a multiple of `basis_per_channel - SPLINE_ORDER + 3`.
    pub fn new(grid: GridSpec, potential: Potential, c: f64, basis_per_channel: usize) -> Result<Self> {
        if !(c > 1.0) || !c.is_finite() {
            return Err(LabError::InvalidParameter(format!("speed of light must exceed 1, got {c}")));
        }
        let spans = basis_per_channel
            .checked_sub(SPLINE_ORDER - 3)
            .filter(|s| *s > 0)
            .ok_or_else(|| LabError::InvalidParameter(format!("basis size {basis_per_channel} too small")))?;
        if (grid.size - 1) % spans != 0 {
            return Err(LabError::InvalidParameter(format!(
                "grid intervals {} are not a multiple of the {spans} spline spans",
                grid.size - 1
            )));
        }
        let grid = RadialGrid::new(grid, potential.support_radius())?;
        let basis = BSplineBasis::new(&grid, SPLINE_ORDER, (grid.nodes().len() - 1) / spans)?;
        let potential_values = grid.points().iter().map(|&r| potential.value(r)).collect();
        Ok(Self { grid, basis, potential, c, potential_values })
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        if !(c > 1.0) {
            return Err(LabError::InvalidParameter(format!("speed of light must exceed 1, got {c}")));
        }
        Ok(Self { c, ..self.clone() })
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.potential_values
    }

    pub fn basis_size(&self) -> usize {
        self.basis.len()
    }
}

/// Sign changes of `f`, ignoring samples below `rel` times the peak.
pub fn count_nodes(f: &[f64], rel: f64) -> usize {
    let peak = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0;
    let mut nodes = 0;
    for &v in f {
        if v.abs() < rel * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            nodes += 1;
        }
        last = v.signum();
    }
    nodes
}

/// Generalized symmetric eigenproblem `H x = λ S x` via Cholesky reduction.
/// Eigenvalues ascending, eigenvectors S-orthonormal in the columns.
pub(crate) fn generalized_eigen(
    h: &nalgebra::DMatrix<f64>,
    s: &nalgebra::DMatrix<f64>,
) -> Result<(Vec<f64>, nalgebra::DMatrix<f64>)> {
    let n = h.nrows();
    let chol = s.clone().cholesky().ok_or_else(|| {
        let ev = s.clone().symmetric_eigenvalues();
        let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        LabError::SingularOverlap { condition: if lo > 0.0 { hi / lo } else { f64::INFINITY } }
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&nalgebra::DMatrix::identity(n, n))
        .ok_or_else(|| LabError::Eigensolver("triangular solve failed".into()))?;
    let mut c = &linv * h * linv.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::try_new(c, 1e-15, 10_000)
        .ok_or_else(|| LabError::Eigensolver("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = nalgebra::DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    let x = linv.transpose() * y;
    Ok((values, x))
}
