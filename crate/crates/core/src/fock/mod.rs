//! Dirac-Fock energy, mean field, projectors and self-consistent solvers over
//! a truncated basis of linear eigenstates.

pub mod basis;
pub mod energy;
pub mod fiber;
pub mod graph;
pub mod meanfield;
pub mod occupied;
pub mod scf;

use nalgebra::DMatrix;

use crate::angular::C64;
use crate::coulomb::TwoElectronTensor;
use crate::error::Result;
use crate::radial::RadialModel;

pub use basis::{BasisSettings, OneParticleBasis, RadialFunction, SpinOrbital};
pub use fiber::{fiber_expansion, fiber_max_check, FiberReport};
pub use graph::SpectralGraph;
pub use energy::{df_energy, energy_difference, EnergyBreakdown};
pub use meanfield::{epsilon_closeness, mean_field, mean_field_of_density, MeanFieldState};
pub use occupied::{random_unitary, rotate_occupied, rotation_matrix, OccupiedSet};
pub use scf::{aufbau_start, perturbed_start, projected_minimize, scf_selfconsistent, ScfOptions, ScfResult};

/// Spectral data of the free Dirac operator restricted to the basis.
#[derive(Debug, Clone)]
pub struct FreeOperator {
    /// `|H_free|^{1/2}`
    pub b_half: DMatrix<C64>,
    pub b_half_inv: DMatrix<C64>,
    /// `Lambda_+`
    pub lambda_plus: DMatrix<C64>,
    pub positive_basis: DMatrix<C64>,
}

impl FreeOperator {
    fn new(basis: &OneParticleBasis) -> Self {
        let c2 = basis.c * basis.c;
        let n = basis.len();
        let h = basis.free_shifted() + DMatrix::identity(n, n) * c2;
        let eig = h.symmetric_eigen();
        let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        let diag = |f: &dyn Fn(f64) -> f64| {
            DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(f(x), 0.0)))
        };
        let b_half = &v * diag(&|x: f64| x.abs().sqrt()) * v.adjoint();
        let b_half_inv = &v * diag(&|x: f64| 1.0 / x.abs().sqrt()) * v.adjoint();
        let lambda_plus = &v * diag(&|x: f64| if x > 0.0 { 1.0 } else { 0.0 }) * v.adjoint();
        let cols: Vec<_> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.0).map(|i| v.column(i).clone_owned()).collect();
        Self { b_half, b_half_inv, lambda_plus, positive_basis: DMatrix::from_columns(&cols) }
    }
}

/// Everything needed to evaluate Dirac-Fock quantities at one value of `c`.
#[derive(Debug, Clone)]
pub struct DfSystem {
    pub basis: OneParticleBasis,
    pub tensor: TwoElectronTensor,
    pub free: FreeOperator,
}

impl DfSystem {
    pub fn new(model: &RadialModel, settings: &BasisSettings) -> Result<Self> {
        let basis = OneParticleBasis::new(model, settings)?;
        Ok(Self::from_basis(basis))
    }

    pub fn from_basis(basis: OneParticleBasis) -> Self {
        let tensor = TwoElectronTensor::new(&basis);
        let free = FreeOperator::new(&basis);
        Self { basis, tensor, free }
    }

    pub fn c(&self) -> f64 {
        self.basis.c
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[cfg(test)]
pub(crate) fn test_system() -> DfSystem {
    use crate::grid::GridSpec;
    use crate::nucleus::{NuclearModel, Potential};
    use std::sync::OnceLock;
    static SYS: OnceLock<DfSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        let m = RadialModel::new(GridSpec::default(), Potential::Smeared(NuclearModel::new(0.5, 4).unwrap()), 100.0, 60)
            .unwrap();
        DfSystem::new(&m, &BasisSettings::default()).unwrap()
    })
    .clone()
}
