//! Two-electron Coulomb machinery.

pub mod multipole;
pub mod slater;
pub mod tensor;

pub use multipole::{field_convolution, hartree_multipoles, DensityExpansion, MultipoleField};
pub use slater::{pair_density, slater_integral, slater_rk, yk_potential};
pub use tensor::TwoElectronTensor;
