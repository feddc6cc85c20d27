//! Dirac-Fock energy of a Slater determinant.
//!
//! Energies are carried shifted by `-N c^2` so that open-shell gaps far below
//! `c^2 * eps_machine` stay resolvable.

use nalgebra::DMatrix;

use crate::angular::C64;
use crate::error::{LabError, Result};
use crate::fock::occupied::OccupiedSet;
use crate::fock::DfSystem;

/// Gram tolerance accepted by energy and mean-field evaluation.
pub const GRAM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `tr(h D) - N c^2`
    pub one_body: f64,
    pub direct: f64,
    pub exchange: f64,
    /// `one_body + kappa/2 (direct - exchange)`, shifted by `-N c^2`
    pub total: f64,
    pub kappa: f64,
    pub c: f64,
    pub n_electrons: usize,
}

impl EnergyBreakdown {
    pub fn interaction(&self) -> f64 {
        self.direct - self.exchange
    }

    /// Total energy including the rest mass `N c^2`.
    pub fn absolute(&self) -> f64 {
        self.total + self.n_electrons as f64 * self.c * self.c
    }
}

pub(crate) fn check_gram(w: &OccupiedSet) -> Result<()> {
    let d = w.gram_defect();
    if d > GRAM_TOL {
        return Err(LabError::GramViolation(d));
    }
    Ok(())
}

pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    // tr(AB) without forming the product
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

pub fn df_energy(sys: &DfSystem, w: &OccupiedSet, kappa: f64) -> Result<EnergyBreakdown> {
    check_gram(w)?;
    let d = w.density();
    let h = sys.basis.h_shifted();
    let one_body: f64 = h.iter().enumerate().map(|(a, v)| v * d[(a, a)].re).sum();
    let (j, k) = sys.tensor.coulomb_exchange(&d);
    let direct = trace_product(&j, &d).re;
    let exchange = trace_product(&k, &d).re;
    Ok(EnergyBreakdown {
        one_body,
        direct,
        exchange,
        total: one_body + 0.5 * kappa * (direct - exchange),
        kappa,
        c: sys.c(),
        n_electrons: w.n_electrons(),
    })
}

/// `E(w) - E(reference)` from the exact quadratic expansion around the
/// reference density; no large energies are subtracted.
pub fn energy_difference(sys: &DfSystem, reference: &OccupiedSet, w: &OccupiedSet, kappa: f64) -> Result<f64> {
    check_gram(reference)?;
    check_gram(w)?;
    let d0 = reference.density();
    let delta = w.density() - &d0;
    let (j0, k0) = sys.tensor.coulomb_exchange(&d0);
    let (jd, kd) = sys.tensor.coulomb_exchange(&delta);
    let h = sys.basis.h_shifted();
    let linear: f64 = h.iter().enumerate().map(|(a, v)| v * delta[(a, a)].re).sum::<f64>()
        + kappa * trace_product(&(j0 - k0), &delta).re;
    Ok(linear + 0.5 * kappa * trace_product(&(jd - kd), &delta).re)
}
