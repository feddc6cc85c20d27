//! The property (P) certificate: a rotation A whose field f(A, phi) leaves a
//! surface integral `r I(r)` above the round-off floor in the density tail,
//! together with a positive Cauchy-Schwarz margin.

use super::field::{cauchy_schwarz_margin, f_field, surface_integral};
use super::pauli::{pauli_orbital, PauliOrbital};
use crate::angular::RotationSU2;
use crate::error::Result;
use crate::radial::{Channel, RadialModel};

/// Tail window: sphere density between these fractions of its peak.
pub const TAIL_HIGH: f64 = 1e-3;
pub const TAIL_LOW: f64 = 1e-8;
/// Required ratio of the signal to the round-off floor.
pub const SIGNAL_FACTOR: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct CandidateScan {
    pub name: String,
    pub rotation: RotationSU2,
    /// `sup |r I(r)|` over the tail window
    pub sup_ri: f64,
    pub noise_floor: f64,
    pub margin: f64,
    /// `min |r I(r)| / ∫_{S^2}|phi|^2` over the tail window
    pub delta: f64,
    /// `|r I(r)|` at every quadrature radius
    pub ri: Vec<f64>,
}

impl CandidateScan {
    pub fn passes(&self) -> bool {
        self.sup_ri >= SIGNAL_FACTOR * self.noise_floor && self.margin > 0.0
    }
}

#[derive(Debug, Clone)]
pub struct PropertyPCertificate {
    pub shell: String,
    pub best: Option<usize>,
    pub verdict: bool,
    pub candidates: Vec<CandidateScan>,
    /// quadrature radii and the sphere density of phi
    pub radii: Vec<f64>,
    pub sphere_density: Vec<f64>,
    /// first and last radius of the tail window
    pub window: (f64, f64),
}

impl PropertyPCertificate {
    pub fn winner(&self) -> Option<&CandidateScan> {
        self.best.map(|i| &self.candidates[i])
    }
}

/// Indices of the tail window of `density` beyond its peak.
pub fn tail_window(density: &[f64]) -> Vec<usize> {
    let (ipeak, peak) = density.iter().enumerate().fold((0, 0.0f64), |m, (i, v)| if *v > m.1 { (i, *v) } else { m });
    (ipeak..density.len()).filter(|&p| density[p] <= TAIL_HIGH * peak && density[p] >= TAIL_LOW * peak).collect()
}

pub fn scan_candidate(model: &RadialModel, phi: &PauliOrbital, name: &str, a: &RotationSU2) -> Result<CandidateScan> {
    let f = f_field(&model.grid, phi, a)?;
    let i = surface_integral(phi, &f);
    let radii = model.grid.points();
    let density: Vec<f64> = (0..radii.len()).map(|p| phi.sphere_density(p)).collect();
    let window = tail_window(&density);
    let ri: Vec<f64> = i.iter().zip(radii).map(|(z, r)| z.norm() * r).collect();
    let mut sup_ri = 0.0f64;
    let mut noise_floor = 0.0f64;
    let mut delta = f64::INFINITY;
    for &p in &window {
        let r = radii[p];
        sup_ri = sup_ri.max(ri[p]);
        // each term of r I(r) is bounded by r^2 |E| times the sphere density
        noise_floor = noise_floor.max(64.0 * f64::EPSILON * r * r * f.field_scale[p] * density[p]);
        delta = delta.min(ri[p] / density[p]);
    }
    if window.is_empty() {
        delta = 0.0;
    }
    Ok(CandidateScan { name: name.to_string(), rotation: *a, sup_ri, noise_floor, margin: cauchy_schwarz_margin(phi, a), delta, ri })
}

/// Certificate for the Schrodinger counterpart of `(kappa, level)`.
pub fn property_p_certificate(
    model: &RadialModel,
    kappa: i32,
    level: usize,
    candidates: &[(String, RotationSU2)],
) -> Result<PropertyPCertificate> {
    let ch = Channel::new(kappa)?;
    let phi = pauli_orbital(model, kappa, level)?;
    let radii = model.grid.points().to_vec();
    let density: Vec<f64> = (0..radii.len()).map(|p| phi.sphere_density(p)).collect();
    let window = tail_window(&density);
    let window = match (window.first(), window.last()) {
        (Some(&a), Some(&b)) => (radii[a], radii[b]),
        _ => (f64::NAN, f64::NAN),
    };
    let scans = candidates.iter().map(|(n, a)| scan_candidate(model, &phi, n, a)).collect::<Result<Vec<_>>>()?;
    let best = scans
        .iter()
        .enumerate()
        .filter(|(_, s)| s.passes())
        .max_by(|a, b| (a.1.sup_ri / a.1.noise_floor).total_cmp(&(b.1.sup_ri / b.1.noise_floor)))
        .map(|(i, _)| i);
    Ok(PropertyPCertificate {
        shell: ch.label(ch.l_large() as usize + 1 + level),
        best,
        verdict: best.is_some(),
        candidates: scans,
        radii,
        sphere_density: density,
        window,
    })
}
