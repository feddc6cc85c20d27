//! Truncated one-particle basis: the lowest bound states and the highest
//! negative-energy states of every channel, expanded into spin-orbitals.

use nalgebra::DMatrix;

use crate::error::{LabError, Result};
use crate::radial::{assemble_spectrum, Channel, RadialModel, SpectrumTable};

#[derive(Debug, Clone)]
pub struct RadialFunction {
    pub channel: Channel,
    pub energy: f64,
    /// energy - c^2
    pub shifted: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub positive: bool,
    /// index among the bound (or negative) states of the channel
    pub level: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinOrbital {
    pub radial: usize,
    /// 2m
    pub tm: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSettings {
    pub kmax: u32,
    pub n_pos: usize,
    pub n_neg: usize,
    pub cluster_tol: f64,
    pub max_shells: usize,
}

impl Default for BasisSettings {
    fn default() -> Self {
        Self { kmax: 2, n_pos: 3, n_neg: 2, cluster_tol: 1e-12, max_shells: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct OneParticleBasis {
    pub c: f64,
    pub model: RadialModel,
    pub spectrum: SpectrumTable,
    pub radial: Vec<RadialFunction>,
    pub orbitals: Vec<SpinOrbital>,
    /// first spin-orbital index of each radial function; its m-block is
    /// contiguous, ordered m = j, ..., -j
    pub offsets: Vec<usize>,
    /// matrix of V between radial functions of equal channel
    v_radial: DMatrix<f64>,
}

impl OneParticleBasis {
    pub fn new(model: &RadialModel, settings: &BasisSettings) -> Result<Self> {
        let spectrum = assemble_spectrum(model, settings.kmax, settings.cluster_tol, settings.max_shells)?;
        Self::from_spectrum(model, spectrum, settings)
    }

    pub fn from_spectrum(model: &RadialModel, spectrum: SpectrumTable, settings: &BasisSettings) -> Result<Self> {
        if settings.n_pos == 0 {
            return Err(LabError::InvalidParameter("at least one positive state per channel is required".into()));
        }
        let mut radial = Vec::new();
        for ch in Channel::up_to(settings.kmax) {
            let bound = spectrum.bound(ch);
            let neg = spectrum.negative(ch);
            if bound.len() < settings.n_pos {
                return Err(LabError::NotEnoughStates { requested: settings.n_pos, available: bound.len() });
            }
            if neg.len() < settings.n_neg {
                return Err(LabError::NotEnoughStates { requested: settings.n_neg, available: neg.len() });
            }
            for (level, o) in bound.iter().take(settings.n_pos).enumerate() {
                radial.push(RadialFunction {
                    channel: ch,
                    energy: o.energy,
                    shifted: o.shifted,
                    p: o.p.clone(),
                    q: o.q.clone(),
                    positive: true,
                    level,
                });
            }
            for (level, o) in neg.iter().take(settings.n_neg).enumerate() {
                radial.push(RadialFunction {
                    channel: ch,
                    energy: o.energy,
                    shifted: o.shifted,
                    p: o.p.clone(),
                    q: o.q.clone(),
                    positive: false,
                    level,
                });
            }
        }
        let mut orbitals = Vec::new();
        let mut offsets = Vec::new();
        for (i, f) in radial.iter().enumerate() {
            offsets.push(orbitals.len());
            let tj = f.channel.two_j();
            for tm in (-tj..=tj).rev().step_by(2) {
                orbitals.push(SpinOrbital { radial: i, tm });
            }
        }
        let g = &model.grid;
        let v = model.potential_values();
        let n = radial.len();
        let mut v_radial = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                if radial[a].channel != radial[b].channel {
                    continue;
                }
                v_radial[(a, b)] = (0..g.len())
                    .map(|k| g.weights()[k] * v[k] * (radial[a].p[k] * radial[b].p[k] + radial[a].q[k] * radial[b].q[k]))
                    .sum();
            }
        }
        Ok(Self { c: model.c, model: model.clone(), spectrum, radial, orbitals, offsets, v_radial })
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn channel_of(&self, a: usize) -> Channel {
        self.radial[self.orbitals[a].radial].channel
    }

    /// Diagonal of the linear operator, shifted by `-c^2`.
    pub fn h_shifted(&self) -> Vec<f64> {
        self.orbitals.iter().map(|o| self.radial[o.radial].shifted).collect()
    }

    pub fn is_positive(&self, a: usize) -> bool {
        self.radial[self.orbitals[a].radial].positive
    }

    /// Spin-orbitals of the `i`-th bound level of `channel`.
    pub fn level_orbitals(&self, channel: Channel, level: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| {
                let f = &self.radial[self.orbitals[a].radial];
                f.channel == channel && f.positive && f.level == level
            })
            .collect()
    }

    /// Free Dirac operator `H_lin - V` shifted by `-c^2`, in the basis.
    pub fn free_shifted(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |a, b| {
            let (oa, ob) = (self.orbitals[a], self.orbitals[b]);
            let diag = if a == b { self.radial[oa.radial].shifted } else { 0.0 };
            if oa.tm != ob.tm {
                return diag;
            }
            diag - self.v_radial[(oa.radial, ob.radial)]
        })
    }
}
