//! Merging channel spectra into degenerate shells.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{solve_channel, Channel, RadialModel, RadialOrbital};
use crate::error::{LabError, Result};

#[derive(Debug, Clone)]
pub struct Shell {
    pub energy: f64,
    pub shifted: f64,
    pub dimension: usize,
    /// (channel, index among the bound states of that channel)
    pub members: Vec<(Channel, usize)>,
}

impl Shell {
    pub fn label(&self) -> String {
        self.members
            .iter()
            .map(|(ch, i)| ch.label(ch.l_large() as usize + 1 + i))
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub c: f64,
    pub shells: Vec<Shell>,
    /// every solved eigenpair per channel, ascending
    pub channels: BTreeMap<Channel, Vec<RadialOrbital>>,
}

impl SpectrumTable {
    /// Bound states of one channel, ascending.
    pub fn bound(&self, channel: Channel) -> Vec<&RadialOrbital> {
        self.channels
            .get(&channel)
            .map(|v| v.iter().filter(|o| o.is_bound(self.c)).collect())
            .unwrap_or_default()
    }

    /// States below `-c^2`, ordered from the gap edge downwards.
    pub fn negative(&self, channel: Channel) -> Vec<&RadialOrbital> {
        self.channels
            .get(&channel)
            .map(|v| v.iter().rev().filter(|o| o.energy <= -self.c * self.c).collect())
            .unwrap_or_default()
    }
}

/// Solve all channels with `|kappa| <= kmax` and cluster the bound states
/// into at most `max_shells` shells. `cluster_tol` is relative to `c^2`.
pub fn assemble_spectrum(model: &RadialModel, kmax: u32, cluster_tol: f64, max_shells: usize) -> Result<SpectrumTable> {
    if kmax == 0 {
        return Err(LabError::InvalidParameter("kmax must be at least 1".into()));
    }
    if !(cluster_tol > 0.0) {
        return Err(LabError::InvalidParameter("cluster tolerance must be positive".into()));
    }
    let channels = Channel::up_to(kmax);
    let solved: Vec<(Channel, Vec<RadialOrbital>)> = channels
        .par_iter()
        .map(|&ch| solve_channel(model, ch).map(|orbs| (ch, orbs)))
        .collect::<Result<_>>()?;
    let c = model.c;
    let tol = cluster_tol * c * c;
    let mut states: Vec<(f64, f64, Channel, usize)> = Vec::new();
    for (ch, orbs) in &solved {
        for (i, o) in orbs.iter().filter(|o| o.is_bound(c)).enumerate() {
            states.push((o.shifted, o.energy, *ch, i));
        }
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut shells: Vec<Shell> = Vec::new();
    for (k, &(shifted, energy, ch, i)) in states.iter().enumerate() {
        let joins = !shells.is_empty() && shifted - states[k - 1].0 <= tol;
        if joins {
            let s = shells.last_mut().unwrap();
            s.dimension += ch.degeneracy();
            s.members.push((ch, i));
            continue;
        }
        if k > 0 {
            let gap = shifted - states[k - 1].0;
            if gap < 10.0 * tol {
                return Err(LabError::AmbiguousClustering { a: states[k - 1].1, b: energy, tol });
            }
        }
        if shells.len() == max_shells {
            break;
        }
        shells.push(Shell { energy, shifted, dimension: ch.degeneracy(), members: vec![(ch, i)] });
    }
    for s in &shells {
        for &(ch, i) in &s.members {
            let orb = solved.iter().find(|(c2, _)| *c2 == ch).unwrap().1.iter().filter(|o| o.is_bound(c)).nth(i).unwrap();
            if orb.spurious {
                return Err(LabError::SpuriousState {
                    kappa: ch.kappa,
                    detail: format!("bound state {i} at lambda - c^2 = {:.10e} has {} nodes", orb.shifted, orb.nodes),
                });
            }
        }
    }
    Ok(SpectrumTable { c, shells, channels: solved.into_iter().collect() })
}
