//! Closed/open shell classification of an electron count.

use crate::error::{LabError, Result};
use crate::fock::OneParticleBasis;
use crate::radial::SpectrumTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellKind {
    Closed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellSplit {
    pub n: usize,
    /// number of completely filled shells
    pub filled: usize,
    /// electrons in the partially filled shell
    pub k: usize,
    /// dimension of shell `filled + 1` (0 if the table has no such shell)
    pub d: usize,
}

impl ShellSplit {
    pub fn kind(&self) -> ShellKind {
        if self.k == 0 {
            ShellKind::Closed
        } else {
            ShellKind::Open
        }
    }

    /// Basis spin-orbitals of the filled shells.
    pub fn filled_orbitals(&self, basis: &OneParticleBasis) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for s in 0..self.filled {
            out.extend(shell_orbitals(basis, s)?);
        }
        Ok(out)
    }

    /// Basis spin-orbitals of the partially filled (or next) shell.
    pub fn open_orbitals(&self, basis: &OneParticleBasis) -> Result<Vec<usize>> {
        shell_orbitals(basis, self.filled)
    }
}

/// Spin-orbitals spanning shell `index` of the basis spectrum.
pub fn shell_orbitals(basis: &OneParticleBasis, index: usize) -> Result<Vec<usize>> {
    let shell = basis.spectrum.shells.get(index).ok_or(LabError::NotEnoughStates {
        requested: index + 1,
        available: basis.spectrum.shells.len(),
    })?;
    let mut out = Vec::new();
    for &(ch, level) in &shell.members {
        let orbs = basis.level_orbitals(ch, level);
        if orbs.is_empty() {
            return Err(LabError::NotEnoughStates { requested: level + 1, available: level });
        }
        out.extend(orbs);
    }
    out.sort_unstable();
    Ok(out)
}

pub fn classify_shells(n: usize, spectrum: &SpectrumTable) -> Result<ShellSplit> {
    let mut filled = 0;
    let mut count = 0;
    for shell in &spectrum.shells {
        if count + shell.dimension > n {
            return Ok(ShellSplit { n, filled, k: n - count, d: shell.dimension });
        }
        count += shell.dimension;
        filled += 1;
        if count == n {
            let d = spectrum.shells.get(filled).map_or(0, |s| s.dimension);
            return Ok(ShellSplit { n, filled, k: 0, d });
        }
    }
    if n == 0 {
        let d = spectrum.shells.first().map_or(0, |s| s.dimension);
        return Ok(ShellSplit { n, filled: 0, k: 0, d });
    }
    Err(LabError::NotEnoughStates { requested: n, available: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::test_system;

    #[test]
    fn default_configuration() {
        let sys = test_system();
        let sp = &sys.basis.spectrum;
        let two = classify_shells(2, sp).unwrap();
        assert_eq!((two.filled, two.k, two.kind()), (1, 0, ShellKind::Closed));
        let three = classify_shells(3, sp).unwrap();
        assert_eq!((three.filled, three.k, three.d, three.kind()), (1, 1, 2, ShellKind::Open));
        let zero = classify_shells(0, sp).unwrap();
        assert_eq!((zero.filled, zero.k), (0, 0));
        assert!(classify_shells(10_000, sp).is_err());
        assert_eq!(three.filled_orbitals(&sys.basis).unwrap(), vec![0, 1]);
        assert_eq!(three.open_orbitals(&sys.basis).unwrap().len(), 2);
    }
}
