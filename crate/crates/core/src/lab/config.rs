//! Laboratory configuration.
//!
//! Grammar: one `key = value` per line, dotted keys group settings
//! (`scf.tol = 1e-8`), `#` starts a comment. Values are numbers, booleans,
//! quoted strings or `[a, b, ...]` lists. This is a subset of TOML, so the
//! `toml` parser does the lexing; `[section]` headers are accepted and mean
//! the same as the dotted prefix. Every key must be known.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::Value;

use crate::error::{LabError, Result};
use crate::fock::{BasisSettings, ScfOptions};
use crate::games::GameOptions;
use crate::grid::{GridSpec, Mapping};
use crate::nucleus::{NuclearModel, Potential};
use crate::radial::RadialModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NucleusKind {
    Smeared,
    Point,
    Free,
}

impl NucleusKind {
    fn name(&self) -> &'static str {
        match self {
            NucleusKind::Smeared => "smeared",
            NucleusKind::Point => "point",
            NucleusKind::Free => "free",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub grid: GridSpec,
    pub nucleus: NucleusKind,
    pub nucleus_radius: f64,
    pub nucleus_exponent: u32,
    pub c: f64,
    pub basis_size: usize,
    pub spectrum_kmax: u32,
    pub cluster_tol: f64,
    pub max_shells: usize,
    /// speeds of light for the nonrelativistic limit table
    pub c_list: Vec<f64>,
    pub nonrel_levels: usize,
    pub basis: BasisSettings,
    pub scf: ScfOptions,
    pub game: GameOptions,
    /// multi-start count for the min-max level
    pub starts: usize,
    pub n_list: Vec<usize>,
    pub kappa_list: Vec<f64>,
    /// (kappa, level) of the Schrodinger orbitals to certify
    pub propertyp_orbitals: Vec<(i32, usize)>,
    pub crosscheck: bool,
    pub crosscheck_kmax: u32,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            nucleus: NucleusKind::Smeared,
            nucleus_radius: 0.5,
            nucleus_exponent: 4,
            c: 100.0,
            basis_size: 60,
            spectrum_kmax: 3,
            cluster_tol: 1e-12,
            max_shells: 8,
            c_list: vec![20.0, 40.0, 80.0, 160.0],
            nonrel_levels: 2,
            basis: BasisSettings::default(),
            scf: ScfOptions::default(),
            game: GameOptions::default(),
            starts: 5,
            n_list: vec![2, 3],
            kappa_list: vec![0.0, 3e-3, 1e-2, 3e-2],
            propertyp_orbitals: vec![(-1, 1), (1, 0)],
            crosscheck: true,
            crosscheck_kmax: 2,
            seed: 7,
            out: PathBuf::from("dflab-out"),
        }
    }
}

fn flatten(prefix: &str, table: toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            v => {
                out.insert(key, v);
            }
        }
    }
}

fn bad(key: &str, what: &str) -> LabError {
    LabError::Config(format!("{key}: expected {what}"))
}

fn float(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "a number")),
    }
}

fn uint(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(bad(key, "a non-negative integer")),
    }
}

fn list<T>(key: &str, v: &Value, item: impl Fn(&str, &Value) -> Result<T>) -> Result<Vec<T>> {
    match v {
        Value::Array(a) => a.iter().map(|x| item(key, x)).collect(),
        _ => Err(bad(key, "a list")),
    }
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(key, "a quoted string"))
}

impl LabConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))?;
        let mut flat = BTreeMap::new();
        flatten("", table, &mut flat);
        let mut cfg = Self::default();
        for (key, v) in &flat {
            cfg.set(key, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &Value) -> Result<()> {
        let k = key;
        match key {
            "grid.size" => self.grid.size = uint(k, v)? as usize,
            "grid.r_box" => self.grid.r_box = float(k, v)?,
            "grid.gauss_order" => self.grid.gauss_order = uint(k, v)? as usize,
            "grid.map_a" => self.grid.mapping.a = float(k, v)?,
            "grid.map_b" => self.grid.mapping.b = float(k, v)?,
            "grid.map_d" => self.grid.mapping.d = float(k, v)?,
            "nucleus.kind" => {
                self.nucleus = match string(k, v)? {
                    "smeared" => NucleusKind::Smeared,
                    "point" => NucleusKind::Point,
                    "free" => NucleusKind::Free,
                    _ => return Err(bad(k, "one of \"smeared\", \"point\", \"free\"")),
                }
            }
            "nucleus.radius" => self.nucleus_radius = float(k, v)?,
            "nucleus.exponent" => self.nucleus_exponent = uint(k, v)? as u32,
            "radial.c" => self.c = float(k, v)?,
            "radial.basis_size" => self.basis_size = uint(k, v)? as usize,
            "spectrum.kmax" => self.spectrum_kmax = uint(k, v)? as u32,
            "spectrum.cluster_tol" => self.cluster_tol = float(k, v)?,
            "spectrum.max_shells" => self.max_shells = uint(k, v)? as usize,
            "spectrum.c_list" => self.c_list = list(k, v, float)?,
            "spectrum.nonrel_levels" => self.nonrel_levels = uint(k, v)? as usize,
            "basis.kmax" => self.basis.kmax = uint(k, v)? as u32,
            "basis.n_pos" => self.basis.n_pos = uint(k, v)? as usize,
            "basis.n_neg" => self.basis.n_neg = uint(k, v)? as usize,
            "scf.tol" => self.scf.tol = float(k, v)?,
            "scf.max_iter" => self.scf.max_iter = uint(k, v)? as usize,
            "scf.damping" => self.scf.damping = float(k, v)?,
            "scf.level_shift" => self.scf.level_shift = float(k, v)?,
            "scf.diis" => self.scf.diis = uint(k, v)? as usize,
            "game.starts" => self.starts = uint(k, v)? as usize,
            "game.max_rounds" => self.game.max_rounds = uint(k, v)? as usize,
            "game.fixed_tol" => self.game.fixed_tol = float(k, v)?,
            "game.cycle_window" => self.game.cycle_window = uint(k, v)? as usize,
            "game.random_rotations" => self.game.random_rotations = uint(k, v)? as usize,
            "game.local_search" => self.game.local_search = uint(k, v)? as usize,
            "run.n_list" => self.n_list = list(k, v, |k, x| uint(k, x).map(|n| n as usize))?,
            "run.kappa_list" => self.kappa_list = list(k, v, float)?,
            "run.seed" => self.seed = uint(k, v)?,
            "run.out" => self.out = PathBuf::from(string(k, v)?),
            "propertyp.orbitals" => {
                self.propertyp_orbitals = list(k, v, |k, x| {
                    let s = string(k, x)?;
                    let (a, b) = s.split_once(':').ok_or_else(|| bad(k, "entries \"kappa:level\""))?;
                    let kappa = a.trim().parse().map_err(|_| bad(k, "an integer kappa"))?;
                    let level = b.trim().parse().map_err(|_| bad(k, "a non-negative level"))?;
                    Ok((kappa, level))
                })?
            }
            "propertyp.crosscheck" => self.crosscheck = v.as_bool().ok_or_else(|| bad(k, "true or false"))?,
            "propertyp.crosscheck_kmax" => self.crosscheck_kmax = uint(k, v)? as u32,
            _ => return Err(LabError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(LabError::Config(m));
        if !(self.c > 1.0) || self.c_list.iter().any(|c| !(*c > 1.0)) {
            return fail("speeds of light must exceed 1".into());
        }
        if self.c_list.len() < 3 {
            return fail("spectrum.c_list needs at least three values".into());
        }
        if self.nucleus == NucleusKind::Smeared && (!(self.nucleus_radius > 0.0) || self.nucleus_exponent < 2) {
            return fail("nucleus.radius must be positive and nucleus.exponent at least 2".into());
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return fail("run.n_list must hold positive electron counts".into());
        }
        if self.kappa_list.is_empty() || self.kappa_list.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
            return fail("run.kappa_list must hold finite non-negative couplings".into());
        }
        if self.propertyp_orbitals.iter().any(|(k, _)| *k == 0) {
            return fail("propertyp.orbitals: kappa must be nonzero".into());
        }
        if self.spectrum_kmax == 0 || self.basis.kmax == 0 || self.crosscheck_kmax == 0 {
            return fail("kmax values must be at least 1".into());
        }
        if self.basis.n_pos == 0 || self.starts == 0 || self.nonrel_levels == 0 {
            return fail("basis.n_pos, game.starts and spectrum.nonrel_levels must be positive".into());
        }
        if !(self.scf.tol > 0.0) || !(0.0..1.0).contains(&self.scf.damping) || self.scf.max_iter == 0 {
            return fail("scf.tol must be positive, scf.damping in [0, 1), scf.max_iter positive".into());
        }
        if !(self.cluster_tol > 0.0) || !(self.game.fixed_tol > 0.0) {
            return fail("tolerances must be positive".into());
        }
        Ok(())
    }

    pub fn potential(&self) -> Result<Potential> {
        Ok(match self.nucleus {
            NucleusKind::Smeared => Potential::Smeared(
                NuclearModel::new(self.nucleus_radius, self.nucleus_exponent).map_err(|e| LabError::Config(e.to_string()))?,
            ),
            NucleusKind::Point => Potential::PointCoulomb,
            NucleusKind::Free => Potential::Free,
        })
    }

    pub fn model(&self) -> Result<RadialModel> {
        RadialModel::new(self.grid, self.potential()?, self.c, self.basis_size)
    }

    pub fn basis_settings(&self) -> BasisSettings {
        BasisSettings { cluster_tol: self.cluster_tol, max_shells: self.max_shells, ..self.basis.clone() }
    }

    pub fn game_options(&self) -> GameOptions {
        GameOptions { seed: self.seed, ..self.game }
    }

    /// The configuration in its own grammar, every key explicit.
    pub fn to_text(&self) -> String {
        let fl = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        let Mapping { a, b, d } = self.grid.mapping;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("grid.size", self.grid.size.to_string());
        kv("grid.r_box", format!("{:e}", self.grid.r_box));
        kv("grid.gauss_order", self.grid.gauss_order.to_string());
        kv("grid.map_a", format!("{a:e}"));
        kv("grid.map_b", format!("{b:e}"));
        kv("grid.map_d", format!("{d:e}"));
        kv("nucleus.kind", format!("\"{}\"", self.nucleus.name()));
        kv("nucleus.radius", format!("{:e}", self.nucleus_radius));
        kv("nucleus.exponent", self.nucleus_exponent.to_string());
        kv("radial.c", format!("{:e}", self.c));
        kv("radial.basis_size", self.basis_size.to_string());
        kv("spectrum.kmax", self.spectrum_kmax.to_string());
        kv("spectrum.cluster_tol", format!("{:e}", self.cluster_tol));
        kv("spectrum.max_shells", self.max_shells.to_string());
        kv("spectrum.c_list", format!("[{}]", fl(&self.c_list)));
        kv("spectrum.nonrel_levels", self.nonrel_levels.to_string());
        kv("basis.kmax", self.basis.kmax.to_string());
        kv("basis.n_pos", self.basis.n_pos.to_string());
        kv("basis.n_neg", self.basis.n_neg.to_string());
        kv("scf.tol", format!("{:e}", self.scf.tol));
        kv("scf.max_iter", self.scf.max_iter.to_string());
        kv("scf.damping", format!("{:e}", self.scf.damping));
        kv("scf.level_shift", format!("{:e}", self.scf.level_shift));
        kv("scf.diis", self.scf.diis.to_string());
        kv("game.starts", self.starts.to_string());
        kv("game.max_rounds", self.game.max_rounds.to_string());
        kv("game.fixed_tol", format!("{:e}", self.game.fixed_tol));
        kv("game.cycle_window", self.game.cycle_window.to_string());
        kv("game.random_rotations", self.game.random_rotations.to_string());
        kv("game.local_search", self.game.local_search.to_string());
        let ns: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        kv("run.n_list", format!("[{}]", ns.join(", ")));
        kv("run.kappa_list", format!("[{}]", fl(&self.kappa_list)));
        kv("run.seed", self.seed.to_string());
        kv("run.out", format!("{:?}", self.out.display().to_string()));
        let orbs: Vec<String> = self.propertyp_orbitals.iter().map(|(k, l)| format!("\"{k}:{l}\"")).collect();
        kv("propertyp.orbitals", format!("[{}]", orbs.join(", ")));
        kv("propertyp.crosscheck", self.crosscheck.to_string());
        kv("propertyp.crosscheck_kmax", self.crosscheck_kmax.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_keys_and_comments() {
        let cfg = LabConfig::parse(
            "# a comment\nradial.c = 50 # trailing\nrun.n_list = [2]\nrun.kappa_list = [0, 1e-2]\n[scf]\ntol = 1e-9\n",
        )
        .unwrap();
        assert_eq!(cfg.c, 50.0);
        assert_eq!(cfg.n_list, vec![2]);
        assert_eq!(cfg.kappa_list, vec![0.0, 1e-2]);
        assert_eq!(cfg.scf.tol, 1e-9);
    }

    #[test]
    fn unknown_and_mistyped_keys_are_rejected() {
        for text in ["radial.speed = 3", "radial.c = \"fast\"", "run.n_list = [0]", "scf.tol = -1", "radial.c = "] {
            let e = LabConfig::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}: {e}");
        }
    }

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = LabConfig::default();
        cfg.propertyp_orbitals = vec![(-2, 0)];
        cfg.kappa_list = vec![1e-3, 0.1 + 0.2];
        let back = LabConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }
}
