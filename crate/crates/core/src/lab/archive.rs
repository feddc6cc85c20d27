//! Run directories: config snapshot, version stamp, CSV tables and
//! key-value reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::games::{GameReport, ShellKind};
use crate::lab::config::LabConfig;

/// Shortest round-trip form of a float.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// File-name form of a label such as `2p1/2`.
pub fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

#[derive(Debug, Clone)]
pub struct RunArchive {
    pub root: PathBuf,
}

impl RunArchive {
    /// Create `root` with the config snapshot and version stamp.
    pub fn create(root: &Path, cfg: &LabConfig) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        let a = Self { root: root.to_path_buf() };
        a.write_text("config.txt", &cfg.to_text())?;
        a.write_text("version.txt", &format!("dflab {}\n", env!("CARGO_PKG_VERSION")))?;
        Ok(a)
    }

    /// Per-run subdirectory; each has a single writer.
    pub fn run_dir(&self, name: &str) -> Result<RunArchive> {
        let root = self.root.join(name);
        std::fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn write_csv<I>(&self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let csv_err = |e: csv::Error| LabError::Io(std::io::Error::other(e));
        let mut w = csv::Writer::from_path(self.path(name)).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `key = value` lines in the config grammar.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        writeln!(s, "{k} = {v}").unwrap();
    }
    s
}

pub fn game_report_text(r: &GameReport) -> String {
    let kind = match r.classification {
        ShellKind::Closed => "closed",
        ShellKind::Open => "open",
    };
    let mut pairs = vec![
        ("n", r.n.to_string()),
        ("kappa", num(r.kappa)),
        ("c", num(r.c)),
        ("classification", format!("\"{kind}\"")),
        ("big_e", num(r.big_e)),
        ("small_e", num(r.small_e)),
        ("relative_difference", num(r.relative_difference())),
        ("fixedpoint", r.fixedpoint.to_string()),
        ("cycle", r.cycle.to_string()),
        ("projector_angle", num(r.projector_angle)),
        ("gap", num(r.gap.gap)),
        ("gap_rotation", format!("\"{}\"", r.gap.best_rotation)),
        ("gap_relaxation", num(r.gap.relaxation)),
        ("iterations", r.trace.len().to_string()),
    ];
    for g in &r.gap.per_rotation {
        pairs.push(("rotation", format!("\"{}\" leak={} gap={}", g.rotation, num(g.leak), num(g.gap))));
    }
    let mut s = key_values(&pairs);
    s.push_str("trace = iteration,inf_value,angle,source\n");
    for t in &r.trace {
        writeln!(s, "{},{},{},{}", t.iteration, num(t.inf_value), num(t.angle), t.source).unwrap();
    }
    s
}

pub const TRACE_HEADER: [&str; 4] = ["iteration", "inf_value", "angle", "source"];

pub fn game_trace_rows(r: &GameReport) -> Vec<Vec<String>> {
    r.trace.iter().map(|t| vec![t.iteration.to_string(), num(t.inf_value), num(t.angle), t.source.clone()]).collect()
}
