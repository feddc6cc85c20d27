//! Experiment drivers behind the command line subcommands. Each returns a
//! short human-readable summary; the numbers go to the archive.

use rayon::prelude::*;

use super::archive::{game_report_text, game_trace_rows, key_values, num, slug, RunArchive, TRACE_HEADER};
use super::config::LabConfig;
use crate::angular::RotationSU2;
use crate::error::Result;
use crate::fock::{aufbau_start, scf_selfconsistent, DfSystem, ScfResult};
use crate::games::{classify_shells, level_big_e, level_small_e, log_log_slope, GameReport, ShellKind};
use crate::propertyp::{leak_cross_check, property_p_certificate, TAIL_HIGH, TAIL_LOW, SIGNAL_FACTOR};
use crate::radial::{assemble_spectrum, nonrel_limit_study, RadialModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Scf,
    ConjectureM,
    PropertyP,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Scf => "scf",
            Command::ConjectureM => "conjecture-m",
            Command::PropertyP => "property-p",
            Command::All => "all",
        }
    }
}

/// Validate, build the model, then create the archive and run. Nothing is
/// written if the configuration or the model is rejected.
pub fn run(cmd: Command, cfg: &LabConfig) -> Result<String> {
    cfg.validate()?;
    let model = cfg.model()?;
    let sys = match cmd {
        Command::Spectrum | Command::PropertyP => None,
        _ => {
            let sys = system(cfg, &model)?;
            for &n in &cfg.n_list {
                aufbau_start(&sys, n)?;
            }
            Some(sys)
        }
    };
    let archive = RunArchive::create(&cfg.out, cfg)?;
    match (cmd, &sys) {
        (Command::Spectrum, _) => cmd_spectrum(cfg, &model, &archive),
        (Command::PropertyP, _) => cmd_property_p(cfg, &model, &archive),
        (Command::Scf, Some(sys)) => cmd_scf(cfg, sys, &archive),
        (Command::ConjectureM, Some(sys)) => cmd_conjecture_m(cfg, sys, &archive),
        (_, Some(sys)) => {
            let mut out = cmd_spectrum(cfg, &model, &archive)?;
            out += &cmd_scf(cfg, sys, &archive)?;
            out += &cmd_conjecture_m(cfg, sys, &archive)?;
            out += &cmd_property_p(cfg, &model, &archive)?;
            Ok(out)
        }
        (_, None) => unreachable!(),
    }
}

fn system(cfg: &LabConfig, model: &RadialModel) -> Result<DfSystem> {
    DfSystem::new(model, &cfg.basis_settings())
}

fn tag(n: usize, kappa: f64) -> String {
    format!("N{n}_k{}", num(kappa))
}

pub fn cmd_spectrum(cfg: &LabConfig, model: &RadialModel, archive: &RunArchive) -> Result<String> {
    let dir = archive.run_dir("spectrum")?;
    let table = assemble_spectrum(model, cfg.spectrum_kmax, cfg.cluster_tol, cfg.max_shells)?;
    let mut filled = 0;
    let rows: Vec<Vec<String>> = table
        .shells
        .iter()
        .enumerate()
        .map(|(i, s)| {
            filled += s.dimension;
            vec![
                (i + 1).to_string(),
                s.label(),
                num(s.energy),
                num(s.shifted),
                s.dimension.to_string(),
                filled.to_string(),
            ]
        })
        .collect();
    dir.write_csv("shells.csv", &["shell", "label", "energy", "shifted", "dimension", "cumulative"], rows)?;
    let mut states = Vec::new();
    for (ch, orbs) in &table.channels {
        for (i, o) in orbs.iter().filter(|o| o.is_bound(table.c)).enumerate() {
            states.push(vec![
                ch.kappa.to_string(),
                i.to_string(),
                ch.label(ch.l_large() as usize + 1 + i),
                num(o.energy),
                num(o.shifted),
                o.nodes.to_string(),
                o.spurious.to_string(),
            ]);
        }
    }
    dir.write_csv("bound_states.csv", &["kappa", "level", "label", "energy", "shifted", "nodes", "spurious"], states)?;

    let study = nonrel_limit_study(model, &cfg.c_list, cfg.nonrel_levels)?;
    let rows = study
        .rows
        .iter()
        .flat_map(|r| r.errors.iter().enumerate().map(move |(l, e)| vec![num(r.c), l.to_string(), num(*e)]))
        .collect::<Vec<_>>();
    dir.write_csv("nonrel.csv", &["c", "level", "error"], rows)?;
    dir.write_text("nonrel.txt", &key_values(&[("slope", num(study.slope))]))?;

    let dims: Vec<String> = table.shells.iter().map(|s| s.dimension.to_string()).collect();
    Ok(format!(
        "spectrum: {} shells, dimensions [{}], nonrelativistic slope {:.3}\n",
        table.shells.len(),
        dims.join(", "),
        study.slope
    ))
}

pub fn cmd_scf(cfg: &LabConfig, sys: &DfSystem, archive: &RunArchive) -> Result<String> {
    let dir = archive.run_dir("scf")?;
    let jobs: Vec<(usize, f64)> = cfg.n_list.iter().flat_map(|&n| cfg.kappa_list.iter().map(move |&k| (n, k))).collect();
    let results: Vec<ScfResult> = jobs
        .par_iter()
        .map(|&(n, kappa)| scf_selfconsistent(sys, n, kappa, &aufbau_start(sys, n)?, &cfg.scf))
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    let mut out = String::new();
    for (&(n, kappa), r) in jobs.iter().zip(&results) {
        let trace = (0..r.residuals.len()).map(|i| {
            let step = r.energy_steps.get(i).map_or(String::new(), |e| num(*e));
            vec![(i + 1).to_string(), num(r.residuals[i]), step]
        });
        dir.write_csv(&format!("trace_{}.csv", tag(n, kappa)), &["iteration", "residual", "energy_step"], trace)?;
        summary.push(vec![
            n.to_string(),
            num(kappa),
            r.iterations.to_string(),
            num(r.energy.total),
            num(r.energy.one_body),
            num(r.energy.direct),
            num(r.energy.exchange),
            num(r.negative_leak),
            r.aufbau.to_string(),
            r.multipliers_in_gap().to_string(),
        ]);
        out += &format!("scf: N={n} kappa={} converged in {} iterations, E-Nc^2={:.12e}\n", num(kappa), r.iterations, r.energy.total);
    }
    let header =
        ["n", "kappa", "iterations", "energy", "one_body", "direct", "exchange", "negative_leak", "aufbau", "multipliers_in_gap"];
    dir.write_csv("scf.csv", &header, summary)?;
    Ok(out)
}

/// Agreement verdict of one report.
pub fn verdict(r: &GameReport, scf_tol: f64) -> &'static str {
    if r.gap.gap > 10.0 * scf_tol {
        "gap"
    } else if r.classification == ShellKind::Open && r.gap.gap > 0.0 {
        "gap-below-tolerance"
    } else if r.relative_difference() <= 1e-8 {
        "equal"
    } else {
        "inconclusive"
    }
}

pub fn conjecture_m_reports(cfg: &LabConfig, sys: &DfSystem) -> Result<Vec<GameReport>> {
    let candidates = RotationSU2::candidates();
    let game = cfg.game_options();
    let jobs: Vec<(usize, f64)> = cfg.n_list.iter().flat_map(|&n| cfg.kappa_list.iter().map(move |&k| (n, k))).collect();
    jobs.par_iter()
        .map(|&(n, kappa)| {
            let big = level_big_e(sys, n, kappa, cfg.starts, cfg.seed, &cfg.scf)?;
            level_small_e(sys, &big, &candidates, &cfg.scf, &game)
        })
        .collect()
}

pub fn cmd_conjecture_m(cfg: &LabConfig, sys: &DfSystem, archive: &RunArchive) -> Result<String> {
    let dir = archive.run_dir("conjecture-m")?;
    let reports = conjecture_m_reports(cfg, sys)?;
    let mut rows = Vec::new();
    let mut out = String::new();
    for r in &reports {
        let t = tag(r.n, r.kappa);
        dir.write_text(&format!("game_{t}.txt"), &game_report_text(r))?;
        dir.write_csv(&format!("game_{t}_trace.csv"), &TRACE_HEADER, game_trace_rows(r))?;
        let v = verdict(r, cfg.scf.tol);
        rows.push(vec![
            r.n.to_string(),
            num(r.kappa),
            if r.classification == ShellKind::Closed { "closed" } else { "open" }.to_string(),
            num(r.big_e),
            num(r.small_e),
            num(r.relative_difference()),
            r.fixedpoint.to_string(),
            r.cycle.to_string(),
            num(r.projector_angle),
            num(r.gap.gap),
            r.gap.best_rotation.clone(),
            v.to_string(),
        ]);
        out += &format!(
            "conjecture-m: N={} kappa={} |E-e|/|E|={:.2e} gap={:.3e} -> {v}\n",
            r.n,
            num(r.kappa),
            r.relative_difference(),
            r.gap.gap
        );
    }
    let header = [
        "n",
        "kappa",
        "shell",
        "big_e",
        "small_e",
        "relative_difference",
        "fixedpoint",
        "cycle",
        "projector_angle",
        "gap",
        "gap_rotation",
        "verdict",
    ];
    dir.write_csv("conjecture_m.csv", &header, rows)?;
    // gap against kappa for each open shell
    let mut slopes = Vec::new();
    for &n in &cfg.n_list {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .filter(|r| r.n == n && r.kappa > 0.0 && r.gap.gap > 0.0 && r.classification == ShellKind::Open)
            .map(|r| (r.kappa, r.gap.gap))
            .collect();
        if pts.len() >= 2 {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let s = log_log_slope(&x, &y);
            slopes.push(vec![n.to_string(), num(s)]);
            out += &format!("conjecture-m: N={n} gap log-log slope {s:.3}\n");
        }
    }
    dir.write_csv("gap_slope.csv", &["n", "slope"], slopes)?;
    Ok(out)
}

pub fn cmd_property_p(cfg: &LabConfig, model: &RadialModel, archive: &RunArchive) -> Result<String> {
    let dir = archive.run_dir("property-p")?;
    let candidates = RotationSU2::candidates();
    let certs = cfg
        .propertyp_orbitals
        .par_iter()
        .map(|&(kappa, level)| property_p_certificate(model, kappa, level, &candidates))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Vec::new();
    let mut out = String::new();
    for cert in &certs {
        let s = slug(&cert.shell);
        let mut header = vec!["r".to_string(), "sphere_density".to_string()];
        header.extend(cert.candidates.iter().map(|c| format!("r_I_{}", slug(&c.name))));
        let header: Vec<&str> = header.iter().map(|h| h.as_str()).collect();
        let rows = (0..cert.radii.len()).map(|p| {
            let mut row = vec![num(cert.radii[p]), num(cert.sphere_density[p])];
            row.extend(cert.candidates.iter().map(|c| num(c.ri[p])));
            row
        });
        dir.write_csv(&format!("ri_{s}.csv"), &header, rows)?;
        for c in &cert.candidates {
            table.push(vec![
                cert.shell.clone(),
                c.name.clone(),
                num(c.sup_ri),
                num(c.noise_floor),
                num(c.margin),
                num(c.delta),
                c.passes().to_string(),
            ]);
        }
        let best = cert.winner().map_or("none".to_string(), |w| w.name.clone());
        dir.write_text(
            &format!("certificate_{s}.txt"),
            &key_values(&[
                ("shell", format!("\"{}\"", cert.shell)),
                ("verdict", cert.verdict.to_string()),
                ("best", format!("\"{best}\"")),
                ("window_start", num(cert.window.0)),
                ("window_end", num(cert.window.1)),
                ("tail_high", num(TAIL_HIGH)),
                ("tail_low", num(TAIL_LOW)),
                ("signal_factor", num(SIGNAL_FACTOR)),
            ]),
        )?;
        out += &format!("property-p: {} verdict={} witness={best}\n", cert.shell, cert.verdict);
    }
    dir.write_csv("delta.csv", &["shell", "candidate", "sup_ri", "noise_floor", "margin", "delta", "passes"], table)?;

    if cfg.crosscheck {
        let a = candidates[0].1;
        let checks = cfg
            .propertyp_orbitals
            .iter()
            .map(|&(kappa, level)| leak_cross_check(model, kappa, level, &a, cfg.crosscheck_kmax).map(|x| (kappa, level, x)))
            .collect::<Result<Vec<_>>>()?;
        let rows = checks.iter().map(|(k, l, x)| {
            vec![k.to_string(), l.to_string(), num(x.c), num(x.t_full), num(x.f_norm), num(x.prediction), num(x.ratio())]
        });
        dir.write_csv("leak.csv", &["kappa", "level", "c", "t_full", "f_norm", "prediction", "ratio"], rows)?;
        let rows = checks
            .iter()
            .flat_map(|(k, l, x)| x.t_by_count.iter().map(move |(n, t)| vec![k.to_string(), l.to_string(), n.to_string(), num(*t)]));
        dir.write_csv("leak_by_count.csv", &["kappa", "level", "states_per_channel", "t"], rows)?;
        for (k, l, x) in &checks {
            out += &format!("property-p: leak kappa={k} level={l} ratio to ||f||/2c^3 = {:.4}\n", x.ratio());
        }
    }
    Ok(out)
}

/// Open/closed classification of each configured electron count.
pub fn shell_kinds(cfg: &LabConfig, sys: &DfSystem) -> Result<Vec<(usize, ShellKind)>> {
    cfg.n_list.iter().map(|&n| Ok((n, classify_shells(n, &sys.basis.spectrum)?.kind()))).collect()
}
