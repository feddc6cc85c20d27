use std::path::Path;
use std::process::{Command, Output};

fn dflab(args: &[&str], config: &str, dir: &Path) -> Output {
    let cfg = dir.join("lab.cfg");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    Command::new(env!("CARGO_BIN_EXE_dflab"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn invalid_key_exits_with_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflab(&["spectrum"], "radial.c = 100\nradial.colour = 1\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn impossible_electron_count_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflab(&["scf"], "run.n_list = [1000]\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unconverged_scf_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflab(&["scf"], "scf.max_iter = 1\nrun.n_list = [3]\nrun.kappa_list = [3e-2]\n", dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectrum_table_and_nonrel_limit() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflab(&["spectrum"], "spectrum.c_list = [20, 40, 80]\n", dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let shells = read_csv(&out.join("spectrum/shells.csv"));
    assert_eq!(shells[0], ["shell", "label", "energy", "shifted", "dimension", "cumulative"]);
    assert_eq!(shells[1][4], "2");
    let nonrel = read_csv(&out.join("spectrum/nonrel.csv"));
    assert_eq!(nonrel[0], ["c", "level", "error"]);
    assert_eq!(nonrel.len(), 1 + 3 * 2);
    assert!(out.join("version.txt").exists() && out.join("config.txt").exists());
}

#[test]
fn scf_runs_and_is_reproducible() {
    let cfg = "run.n_list = [2]\nrun.kappa_list = [0, 1e-2]\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(dflab(&["scf"], cfg, a.path()).status.success());
    assert!(dflab(&["scf"], cfg, b.path()).status.success());
    let rows = read_csv(&a.path().join("out/scf/scf.csv"));
    assert_eq!(rows[0][..3], ["n", "kappa", "iterations"]);
    assert_eq!(rows[1][2], "1");
    let trace = read_csv(&a.path().join("out/scf/trace_N2_k1e-2.csv"));
    assert_eq!(trace[0], ["iteration", "residual", "energy_step"]);
    assert!(trace.len() >= 2);
    for f in ["scf.csv", "trace_N2_k1e-2.csv"] {
        // parallel reductions may differ in the last bits
        let x = read_csv(&a.path().join("out/scf").join(f));
        let y = read_csv(&b.path().join("out/scf").join(f));
        assert_eq!(x.len(), y.len());
        for (u, v) in x.iter().flatten().zip(y.iter().flatten()) {
            match (u.parse::<f64>(), v.parse::<f64>()) {
                (Ok(p), Ok(q)) => assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{f}: {u} {v}"),
                _ => assert_eq!(u, v),
            }
        }
    }
}

#[test]
fn conjecture_m_closed_shell_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "run.n_list = [2]\nrun.kappa_list = [0, 1e-2]\ngame.starts = 2\ngame.random_rotations = 1\ngame.local_search = 1\n";
    let o = dflab(&["conjecture-m", "--seed", "11"], cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out/conjecture-m");
    let rows = read_csv(&out.join("conjecture_m.csv"));
    assert_eq!(rows.len(), 3);
    for r in &rows[1..] {
        assert_eq!(r[2], "closed");
        assert_eq!(r.last().unwrap(), "equal");
    }
    let report = std::fs::read_to_string(out.join("game_N2_k1e-2.txt")).unwrap();
    assert!(report.contains("fixedpoint = true"));
    assert!(report.contains("trace = iteration,inf_value,angle,source"));
    let snapshot = std::fs::read_to_string(dir.path().join("out/config.txt")).unwrap();
    assert!(snapshot.contains("run.seed = 11"));
}

#[test]
fn property_p_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflab(&["property-p"], "propertyp.orbitals = [\"-1:1\"]\npropertyp.crosscheck = false\n", dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out/property-p");
    let cert = std::fs::read_to_string(out.join("certificate_2s1_2.txt")).unwrap();
    assert!(cert.contains("verdict = true"));
    let delta = read_csv(&out.join("delta.csv"));
    assert_eq!(delta[0], ["shell", "candidate", "sup_ri", "noise_floor", "margin", "delta", "passes"]);
    let ri = read_csv(&out.join("ri_2s1_2.csv"));
    assert_eq!(ri[0][..2], ["r", "sphere_density"]);
}
