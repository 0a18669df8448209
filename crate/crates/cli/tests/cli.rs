//! End-to-end runs of the `dirac` binary against pinned outputs in `tests/golden`.
//! Set `DIRAC_UPDATE_GOLDEN=1` to rewrite them after an intended schema change.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const C15: &str = "preset:example-c15 0.1 0.1 0.1 0.1";

fn dirac(args: &[&str]) -> Output {
    dirac_env(args, &[])
}

fn dirac_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dirac"));
    cmd.args(args).env_remove("DIRAC_SPECTRA_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn split(line: &str) -> Vec<&str> {
    line.split(' ').flat_map(|w| w.split(',')).collect()
}

fn close(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-10 + 1e-8 * x.abs().max(y.abs()),
        _ => false,
    }
}

/// Same layout and text; numbers equal up to cross-platform rounding.
fn assert_matches_golden(name: &str, args: &[&str]) {
    let out = dirac(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let actual = String::from_utf8(out.stdout).unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("DIRAC_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let (a, e): (Vec<_>, Vec<_>) = (actual.lines().collect(), expected.lines().collect());
    assert_eq!(a.len(), e.len(), "{name}: line count");
    for (i, (la, le)) in a.iter().zip(&e).enumerate() {
        let (fa, fe) = (split(la), split(le));
        let same = fa.len() == fe.len() && fa.iter().zip(&fe).all(|(x, y)| close(x, y));
        assert!(same, "{name}:{}:\n  got      {la}\n  expected {le}", i + 1);
    }
}

fn c15(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).chain(C15.split(' ').map(String::from)).collect()
}

fn run_c15(name: &str, args: &[&str]) {
    let full = c15(args);
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    assert_matches_golden(name, &refs);
}

#[test]
fn free_spectrum_is_integer() {
    assert_matches_golden("spectrum_zero.csv", &["spectrum", "--bc", "per-", "--K", "64", "--nmax", "20", "preset:zero"]);
    let out = String::from_utf8(dirac(&["spectrum", "--bc", "per-", "--K", "64", "--nmax", "20", "preset:zero"]).stdout).unwrap();
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 20);
    for r in rows {
        let f: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[1], f[0]);
        assert_eq!(f[3], f[0]);
        assert_eq!(f[7], 0.0);
    }
}

#[test]
fn golden_tables() {
    run_c15("spectrum_c15_per_minus.csv", &["spectrum", "--bc", "per-", "--nmax", "9"]);
    run_c15("spectrum_c15_dir_monodromy.csv", &["spectrum", "--bc", "dir", "--method", "monodromy", "--nmax", "4"]);
    run_c15("coeffs_c15.csv", &["coeffs", "--n", "3", "--z", "0.1,0.05", "--csv"]);
    run_c15("asymptotics_c15.csv", &["asymptotics", "--n-range", "5:15"]);
    run_c15("maps_c15.csv", &["maps", "--n-cut", "2", "--nmax", "6"]);
    run_c15("riesz_c15.csv", &["riesz", "--bc", "per-", "--n-range", "5:25", "--csv"]);
    assert_matches_golden("basic_eq_xt.csv", &["basic-eq", "--n-range", "5:9", "--potential", "preset:xt 1"]);
}

#[test]
fn riesz_json_reports_the_basis_verdict() {
    let out = dirac(&c15(&["riesz", "--bc", "per-", "--n-range", "5:25"]).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "riesz/1");
    assert_eq!(v["data"]["verdict"], "riesz-basis");
    assert_eq!(v["data"]["bc"], "per-");
    assert!(v["data"]["kappa"].as_f64().unwrap() < 1.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| dirac(args).status.code();
    assert_eq!(code(&["basic-eq", "--n-range", "8:20", "badfile"]), Some(1));
    assert_eq!(code(&["spectrum", "--bogus", "preset:zero"]), Some(1));
    assert_eq!(code(&["spectrum", "preset:nope"]), Some(1));
    assert_eq!(code(&["riesz", "--n-range", "9:5", "preset:zero"]), Some(1));
    assert_eq!(code(&["spectrum", "--bc", "dir", "--method", "galerkin", "--K", "2", "preset:zero"]), Some(1));
    assert_eq!(code(&["spectrum", "--bc", "per-", "--nmax", "2", "--method", "monodromy", "preset:example-c15", "3", "3", "3", "3"]), Some(2));
    assert_eq!(code(&["basic-eq", "--n-range", "1:2", "preset:example-c15", "2", "2", "2", "2"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
    let bad_threads = dirac_env(&["spectrum", "preset:zero"], &[("DIRAC_SPECTRA_THREADS", "zero")]);
    assert_eq!(bad_threads.status.code(), Some(1));
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["spectrum", "coeffs", "basic-eq", "riesz", "asymptotics", "maps", "experiment"] {
        let out = dirac(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
        assert!(String::from_utf8(out.stdout).unwrap().contains("Usage"));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["basic-eq", "--n-range", "3:12", "--potential", "preset:xt -1"];
    let one = dirac_env(&args, &[("DIRAC_SPECTRA_THREADS", "1")]);
    let four = dirac_env(&args, &[("DIRAC_SPECTRA_THREADS", "4")]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn experiments_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gaps.toml",
        "kind = \"gap-decay\"\npotential = \"random\"\nn_range = [6, 14]\nweight = \"abel 0.5\"\n\
         output_csv = \"out/gaps.csv\"\noutput_json = \"gaps.json\"\n\n[random]\nseed = 5\nmodes = 2\namplitude = 0.1\nt = 1.0\n",
    );
    let cfg = cfg.to_str().unwrap();
    let first = dirac(&["experiment", "run", cfg]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let csv = std::fs::read(dir.path().join("out/gaps.csv")).unwrap();
    let json = std::fs::read(dir.path().join("gaps.json")).unwrap();
    let second = dirac_env(&["experiment", "run", cfg], &[("DIRAC_SPECTRA_THREADS", "3")]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(csv, std::fs::read(dir.path().join("out/gaps.csv")).unwrap());
    assert_eq!(json, std::fs::read(dir.path().join("gaps.json")).unwrap());
    let summary: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(summary["schema"], "gap-decay/1");
    assert_eq!(summary["data"]["checks_passed"], true);
    assert_eq!(summary["data"]["symmetry"]["Xt"]["t"], 1.0);
}

#[test]
fn basis_demo_reproduces_the_example_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("0.1 0.1 0.1 0.1", "per-", "[5, 25]", "riesz-basis"),
        ("0.2 0.1 0.2 0.1", "per-", "[5, 25]", "no-basis"),
        ("0.2 0.1 0.2 0.1", "per+", "[4, 24]", "riesz-basis"),
    ];
    for (i, (params, bc, range, verdict)) in cases.iter().enumerate() {
        let cfg = write_config(
            dir.path(),
            &format!("demo{i}.toml"),
            &format!("kind = \"basis-demo\"\npotential = \"preset:example-c15 {params}\"\nbc = \"{bc}\"\nn_range = {range}\n"),
        );
        let out = dirac(&["experiment", "run", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["data"]["checks_passed"], true);
        assert_eq!(v["data"]["verdict"], *verdict, "{params} {bc}");
        assert!(!v["data"]["cross_checks"].as_array().unwrap().is_empty());
    }
}

#[test]
fn bad_configs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "a.toml", "kind = \"gap-decay\"\npotential = \"preset:zero\"\nn_range = [2, 6]\ncolour = 1\n");
    assert_eq!(dirac(&["experiment", "run", unknown.to_str().unwrap()]).status.code(), Some(1));
    let no_bc = write_config(dir.path(), "b.toml", "kind = \"basis-demo\"\npotential = \"preset:zero\"\nn_range = [2, 6]\n");
    assert_eq!(dirac(&["experiment", "run", no_bc.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(dirac(&["experiment", "run", "/nonexistent/config.toml"]).status.code(), Some(1));
}
