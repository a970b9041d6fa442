use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use transduce_core::dynamics::solve_closed_form_lorentzian;
use transduce_core::{AtomParams, PulseSpec, TimeGrid};

fn transduce(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transduce"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRANSDUCE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> &Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error output is JSON")
}

/// Header plus numeric rows of a CSV written by the tool.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let j = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[j]).collect()
}

fn sidecar(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["meta"].clone()
}

#[test]
fn simulate_matches_library() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("c.json");
    std::fs::write(
        &config,
        r#"{
            "atom": {"gamma": 1.0},
            "spectrum": {"kind": "lorentzian", "kappa": 10.0},
            "pulse": {"shape": "gaussian", "tau_f": 0.1},
            "grid": {"t0": -1.0, "t_max": 20.0, "dt": 0.001}
        }"#,
    )
    .unwrap();
    ok(&transduce(&["simulate", "--config", "c.json", "--out", "run"], tmp.path()));
    let (header, rows) = read_csv(&tmp.path().join("run/trajectory.csv"));
    assert_eq!(header, ["t", "re_c", "im_c", "p"]);
    let cli_max = column(&header, &rows, "p").into_iter().fold(0.0, f64::max);

    let atom = AtomParams::new(1.0).unwrap();
    let grid = TimeGrid::spanning(-1.0, 20.0, 0.001).unwrap();
    let lib = solve_closed_form_lorentzian(&atom, 10.0, Some(&PulseSpec::gaussian(0.1).unwrap()), &grid).unwrap();
    assert_eq!(rows.len(), grid.len());
    assert!((cli_max - lib.max_p().0).abs() < 1e-4, "{cli_max} vs {}", lib.max_p().0);

    let meta = sidecar(&tmp.path().join("run/trajectory.json"));
    assert_eq!(meta["trajectory"]["solver"], "closed_form");
    assert_eq!(meta["trajectory"]["params_digest"], lib.params_digest.as_str());
}

#[test]
fn zero_step_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("c.json"), r#"{"grid": {"dt": 0}}"#).unwrap();
    let out = transduce(&["simulate", "--config", "c.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["field"], "grid.dt");

    let out = transduce(&["simulate", "--dt=-1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["field"], "grid.dt");
}

#[test]
fn unknown_keys_and_figures_rejected() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("c.json"), "{\n  \"pulse\": {\"width\": 2}\n}").unwrap();
    let out = transduce(&["validate", "c.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["line"], 2);
    assert!(err["error"]["message"].as_str().unwrap().contains("width"));

    let out = transduce(&["figure", "fig7"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["field"], "figure");
}

#[test]
fn validate_reports_mode_fractions() {
    let tmp = TempDir::new().unwrap();
    let ratio = |text: &str| {
        std::fs::write(tmp.path().join("c.json"), text).unwrap();
        let out = transduce(&["validate", "c.json"], tmp.path());
        let v: Value = serde_json::from_slice(&ok(&out).stdout).unwrap();
        v["atom"]["gamma_p_ratio"].as_f64().unwrap()
    };
    assert_eq!(ratio("{}"), 1.0);
    assert!((ratio(r#"{"atom": {"preset": "free_space"}}"#) - 0.11937).abs() < 1e-5);
    assert_eq!(ratio(r#"{"atom": {"preset": "waveguide_1d"}}"#), 0.5);
}

#[test]
fn validated_config_reproduces_the_run() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("c.json"),
        r#"{"scenario": "simulate", "pulse": {"shape": "decaying_exp", "tau_f": 0.5}, "solver": "volterra"}"#,
    )
    .unwrap();
    let out = ok(&transduce(&["validate", "c.json", "--kappa", "3", "--out", "a"], tmp.path())).stdout.clone();
    std::fs::write(tmp.path().join("resolved.json"), &out).unwrap();
    ok(&transduce(&["simulate", "--config", "c.json", "--kappa", "3", "--out", "a"], tmp.path()));
    ok(&transduce(&["simulate", "--config", "resolved.json", "--out", "b"], tmp.path()));
    ok(&transduce(&["simulate", "--config", "resolved.json", "--out", "c"], tmp.path()));
    let read = |d: &str| std::fs::read(tmp.path().join(d).join("trajectory.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_eq!(read("b"), read("c"));
}

#[test]
fn flags_override_config_and_env_sets_default_dir() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("c.json"), r#"{"pulse": {"tau_f": 4.0}, "output_dir": "from_file"}"#).unwrap();
    let out = transduce(&["validate", "c.json", "--tau-f", "0.25", "--pulse", "rising_exp", "--gamma-p-ratio", "0.5"], tmp.path());
    let v: Value = serde_json::from_slice(&ok(&out).stdout).unwrap();
    assert_eq!(v["pulse"]["tau_f"], 0.25);
    assert_eq!(v["pulse"]["shape"], "rising_exp");
    assert_eq!(v["atom"]["gamma_p_ratio"], 0.5);
    assert_eq!(v["output_dir"], "from_file");

    let out = Command::new(env!("CARGO_BIN_EXE_transduce"))
        .args(["decay", "--kappa", "5"])
        .current_dir(tmp.path())
        .env("TRANSDUCE_OUT_DIR", "from_env")
        .output()
        .unwrap();
    ok(&out);
    assert!(tmp.path().join("from_env/decay.csv").exists());
}

#[test]
fn fig2d_bundle_has_three_trajectories() {
    let tmp = TempDir::new().unwrap();
    ok(&transduce(&["figure", "fig2d", "--out", "o"], tmp.path()));
    let dir = tmp.path().join("o/fig2d");
    let mut peaks = Vec::new();
    for name in ["markov", "lorentzian_kappa10", "lorentzian_kappa1"] {
        let (header, rows) = read_csv(&dir.join(format!("{name}.csv")));
        peaks.push(column(&header, &rows, "p").into_iter().fold(0.0, f64::max));
    }
    assert!(peaks[2] > 0.96, "{peaks:?}");
    assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2], "{peaks:?}");
}

#[test]
fn fig4_bundles_peak_near_unit_pulse_length() {
    let tmp = TempDir::new().unwrap();
    for id in ["fig4d", "fig4e", "fig4f"] {
        ok(&transduce(&["figure", id, "--out", "o"], tmp.path()));
        let (header, rows) = read_csv(&tmp.path().join(format!("o/{id}/sweep.csv")));
        assert_eq!(rows.len(), 625);
        let p = column(&header, &rows, "p_max");
        let tau = column(&header, &rows, "tau_f");
        let best = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
        assert!((0.5..=2.0).contains(&tau[best]), "{id}: {}", tau[best]);
    }
}

#[test]
fn fig5a_fock_and_coherent_agree() {
    let tmp = TempDir::new().unwrap();
    ok(&transduce(&["figure", "fig5a", "--out", "o"], tmp.path()));
    let (header, rows) = read_csv(&tmp.path().join("o/fig5a/linear.csv"));
    let fock = column(&header, &rows, "y_fock");
    let coherent = column(&header, &rows, "y_coherent");
    assert!(fock.iter().zip(&coherent).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn fig6_weak_coupling_decays_at_gamma() {
    let tmp = TempDir::new().unwrap();
    ok(&transduce(&["figure", "fig6", "--out", "o"], tmp.path()));
    let meta = sidecar(&tmp.path().join("o/fig6/bundle.json"));
    let rate = meta["summary"]["exponential_fits"]["p_kappa100"]["fit"]["rate"].as_f64().unwrap();
    assert!((rate - 1.0).abs() < 0.02, "{rate}");
    let (header, _) = read_csv(&tmp.path().join("o/fig6/decay.csv"));
    assert_eq!(header.len(), 9);
}

#[test]
fn remaining_scenarios_write_bundles() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("s.json"),
        r#"{"sweep": {"tau_f": {"min": 0.5, "max": 2.0, "points": 3}, "kappa": {"min": 1.0, "max": 10.0, "points": 2}}}"#,
    )
    .unwrap();
    ok(&transduce(&["sweep", "--config", "s.json", "--out", "o"], tmp.path()));
    let (_, rows) = read_csv(&tmp.path().join("o/sweep.csv"));
    assert_eq!(rows.len(), 6);
    assert!(sidecar(&tmp.path().join("o/sweep.json"))["argmax"].is_object());

    ok(&transduce(&["delta-rise", "--kappa", "10", "--out", "o"], tmp.path()));
    let (header, _) = read_csv(&tmp.path().join("o/rise.csv"));
    assert_eq!(header, ["t", "c_r", "dc_r"]);

    ok(&transduce(&["detector-compare", "--out", "o"], tmp.path()));
    let meta = sidecar(&tmp.path().join("o/detectors.json"));
    let fock = meta["atom"]["peak_fock"].as_f64().unwrap();
    let bloch = meta["atom"]["peak_coherent"].as_f64().unwrap();
    assert!(fock - bloch > 0.1, "{fock} {bloch}");

    let out = transduce(&["sweep", "--pulse", "delta"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
