use std::process::{Command, Output};

use serde_json::Value;
use tra_cli::config::{Command as Job, Format};
use tra_cli::output::Report;

fn tra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tra")).args(args).output().expect("run tra")
}

fn json(args: &[&str]) -> Value {
    let out = tra(args);
    assert!(out.status.success(), "tra {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error(out: &Output) -> Value {
    serde_json::from_slice::<Value>(&out.stderr).expect("stderr carries a JSON error")["error"].clone()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn coulomb_and_oscillator_spectra() {
    let r = json(&["spectrum", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--kmax", "2", "--reproducible"]);
    let e = floats(&r["results"]["energies"]);
    for (got, want) in e.iter().zip([-0.5, -0.125, -0.055_555_6]) {
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }
    assert_eq!(e.len(), 3);
    for level in r["results"]["levels"].as_array().unwrap() {
        assert!(level["rel_delta"].as_f64().unwrap() < 1e-8);
    }

    let r = json(&["spectrum", "--model", "oscillator", "--param", "omega=1", "--param", "ell=0", "--kmax", "0", "--reproducible"]);
    assert_eq!(floats(&r["results"]["energies"]), vec![1.5]);
}

#[test]
fn validation_failures_exit_2_with_an_error_object() {
    let out = tra(&["spectrum", "--model", "morse", "--param", "v0=0.1", "--param", "v1=-1", "--param", "alpha=1", "--route", "cdh"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error(&out);
    assert_eq!(e["kind"], "constraint");
    assert!(e["message"].as_str().unwrap().contains("alpha^2/8"));
    assert!(out.stdout.is_empty());

    for args in [
        &["spectrum", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--param", "bogus=1"][..],
        &["spectrum", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--tol-oracle", "0"],
        &["spectrum", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--M", "0"],
        &["spectrum", "--model", "nope"],
        &["spectrum", "--no-such-flag"],
        &["orthocheck", "--family", "krawtchouk", "--param", "N=4", "--param", "gamma=0.3", "--param", "extra=2"],
    ] {
        let out = tra(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error(&out)["exit_code"], 2);
    }
}

#[test]
fn numerical_failures_exit_3() {
    // a tolerance below machine precision cannot be met
    let out = tra(&["orthocheck", "--family", "mp", "--param", "mu=1", "--param", "theta=1", "--degree", "2", "--tol-quad", "1e-17"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error(&out)["kind"], "quadrature_non_convergence");
}

#[test]
fn coulomb_phase_shift_and_grid_order() {
    let r = json(&["phaseshift", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--energy", "0.5", "--reproducible"]);
    let phase = r["results"]["points"][0]["phase"].as_f64().unwrap();
    assert!((phase.abs() - 0.301_640_3).abs() < 1e-7);

    let r = json(&["phaseshift", "--model", "eckart", "--param", "v0=-2", "--param", "v1=0.8", "--param", "lambda=1.1", "--grid", "2:0.5:4", "--fit", "--reproducible"]);
    let energies: Vec<f64> = r["results"]["points"].as_array().unwrap().iter().map(|p| p["energy"].as_f64().unwrap()).collect();
    assert_eq!(energies, vec![2.0, 1.5, 1.0, 0.5]);
    for p in r["results"]["points"].as_array().unwrap() {
        assert!(p["fit"]["phase_error"].as_f64().unwrap() < 1e-3);
    }
    let notes = r["diagnostics"]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("a = b = 0.5")));
    assert_eq!(r["diagnostics"]["settings"]["wilson_a"].as_f64(), Some(0.5));
}

#[test]
fn reports_round_trip_and_are_reproducible() {
    let args = ["poly-eval", "--family", "cdh", "--param", "mu=1", "--param", "a=0.7", "--param", "b=1.1", "--degree", "6", "--grid", "0.1:3:5", "--reproducible", "--seed", "7"];
    let a = tra(&args);
    let b = tra(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(report.schema_version, 1);
    assert_eq!(report.command, "poly-eval");
    assert_eq!(report.inputs.command, Job::PolyEval);
    assert_eq!(report.inputs.format, Format::Json);
    assert_eq!(report.inputs.seed, 7);
    assert_eq!(report.inputs.params["a"], 0.7);
    assert!(report.diagnostics.timestamp.is_none());
    // every float carries 17 significant digits and reparses to the same value
    let again = tra_cli::output::to_json(&report).unwrap();
    assert_eq!(again, text);

    let timed: Report = serde_json::from_slice(&tra(&args[..args.len() - 3]).stdout).unwrap();
    assert!(timed.diagnostics.timestamp.is_some());
}

#[test]
fn csv_is_a_flat_projection() {
    let out = tra(&["spectrum", "--model", "coulomb", "--param", "Z=-2", "--param", "ell=1", "--kmax", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,closed_form,oracle,abs_delta,rel_delta");
    assert_eq!(lines.len(), 5);
    let e1: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((e1 + 2.0 / 9.0).abs() < 1e-15);
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("tra-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = tra(&["spectrum", "--model", "log_spectrum", "--param", "mu=-3", "--param", "lambda=1", "--out", p, "--reproducible"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(report.results["oracle"].is_null());
    assert!(!report.results["energies"].as_array().unwrap().is_empty());
}

#[test]
fn tridiag_audits() {
    let r = json(&["tridiag", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--M", "12", "--reproducible"]);
    let audit = &r["results"]["audits"][0];
    assert_eq!(audit["tridiagonal"], "yes");
    assert!(audit["defect"].as_f64().unwrap() <= 1e-8);
    assert!(audit["control_defect"].as_f64().unwrap() >= 1e-2);
    let matrix = audit["matrix"].as_array().unwrap();
    assert_eq!(matrix.len(), 12);
    assert!(matrix[0][5].as_f64().unwrap().abs() < 1e-8);

    let r = json(&["tridiag", "--model", "oscillator", "--param", "omega=1", "--param", "ell=0", "--M", "1", "--reproducible"]);
    assert_eq!(r["results"]["audits"][0]["tridiagonal"], "yes");

    let r = json(&["tridiag", "--reproducible"]);
    let audits = r["results"]["audits"].as_array().unwrap();
    assert_eq!(audits.len(), 17);
    assert!(audits.iter().filter(|a| a["model"]["model"] == "table1").count() == 7);
    assert_eq!(r["results"]["all_tridiagonal"], true);

    let out = tra(&["spectrum", "--model", "table1", "--param", "row=1", "--param", "scale=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orthocheck_reports() {
    let r = json(&["orthocheck", "--family", "krawtchouk", "--param", "N=12", "--param", "gamma=0.35", "--degree", "6", "--reproducible"]);
    assert!(r["results"]["max_defect"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["results"]["relation"], "standard");

    let r = json(&["orthocheck", "--family", "cdh", "--param", "mu=-1.3", "--param", "a=1.5", "--param", "b=1.9", "--degree", "3", "--reproducible"]);
    assert_eq!(r["results"]["relation"], "generalized");
    assert!(r["results"]["max_defect"].as_f64().unwrap() < 1e-6);
}

#[test]
fn wavefunction_table() {
    let r = json(&["wavefunction", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--state", "0", "--grid", "0.5:3:6", "--reproducible"]);
    let x = floats(&r["results"]["x"]);
    let psi = floats(&r["results"]["psi"]);
    assert_eq!(x.len(), 6);
    // ground state ∝ r e^{−r}
    let ratio = psi[0] / (x[0] * (-x[0]).exp());
    for (x, p) in x.iter().zip(&psi) {
        assert!((p / (x * (-x).exp()) - ratio).abs() < 1e-9 * ratio.abs());
    }
    assert!((r["results"]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let out = tra(&["wavefunction", "--model", "coulomb", "--param", "Z=-1", "--param", "ell=0", "--grid", "0:1:2"]);
    assert_eq!(out.status.code(), Some(2));
}
