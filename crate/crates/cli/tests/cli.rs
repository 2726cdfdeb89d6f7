use krflow_cli::state_file::StateFile;
use krflow_cli::trace_io::{RunManifest, TraceTable};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn krflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krflow")).args(args).current_dir(dir).env_remove("KRFLOW_MUTATE").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SHORT_CP1: &str = "\
# short CP1 run
manifold = CP1
n_points = 256
dt = 0.01
t_end = 1
record_dt = 0.1
init.family = legendre
init.amplitude = 0.05
init.mode = 2
monitors = all
";

#[test]
fn simulate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), SHORT_CP1).unwrap();
    let o = krflow(&["simulate", "--config", "run.conf", "--out", "out", "--pairs", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let trace = TraceTable::parse(&fs::read_to_string(out.join("trace.csv")).unwrap()).unwrap();
    let want = "t,c,eps,mu,mu_1,mu_2,R_max,R_min,min_bisec,J,F,nu,E_0,E_1,I,ImJ,harnack_margin,rr2_accum";
    assert_eq!(trace.columns.join(","), want);
    assert_eq!(trace.column("t").unwrap().len(), 11);
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest.missing_outputs(&out).is_empty(), "{:?}", manifest.missing_outputs(&out));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["monotonicity_violations"], 0);
    assert_eq!(summary["harnack"]["violations"], 0);
}

#[test]
fn environment_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), SHORT_CP1).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_krflow"))
        .args(["simulate", "--config", "run.conf", "--out", "out"])
        .current_dir(dir.path())
        .env("KRFLOW_T_END", "1.5")
        .env("KRFLOW_MONITORS", "none")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let trace = TraceTable::parse(&fs::read_to_string(dir.path().join("out/trace.csv")).unwrap()).unwrap();
    assert_eq!(trace.column("t").unwrap().last().copied(), Some(1.5));
}

#[test]
fn tail_normalization_on_a_short_run_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("short.conf"), "manifold = CP1\nt_end = 0.3\nnormalize_c = tail\n").unwrap();
    let o = krflow(&["simulate", "--config", "short.conf", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`normalize_c`"), "{}", stderr(&o));
}

#[test]
fn negative_dt_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "manifold = CP1\ndt = -0.01\n").unwrap();
    let o = krflow(&["simulate", "--config", "bad.conf", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`dt`"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "manifold = CP1\ntimestep = 0.01\n").unwrap();
    let o = krflow(&["simulate", "--config", "bad.conf", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("timestep"));
}

#[test]
fn positivity_violation_reports_the_grid_index() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pos.conf"), "manifold = CP2\ninit.amplitude = 6\n").unwrap();
    let o = krflow(&["simulate", "--config", "pos.conf", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid index"), "{}", stderr(&o));
    assert!(!dir.path().join("out/trace.csv").exists());
}

#[test]
fn audit_of_reference_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let reference = krflow::State::build_reference(krflow::geometry::Manifold::CP2, 256, 12.0).unwrap();
    fs::write(dir.path().join("ref.csv"), StateFile::from_state(&reference).render()).unwrap();
    let o = krflow(&["audit", "ref.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut values = vec![v["futaki"].as_f64().unwrap()];
    for key in ["j", "f", "nu", "i", "i_minus_j"] {
        values.push(v["ledger"][key].as_f64().unwrap());
    }
    values.extend(v["im_k"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()));
    assert!(values.iter().all(|x| x.abs() < 1e-8), "{values:?}");
    assert_eq!(v["flags"]["sandwich"], true);
}

#[test]
fn corrupt_state_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let reference = krflow::State::build_reference(krflow::geometry::Manifold::CP1, 128, 12.0).unwrap();
    let text = StateFile::from_state(&reference).render();
    let truncated: String = text.lines().take(40).map(|l| format!("{l}\n")).collect();
    let garbled = text.replacen("e-1", "e-x", 1);
    for (name, body) in [("empty.csv", String::new()), ("truncated.csv", truncated), ("garbled.csv", garbled)] {
        fs::write(dir.path().join(name), body).unwrap();
        let o = krflow(&["audit", name], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
}

#[test]
fn spectrum_of_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = krflow(&["spectrum", "--count", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ev: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in ev.iter().zip([1.0, 3.0, 6.0]) {
        assert!((a - b).abs() < 1e-3);
    }
}

#[test]
fn verify_passes_and_mutations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = krflow(&["verify", "--suite", "algebra,invariants", "--trials", "200"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for m in ["sigma", "poly_identity", "vandermonde", "sectional", "futaki"] {
        let o = krflow(&["verify", "--suite", "algebra,invariants", "--trials", "200", "--mutate", m], dir.path());
        assert_eq!(o.status.code(), Some(1), "mutation {m}");
        assert!(stderr(&o).contains("failing properties"));
    }
    let o = krflow(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_regenerates_plots() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), SHORT_CP1.replace("monitors = all", "monitors = functionals")).unwrap();
    assert_eq!(krflow(&["simulate", "--config", "run.conf", "--out", "out"], dir.path()).status.code(), Some(0));
    fs::remove_dir_all(dir.path().join("out/plots")).unwrap();
    let o = krflow(&["report", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("out/plots/decay.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}
