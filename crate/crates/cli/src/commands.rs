//! Subcommand implementations; each returns a process exit code.

use crate::config::{parse_config, render_config, RunSettings};
use crate::plot::{line_plot, Series};
use crate::state_file::StateFile;
use crate::trace_io::{render_trace_csv, summarize, unix_now, RunManifest, TraceTable};
use crate::verify::{run_suites, Mutation};
use krflow::functionals::FunctionalLedger;
use krflow::geometry::{laplacian_spectrum, ReducedGrid, ReducedMetricState};
use krflow::invariants::{futaki, im_k};
use krflow::{flow::run_flow, Error, State};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for an error: input problems map to 2, numerical failures to 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Parse(_) | Error::Positivity { .. } | Error::GridMismatch(_) => EXIT_CONFIG,
        Error::Numerical(_) | Error::Geometric(_) | Error::FlowBlowup(_) => EXIT_NUMERICAL,
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

/// Reads a configuration file with environment overrides applied.
pub fn load_settings(path: &Path) -> Result<RunSettings, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let env: Vec<(String, String)> = std::env::vars().collect();
    parse_config(&text, env.iter().map(|(k, v)| (k.as_str(), v.as_str())))
}

/// Checks that the configured initial potential gives a positive metric.
pub fn initial_state(settings: &RunSettings) -> Result<State, Error> {
    let c = &settings.flow;
    let grid = ReducedGrid::new(c.manifold, c.n_points, c.half_width)?;
    let init = c.initial_potential::<f64>();
    ReducedMetricState::from_potential_fn(grid, init.closure())
}

fn write(dir: &Path, name: &str, text: &str, outputs: &mut Vec<String>) -> Result<(), Error> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    outputs.push(name.to_string());
    Ok(())
}

/// Runs one flow and writes its trace, states, summary, plots and manifest into `out`.
pub fn simulate_one(settings: &RunSettings, out: &Path) -> Result<RunManifest, Error> {
    let start = unix_now();
    let initial = initial_state(settings)?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let trace = run_flow::<f64>(&settings.flow)?;
    let mut outputs = Vec::new();
    write(out, "config.txt", &render_config(settings), &mut outputs)?;
    write(out, "trace.csv", &render_trace_csv(&trace), &mut outputs)?;
    write(out, "state_initial.csv", &StateFile::from_state(&initial).render(), &mut outputs)?;
    let last = trace.last.metric(&trace.grid)?;
    write(out, "state_final.csv", &StateFile::from_state(&last).render(), &mut outputs)?;
    let summary = summarize(&trace, settings.pairs, settings.flow.seed)?;
    write(out, "summary.json", &serde_json::to_string_pretty(&summary).expect("summary serializes"), &mut outputs)?;
    outputs.extend(write_plots(out)?);
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        config: render_config(settings),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        start_unix_s: start,
        end_unix_s: unix_now(),
        outputs,
        final_sup_r_deviation: summary.final_sup_r_deviation,
        alpha_mu: summary.decay.map(|d| d.alpha_mu),
        monotonicity_violations: summary.monotonicity_violations,
    };
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes")).map_err(|e| io_err(&path, e))?;
    Ok(manifest)
}

/// `simulate`: one run per configuration, in parallel when several are given.
pub fn cmd_simulate(configs: &[PathBuf], out: &Path, pairs: Option<usize>, seed: Option<u64>) -> i32 {
    let mut jobs = Vec::new();
    for (i, path) in configs.iter().enumerate() {
        let mut settings = match load_settings(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return exit_code(&e);
            }
        };
        if let Some(p) = pairs {
            settings.pairs = p;
        }
        if let Some(s) = seed {
            settings.flow.seed = s;
        }
        if let Err(e) = initial_state(&settings) {
            eprintln!("{}: initial potential rejected: {e}", path.display());
            return exit_code(&e);
        }
        let dir = if configs.len() == 1 { out.to_path_buf() } else { out.join(format!("run_{i}")) };
        jobs.push((settings, dir));
    }
    let results: Vec<Result<RunManifest, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.iter().map(|(s, d)| scope.spawn(move || simulate_one(s, d))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerical("worker panicked".into())))).collect()
    });
    let mut code = EXIT_OK;
    for ((_, dir), r) in jobs.iter().zip(results) {
        match r {
            Ok(m) => println!(
                "{}: sup|R − r| = {:.3e}, α_μ = {}, monotonicity violations {}",
                dir.display(),
                m.final_sup_r_deviation,
                m.alpha_mu.map_or("n/a".to_string(), |a| format!("{a:.4}")),
                m.monotonicity_violations
            ),
            Err(e) => {
                eprintln!("{}: {e}", dir.display());
                code = code.max(exit_code(&e));
            }
        }
    }
    code
}

/// Ledger and invariants of a stored state, as JSON.
pub fn audit_json(file: &StateFile) -> Result<serde_json::Value, Error> {
    let state = file.to_state()?;
    let reference = ReducedMetricState::build_reference(file.manifold, file.n_points(), file.half_width)?;
    let ledger = FunctionalLedger::compute(&reference, &state)?;
    let n = state.dim();
    let im: Vec<f64> = (0..=n).map(|k| im_k(&state, k, 0.0)).collect();
    Ok(json!({
        "manifold": file.manifold.to_string(),
        "n_points": file.n_points(),
        "ledger": ledger,
        "futaki": futaki(&state),
        "im_k": im,
        "flags": {
            "j_nonnegative": ledger.j >= -1e-12,
            "i_nonnegative": ledger.i >= -1e-12,
            "sandwich": ledger.sandwich_holds(n, 1e-10),
        },
    }))
}

pub fn cmd_audit(path: &Path) -> i32 {
    let result = fs::read_to_string(path).map_err(|e| io_err(path, e)).and_then(|t| StateFile::parse(&t)).and_then(|f| audit_json(&f));
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("audit serializes"));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            EXIT_CONFIG
        }
    }
}

/// Invariant Laplacian eigenvalues of a stored state, or of the configured initial metric.
pub fn cmd_spectrum(state: Option<&Path>, config: Option<&Path>, count: usize) -> i32 {
    let loaded = match (state, config) {
        (Some(p), _) => fs::read_to_string(p).map_err(|e| io_err(p, e)).and_then(|t| StateFile::parse(&t)).and_then(|f| f.to_state()),
        (None, Some(p)) => load_settings(p).and_then(|s| initial_state(&s)),
        (None, None) => ReducedMetricState::build_reference(krflow::geometry::Manifold::CP1, 1024, 12.0),
    };
    let st = match loaded {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return exit_code(&e);
        }
    };
    match laplacian_spectrum(&st, count) {
        Ok(sp) => {
            println!("{}", json!({ "manifold": st.manifold().to_string(), "eigenvalues": sp.eigenvalues }));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}

pub fn cmd_verify(selector: &str, trials: usize, seed: u64, mutation: Option<&str>) -> i32 {
    let mutation = match mutation.map(Mutation::named).transpose() {
        Ok(m) => m.unwrap_or_default(),
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let results = match run_suites(selector, trials, seed, &mutation) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return exit_code(&e);
        }
    };
    for r in &results {
        println!("{}", r.row());
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    println!("{} of {} properties passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        EXIT_OK
    } else {
        eprintln!("failing properties: {}", failed.join(", "));
        EXIT_CHECK_FAILED
    }
}

/// Writes SVG plots of a run directory's `trace.csv`; returns the written paths relative to `dir`.
pub fn write_plots(dir: &Path) -> Result<Vec<String>, Error> {
    let path = dir.join("trace.csv");
    let table = TraceTable::parse(&fs::read_to_string(&path).map_err(|e| io_err(&path, e))?)?;
    let col = |name: &str| table.column(name).ok_or_else(|| Error::Parse(format!("trace has no `{name}` column")));
    let t = col("t")?;
    let n = table.columns.iter().filter(|c| c.starts_with("E_")).count() - 1;
    let r_dev: Vec<f64> = col("R_max")?.iter().zip(col("R_min")?).map(|(a, b)| (a - n as f64).abs().max((b - n as f64).abs())).collect();
    let (mu, mu_1, mu_2, c) = (col("mu")?, col("mu_1")?, col("mu_2")?, col("c")?);
    let mut written = Vec::new();
    let mut put = |name: &str, svg: String| -> Result<(), Error> {
        write(dir, name, &svg, &mut written)
    };
    put("plots/curvature.svg", line_plot("sup |R − r|", "t", &[Series { label: "sup|R − r|", x: &t, y: &r_dev }], true))?;
    put(
        "plots/decay.svg",
        line_plot(
            "Decay of φ̇",
            "t",
            &[
                Series { label: "μ", x: &t, y: &mu },
                Series { label: "μ₁", x: &t, y: &mu_1 },
                Series { label: "μ₂", x: &t, y: &mu_2 },
                Series { label: "c", x: &t, y: &c },
            ],
            true,
        ),
    )?;
    let names: Vec<String> = ["F", "nu"].iter().map(|s| s.to_string()).chain((0..=n).map(|k| format!("E_{k}"))).collect();
    let cols: Vec<Vec<f64>> = names.iter().map(|s| col(s)).collect::<Result<_, _>>()?;
    let series: Vec<Series> = names.iter().zip(&cols).map(|(s, y)| Series { label: s, x: &t, y }).collect();
    put("plots/functionals.svg", line_plot("Energy functionals", "t", &series, false))?;
    Ok(written)
}

pub fn cmd_report(dir: &Path) -> i32 {
    match write_plots(dir) {
        Ok(paths) => {
            for p in paths {
                println!("{}", dir.join(p).display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}
