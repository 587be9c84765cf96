//! Batch front door: fit a model from hyperplane data, evaluate it on
//! grids, run the verification suites, and report seminorms.
//!
//! Exit codes: 0 success; 1 a verification check failed; 2 configuration or
//! usage error; 3 data-shape or malformed-model error; 4 solver failure.

mod config;
mod data;
mod grid;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polyspline::error::Error as CoreError;
use polyspline::transfinite::{analyze, fit_with_diagnostics, model_io, seminorm};
use polyspline::verify::{self, VerifyContext};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "polyspline",
    about = "Transfinite interpolation of periodic data on parallel hyperplanes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model from slice data and write it as JSON.
    Fit {
        #[arg(long)]
        config: String,
    },
    /// Evaluate a fitted model on a tensor grid and write CSV.
    Eval {
        #[arg(long)]
        model: String,
        /// Grid spec: `t=lo:hi:count;y=lo:hi:count[;y=...]` or comma lists.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: String,
        /// Derivative request `m,b1[,b2,...]`.
        #[arg(long)]
        deriv: Option<String>,
    },
    /// Run verification suites and emit a JSON report.
    Verify {
        #[arg(long)]
        config: String,
        /// One of the suite names, or `all`. Defaults to the config's
        /// `verify_suites` (or everything).
        #[arg(long)]
        suite: Option<String>,
        /// Overrides the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Report the Duchon seminorm of a fitted model.
    Seminorm {
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn classify_core(e: &CoreError) -> u8 {
    match e {
        CoreError::ModeSolve { .. }
        | CoreError::NotPositiveDefinite { .. }
        | CoreError::SingularSystem => 4,
        CoreError::DataShape(_) | CoreError::ModelFormat(_) => 3,
        _ => 2,
    }
}

fn config_err(e: anyhow::Error) -> Failure {
    // data problems below a config wrapper keep their own exit code
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return Failure::new(classify_core(core), format!("{e:#}"));
    }
    Failure::new(2, format!("{e:#}"))
}

fn write_atomic(path: &str, contents: &str) -> Result<(), Failure> {
    let target = Path::new(path);
    let dir = target.parent().unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        target
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, target))
        .map_err(|e| Failure::new(2, format!("cannot write {path}: {e}")))
}

fn cmd_fit(config_path: &str) -> CmdResult {
    let run = RunConfig::from_file(config_path).map_err(config_err)?;
    let config = run.poly_config().map_err(config_err)?;
    let Some(source) = &run.data else {
        return Err(Failure::new(2, "config has no data section"));
    };
    let Some(output) = &run.output else {
        return Err(Failure::new(2, "config has no output section"));
    };
    let data = data::load_data(source, &config)
        .map_err(|e| match e.downcast_ref::<CoreError>() {
            Some(core) => Failure::new(classify_core(core), format!("{e:#}")),
            None => Failure::new(3, format!("{e:#}")),
        })?;
    let fdata = analyze(&config, &data).map_err(|e| Failure::new(classify_core(&e), e.to_string()))?;
    let (model, diagnostics) = fit_with_diagnostics(&config, &fdata)
        .map_err(|e| Failure::new(classify_core(&e), e.to_string()))?;
    let residual = model
        .hyperplane_residual(&data)
        .map_err(|e| Failure::new(classify_core(&e), e.to_string()))?;

    write_atomic(&output.model, &model_io::to_json_string(&model))?;
    if let Some(report_path) = &output.report {
        let conds: Vec<serde_json::Value> = diagnostics
            .cond_by_mode
            .iter()
            .map(|(xi, cond)| serde_json::json!({"xi": xi, "cond": cond}))
            .collect();
        let report = serde_json::json!({
            "mode_count": model.modes.len(),
            "real_data": model.real_data,
            "hyperplane_residual": residual,
            "discarded_energy": fdata.discarded_energy,
            "wiener_norms": fdata.wiener_norms,
            "condition_estimates": conds,
        });
        write_atomic(report_path, &serde_json::to_string_pretty(&report).unwrap())?;
    }
    Ok(())
}

fn format_float(v: f64) -> String {
    // 17 significant digits round-trip any f64
    format!("{v:.16e}")
}

fn cmd_eval(model_path: &str, grid_spec: &str, out: &str, deriv: Option<&str>) -> CmdResult {
    let text = std::fs::read_to_string(model_path)
        .map_err(|e| Failure::new(3, format!("cannot read model {model_path}: {e}")))?;
    let model = model_io::from_json_str(&text)
        .map_err(|e| Failure::new(3, format!("malformed model: {e}")))?;
    let n = model.config.n;
    let grid = grid::parse_grid(grid_spec, n).map_err(|e| Failure::new(2, format!("{e:#}")))?;

    let beta0 = vec![0usize; n];
    let deriv = match deriv {
        None => None,
        Some(spec) => Some(grid::parse_deriv(spec, n).map_err(|e| Failure::new(2, format!("{e:#}")))?),
    };
    let values = model
        .evaluate_grid(&grid.t, &grid.y_axes, 0, &beta0)
        .expect("order-0 evaluation is always admissible");
    let deriv_values = match &deriv {
        None => None,
        Some((m, beta)) => Some(
            model
                .evaluate_grid(&grid.t, &grid.y_axes, *m, beta)
                .map_err(|e| Failure::new(2, e.to_string()))?,
        ),
    };

    let mut csv = String::new();
    csv.push('t');
    for a in 1..=n {
        let _ = write!(csv, ",y{a}");
    }
    csv.push_str(",value");
    if !model.real_data {
        csv.push_str(",value_im");
    }
    if let Some((m, beta)) = &deriv {
        let mut tag = format!(",d_{m}");
        for b in beta {
            let _ = write!(tag, "_{b}");
        }
        csv.push_str(&tag);
        if !model.real_data {
            csv.push_str(&format!("{tag}_im"));
        }
    }
    csv.push('\n');

    let y_sizes: Vec<usize> = grid.y_axes.iter().map(|a| a.len()).collect();
    let y_total: usize = y_sizes.iter().product();
    for (ti, &t) in grid.t.iter().enumerate() {
        for flat in 0..y_total {
            let mut idx = flat;
            let mut y = vec![0.0; n];
            for a in (0..n).rev() {
                y[a] = grid.y_axes[a][idx % y_sizes[a]];
                idx /= y_sizes[a];
            }
            csv.push_str(&format_float(t));
            for &yv in &y {
                csv.push(',');
                csv.push_str(&format_float(yv));
            }
            let v = values[ti * y_total + flat];
            csv.push(',');
            csv.push_str(&format_float(v.re));
            if !model.real_data {
                csv.push(',');
                csv.push_str(&format_float(v.im));
            }
            if let Some(dv) = &deriv_values {
                let d = dv[ti * y_total + flat];
                csv.push(',');
                csv.push_str(&format_float(d.re));
                if !model.real_data {
                    csv.push(',');
                    csv.push_str(&format_float(d.im));
                }
            }
            csv.push('\n');
        }
    }
    write_atomic(out, &csv)
}

fn cmd_verify(
    config_path: &str,
    suite: Option<&str>,
    seed: Option<u64>,
    out: Option<&str>,
) -> CmdResult {
    let run = RunConfig::from_file(config_path).map_err(config_err)?;
    let ctx = VerifyContext {
        seed: seed.unwrap_or(run.seed),
        tol: run.tolerances.clone(),
    };
    let selected: Vec<String> = match suite {
        Some(name) => vec![name.to_string()],
        None => match &run.verify_suites {
            Some(list) => list.clone(),
            None => vec!["all".to_string()],
        },
    };
    let mut checks = Vec::new();
    for name in &selected {
        if name == "all" {
            checks.extend(verify::run_all(&ctx));
        } else {
            checks.extend(verify::run_suite(name, &ctx).ok_or_else(|| {
                Failure::new(
                    2,
                    format!(
                        "unknown suite {name:?}; available: {} or all",
                        verify::SUITES.join(", ")
                    ),
                )
            })?);
        }
    }
    let suite = selected.join(",");
    let passed = checks.iter().all(|c| c.pass);
    let report = serde_json::json!({
        "suite": suite,
        "seed": ctx.seed,
        "passed": passed,
        "checks": checks,
    });
    let text = serde_json::to_string_pretty(&report).unwrap();
    match out {
        Some(path) => write_atomic(path, &text)?,
        None => println!("{text}"),
    }
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}/{}", c.suite, c.name))
            .collect();
        Err(Failure::new(
            1,
            format!("verification failed: {}", failed.join(", ")),
        ))
    }
}

fn cmd_seminorm(model_path: &str, out: Option<&str>) -> CmdResult {
    let text = std::fs::read_to_string(model_path)
        .map_err(|e| Failure::new(3, format!("cannot read model {model_path}: {e}")))?;
    let model = model_io::from_json_str(&text)
        .map_err(|e| Failure::new(3, format!("malformed model: {e}")))?;
    let report = seminorm::duchon_seminorm(&model);
    let modes: Vec<serde_json::Value> = report
        .modes
        .iter()
        .map(|m| {
            let scale = m.binomial.abs().max(m.factored.abs());
            serde_json::json!({
                "xi": m.xi,
                "binomial": m.binomial,
                "factored": m.factored,
                "per_m": m.per_m,
                "route_gap_rel": if scale > 0.0 { (m.binomial - m.factored).abs() / scale } else { 0.0 },
            })
        })
        .collect();
    let json = serde_json::json!({
        "total": report.total,
        "max_route_gap": report.max_route_gap(),
        "modes": modes,
    });
    let text = serde_json::to_string_pretty(&json).unwrap();
    match out {
        Some(path) => write_atomic(path, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit { config } => cmd_fit(config),
        Command::Eval {
            model,
            grid,
            out,
            deriv,
        } => cmd_eval(model, grid, out, deriv.as_deref()),
        Command::Verify {
            config,
            suite,
            seed,
            out,
        } => cmd_verify(config, suite.as_deref(), *seed, out.as_deref()),
        Command::Seminorm { model, out } => cmd_seminorm(model, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
