//! Batch front end: `solve`, `verify` and `ml`.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use fractel::mlfunc::ml;
use fractel::spectral::{assemble_physical, solve_with};
use fractel::verify::{run_suite, to_json_lines, CheckReport, SuiteConfig};
use fractel::{Complex64, OperatorKind};

use config::{Output, ProblemConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Solves the configured problem and writes the requested artifacts into
/// `out_dir`. Returns the written paths.
pub fn cmd_solve(
    config: &Path,
    out_dir: &Path,
    modes: Option<usize>,
    time_steps: Option<usize>,
) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = ProblemConfig::load(config)?;
    if let Some(k) = modes {
        cfg.set_modes(k)?;
    }
    if let Some(n) = time_steps {
        if n == 0 {
            return Err(CliError::Config("--time-steps must be positive".into()));
        }
        cfg.grids.time_points = n;
    }
    let problem = cfg.problem()?;
    let field = solve_with(&problem, &cfg.solver.options()).map_err(|e| CliError::Solver(e.to_string()))?;
    let times = cfg.times();
    let tr = output::trajectory(&problem, &field, &times)?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    for o in &cfg.outputs {
        let (name, text) = match o {
            Output::Solution => ("solution.csv", output::solution_csv(&tr)),
            Output::Norms => ("norms.json", output::norms_json(&problem, &field, &tr)),
            Output::Field => {
                let OperatorKind::Laplacian1dDirichlet { length } = problem.operator.kind() else {
                    continue;
                };
                let m = cfg.grids.x_points.max(1);
                let x: Vec<f64> = (0..=m).map(|i| length * i as f64 / m as f64).collect();
                let phys = assemble_physical(&field, &x, &times).map_err(|e| CliError::Solver(e.to_string()))?;
                ("field.csv", output::field_csv(&phys))
            }
        };
        let path = out_dir.join(name);
        write(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs the battery and writes the JSON-lines report. Fails with
/// [`CliError::ChecksFailed`] after writing when any check fails.
pub fn cmd_verify(
    config: Option<&Path>,
    report: &Path,
    seed: Option<u64>,
    fault_inject: bool,
) -> Result<Vec<CheckReport>, CliError> {
    let mut cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<SuiteConfig>(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => SuiteConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.fault_inject |= fault_inject;
    let reports = run_suite(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let path = if report.is_dir() {
        report.join("report.jsonl")
    } else {
        report.to_path_buf()
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    write(&path, &to_json_lines(&reports))?;
    Ok(reports)
}

/// One line: `<re> <regime>` for real `z`, `<re> <im> <regime>` otherwise.
pub fn cmd_ml(rho: f64, mu: f64, re: f64, im: f64, tol: f64) -> Result<String, CliError> {
    let r = ml(rho, mu, Complex64::new(re, im), tol).map_err(|e| match e {
        fractel::Error::NonConvergence { .. } => CliError::Solver(e.to_string()),
        _ => CliError::Config(e.to_string()),
    })?;
    Ok(if im == 0.0 {
        format!("{} {}", output::num(r.value.re), r.regime)
    } else {
        format!("{} {} {}", output::num(r.value.re), output::num(r.value.im), r.regime)
    })
}

/// Applies `FRACTEL_THREADS` (unset or 0: rayon's default).
pub fn configure_threads(var: Option<&str>) -> Result<(), CliError> {
    let Some(v) = var else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("FRACTEL_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}
