//! Conformance battery. Every estimate the solution theory relies on is a
//! named check that reports pass/fail, an optional certified constant and
//! structured diagnostics.
//!
//! Constants are certified empirically: a check reports the supremum of the
//! relevant ratio over a declared sweep and passes when that supremum is
//! finite and stable under refinement. This certifies an existential
//! constant on the sweep; it does not prove a universal one.

mod certify;
mod checks_ml;
mod checks_operator;
mod checks_scalar;
mod checks_field;
mod common;
pub mod fixtures;
pub mod laplace;

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::mlfunc::{ml, DEFAULT_TOL};
use crate::spectral::{solve, SolutionField};

pub use certify::{certify_constant, Certificate, SweepSpec};
pub use fixtures::{fixture_family, Fixture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// The statement of the theory the check instantiates.
    pub anchor: String,
    pub status: CheckStatus,
    pub certified_constant: Option<f64>,
    pub details: Value,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Size of the seeded problem family.
    pub fixtures: usize,
    /// Grid sizes `n` for the L1 residual sweeps; each must be a multiple
    /// of 20 and divide the largest.
    pub residual_levels: Vec<usize>,
    pub laplace_points: usize,
    pub laplace_tol: f64,
    /// Stability times `T·2^{-j}`, `j = 0..=levels`.
    pub stability_levels: u32,
    /// Maximum number of function evaluations per certification sweep.
    pub sweep_budget: usize,
    /// Perturb the Mittag-Leffler evaluator used by the function-level
    /// checks, to show that the battery detects a wrong kernel.
    pub fault_inject: bool,
    /// Run only these checks (all when absent).
    pub only: Option<Vec<String>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            fixtures: 20,
            residual_levels: vec![100, 200, 400, 800],
            laplace_points: 5,
            laplace_tol: 1e-6,
            stability_levels: 20,
            sweep_budget: 1_000_000,
            fault_inject: false,
            only: None,
        }
    }
}

/// Every statement a check must claim.
pub const ANCHORS: &[&str] = &[
    "cauchy_problem",
    "power_scale",
    "stability_estimate",
    "uniqueness",
    "ml_definitions",
    "ml_asymptotics",
    "ml_sector_bound",
    "large_eigenvalue_estimate",
    "caputo_eigenfunction",
    "scalar_solution_formulas",
    "integro_problem",
    "relaxation_problem",
    "operator_estimates",
    "convolution_estimates",
    "explicit_convolution_bound",
    "modal_derivative",
];

pub(crate) struct Outcome {
    pub pass: bool,
    pub constant: Option<f64>,
    pub details: Value,
}

type CheckFn = fn(&Context) -> Result<Outcome>;

struct Check {
    id: &'static str,
    anchor: &'static str,
    run: CheckFn,
}

fn registry() -> Vec<Check> {
    macro_rules! c {
        ($id:literal, $anchor:literal, $f:path) => {
            Check {
                id: $id,
                anchor: $anchor,
                run: $f,
            }
        };
    }
    vec![
        c!("ml_identities", "ml_definitions", checks_ml::identities),
        c!("ml_asymptotic_tail", "ml_asymptotics", checks_ml::asymptotic_tail),
        c!("ml_sector_bound", "ml_sector_bound", checks_ml::sector_bound),
        c!("ml_large_eigen_estimate", "large_eigenvalue_estimate", checks_ml::large_eigen_estimate),
        c!("caputo_eigenfunction", "caputo_eigenfunction", checks_scalar::caputo_eigenfunction),
        c!("scalar_laplace_consistency", "scalar_solution_formulas", checks_scalar::laplace_consistency),
        c!("scalar_residual", "scalar_solution_formulas", checks_scalar::residual),
        c!("initial_conditions", "scalar_solution_formulas", checks_scalar::initial_conditions),
        c!("relaxation_residual", "relaxation_problem", checks_scalar::relaxation_residual),
        c!("integro_residual", "integro_problem", checks_scalar::integro_residual),
        c!("modal_derivative", "modal_derivative", checks_scalar::modal_derivative),
        c!("op_bound_E", "operator_estimates", checks_operator::bound_e),
        c!("op_bound_SES", "operator_estimates", checks_operator::bound_ses),
        c!("op_bound_SES1", "operator_estimates", checks_operator::bound_ses1),
        c!("op_bound_AES", "operator_estimates", checks_operator::bound_aes),
        c!("op_bound_RES", "operator_estimates", checks_operator::bound_res),
        c!("op_bound_SRES", "operator_estimates", checks_operator::bound_sres),
        c!("op_bound_ARES", "operator_estimates", checks_operator::bound_ares),
        c!("conv_bounds", "convolution_estimates", checks_operator::conv_bounds),
        c!("conv_J_explicit_bound", "explicit_convolution_bound", checks_operator::conv_j_explicit),
        c!("operator_equation_residual", "cauchy_problem", checks_field::equation_residual),
        c!("sobolev_norms", "power_scale", checks_field::sobolev_norms),
        c!("parseval", "power_scale", checks_field::parseval),
        c!("stability", "stability_estimate", checks_field::stability),
        c!("uniqueness", "uniqueness", checks_field::uniqueness),
    ]
}

/// `(check_id, anchor)` for every registered check, in report order.
pub fn check_ids() -> Vec<(&'static str, &'static str)> {
    registry().iter().map(|c| (c.id, c.anchor)).collect()
}

/// Mittag-Leffler evaluator seen by the function-level checks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ml {
    bias: f64,
}

impl Ml {
    pub fn e(&self, rho: f64, mu: f64, z: Complex64) -> Result<Complex64> {
        Ok(ml(rho, mu, z, DEFAULT_TOL)?.value + self.bias)
    }
}

pub(crate) struct Context {
    pub cfg: SuiteConfig,
    pub fixtures: Vec<Fixture>,
    pub ml: Ml,
    fields: OnceLock<Result<Vec<SolutionField>>>,
    pub(crate) op_tables: OnceLock<Result<Vec<checks_operator::OpTable>>>,
}

impl Context {
    pub fn fields(&self) -> Result<&[SolutionField]> {
        self.fields
            .get_or_init(|| self.fixtures.par_iter().map(|f| solve(&f.problem)).collect())
            .as_deref()
            .map_err(Clone::clone)
    }
}

fn validate(cfg: &SuiteConfig) -> Result<()> {
    let bad = |m: String| Err(Error::Configuration(m));
    if cfg.fixtures < 2 {
        return bad("need at least two fixtures to cover both cases".into());
    }
    let levels = &cfg.residual_levels;
    let Some(&finest) = levels.iter().max() else {
        return bad("residual_levels is empty".into());
    };
    if levels.len() < 2 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return bad("residual_levels must hold at least two increasing sizes".into());
    }
    if levels.iter().any(|&n| n % 20 != 0 || finest % n != 0) {
        return bad("each residual level must be a multiple of 20 dividing the largest".into());
    }
    if cfg.laplace_points == 0 || !(cfg.laplace_tol > 0.0) {
        return bad("laplace_points and laplace_tol must be positive".into());
    }
    if cfg.stability_levels == 0 || cfg.stability_levels > 60 {
        return bad("stability_levels must lie in 1..=60".into());
    }
    let known = registry();
    for a in ANCHORS {
        if !known.iter().any(|c| c.anchor == *a) {
            return bad(format!("no check claims anchor `{a}`"));
        }
    }
    if let Some(only) = &cfg.only {
        for id in only {
            if !known.iter().any(|c| c.id == id) {
                return bad(format!("unknown check `{id}`"));
            }
        }
    }
    Ok(())
}

/// Runs the battery. Failing checks are reported, not returned as errors;
/// `Err` means the configuration itself is unusable.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    validate(cfg)?;
    let ctx = Context {
        cfg: cfg.clone(),
        fixtures: fixture_family(cfg.seed, cfg.fixtures)?,
        ml: Ml {
            bias: if cfg.fault_inject { 1e-6 } else { 0.0 },
        },
        fields: OnceLock::new(),
        op_tables: OnceLock::new(),
    };
    let selected: Vec<Check> = registry()
        .into_iter()
        .filter(|c| cfg.only.as_ref().map_or(true, |o| o.iter().any(|id| id == c.id)))
        .collect();
    Ok(selected
        .par_iter()
        .map(|c| {
            let (status, constant, details) = match (c.run)(&ctx) {
                Ok(o) => (
                    if o.pass && o.constant.map_or(true, f64::is_finite) {
                        CheckStatus::Pass
                    } else {
                        CheckStatus::Fail
                    },
                    o.constant,
                    o.details,
                ),
                Err(e) => (CheckStatus::Fail, None, serde_json::json!({ "error": e.to_string() })),
            };
            CheckReport {
                check_id: c.id.to_string(),
                anchor: c.anchor.to_string(),
                status,
                certified_constant: constant.filter(|v| v.is_finite()),
                details,
            }
        })
        .collect())
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("reports serialize"));
        out.push('\n');
    }
    out
}

/// Fixed-width table for terminals.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:<28} {:<6} {}", "check", "anchor", "status", "constant");
    for r in reports {
        let c = r.certified_constant.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        let s = if r.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{:<28} {:<28} {:<6} {}", r.check_id, r.anchor, s, c);
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "{} checks, {} failed", reports.len(), failed);
    out
}
