//! Problem configuration files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "rho": 0.5, "alpha": 1.0, "T": 1.0,
//!   "operator": { "kind": "laplacian_1d_dirichlet", "modes": 16, "length": 3.141592653589793 },
//!   "phi0": "zero",
//!   "phi1": "decay:k^-3",
//!   "forcing": { "constant": "mode:1" },
//!   "grids": { "time_points": 50, "x_points": 64 }
//! }
//! ```
//!
//! Coefficient lists are either explicit (`[c₁, c₂, …]`, padded with zeros)
//! or presets: `zero`, `mode:k`, `decay:k^-p`, `alternating:k^-p`.

use std::path::Path;

use fractel::{Complex64, Forcing, QuadratureSpec, SampledTrajectory, SolveOptions, SpectralOperator, TelegraphProblem, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema_version: u32,
    pub rho: f64,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Regularity index of the forcing used in the stability ratio.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub operator: OperatorConfig,
    pub phi0: Coefficients,
    pub phi1: Coefficients,
    #[serde(default)]
    pub forcing: ForcingConfig,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
}

fn default_epsilon() -> f64 {
    0.25
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Solution, Output::Norms, Output::Field]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Solution,
    Norms,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    #[serde(rename = "laplacian_1d_dirichlet")]
    Laplacian1dDirichlet { modes: usize, length: f64 },
    DiagonalExplicit { eigenvalues: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    List(Vec<f64>),
    Preset(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    /// `f_k(t) = c_k`
    Constant(Coefficients),
    /// `f_k(t) = Σ_m c_{m,k} t^m`, one coefficient list per power.
    Polynomial(Vec<Coefficients>),
    /// Uniform samples on `[0, T]`: `values[i]` holds every mode at `t_i`.
    Sampled { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Output times `T·i/time_points`, `i = 0..=time_points`.
    pub time_points: usize,
    /// Physical grid for `field.csv` (Laplacian only).
    pub x_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            time_points: 50,
            x_points: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub quadrature_panels: usize,
    pub tol_crit: f64,
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self {
            quadrature_panels: d.quadrature.panels,
            tol_crit: d.tol_crit,
            parallel: d.parallel,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            parallel: self.parallel,
            tol_crit: self.tol_crit,
            quadrature: QuadratureSpec {
                panels: self.quadrature_panels,
            },
        }
    }
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if cfg.grids.time_points == 0 {
            return Err(CliError::Config("grids.time_points must be positive".into()));
        }
        if cfg.solver.quadrature_panels == 0 {
            return Err(CliError::Config("solver.quadrature_panels must be positive".into()));
        }
        Ok(cfg)
    }

    /// Overrides the number of modes.
    pub fn set_modes(&mut self, k: usize) -> Result<(), CliError> {
        match &mut self.operator {
            OperatorConfig::Laplacian1dDirichlet { modes, .. } => *modes = k,
            OperatorConfig::DiagonalExplicit { eigenvalues } => {
                if k == 0 || k > eigenvalues.len() {
                    return Err(CliError::Config(format!(
                        "--modes {k} exceeds the {} listed eigenvalues",
                        eigenvalues.len()
                    )));
                }
                eigenvalues.truncate(k);
            }
        }
        Ok(())
    }

    pub fn operator(&self) -> Result<SpectralOperator, CliError> {
        match &self.operator {
            OperatorConfig::Laplacian1dDirichlet { modes, length } => SpectralOperator::laplacian_1d(*length, *modes),
            OperatorConfig::DiagonalExplicit { eigenvalues } => SpectralOperator::diagonal(eigenvalues.clone()),
        }
        .map_err(|e| CliError::Config(format!("operator: {e}")))
    }

    /// Output times.
    pub fn times(&self) -> Vec<f64> {
        let n = self.grids.time_points;
        (0..=n).map(|i| self.t_end * i as f64 / n as f64).collect()
    }

    pub fn problem(&self) -> Result<TelegraphProblem, CliError> {
        let op = self.operator()?;
        let k = op.modes();
        let phi0 = expand(&self.phi0, k, "phi0")?;
        let phi1 = expand(&self.phi1, k, "phi1")?;
        let f = self.forcing(k)?;
        TelegraphProblem::new(self.rho, self.alpha, self.t_end, op, phi0, phi1, f, self.epsilon)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    fn forcing(&self, k: usize) -> Result<Vec<Forcing>, CliError> {
        Ok(match &self.forcing {
            ForcingConfig::Zero => vec![Forcing::Zero; k],
            ForcingConfig::Constant(c) => expand(c, k, "forcing.constant")?
                .into_iter()
                .map(|v| Forcing::Polynomial(vec![v]))
                .collect(),
            ForcingConfig::Polynomial(powers) => {
                let per_power = powers
                    .iter()
                    .map(|c| expand(c, k, "forcing.polynomial"))
                    .collect::<Result<Vec<_>, _>>()?;
                (0..k)
                    .map(|j| Forcing::Polynomial(per_power.iter().map(|p| p[j]).collect()))
                    .collect()
            }
            ForcingConfig::Sampled { values } => {
                if values.len() < 2 {
                    return Err(CliError::Config("forcing.sampled needs at least two rows".into()));
                }
                let grid = TimeGrid::new(self.t_end, values.len() - 1).map_err(|e| CliError::Config(format!("forcing.sampled: {e}")))?;
                (0..k)
                    .map(|j| {
                        let col: Vec<Complex64> = values
                            .iter()
                            .map(|row| Complex64::new(row.get(j).copied().unwrap_or(0.0), 0.0))
                            .collect();
                        SampledTrajectory::new(grid, col)
                            .map(Forcing::Sampled)
                            .map_err(|e| CliError::Config(format!("forcing.sampled: {e}")))
                    })
                    .collect::<Result<_, _>>()?
            }
        })
    }
}

/// Coefficients for modes `1..=k`.
pub fn expand(c: &Coefficients, k: usize, field: &str) -> Result<Vec<Complex64>, CliError> {
    let re = |v: f64| Complex64::new(v, 0.0);
    match c {
        Coefficients::List(v) => {
            if v.len() > k {
                return Err(CliError::Config(format!("{field}: {} coefficients for {k} modes", v.len())));
            }
            Ok((0..k).map(|j| re(v.get(j).copied().unwrap_or(0.0))).collect())
        }
        Coefficients::Preset(name) => {
            let bad = || CliError::Config(format!("{field}: unknown preset `{name}`"));
            if name == "zero" {
                return Ok(vec![re(0.0); k]);
            }
            if let Some(m) = name.strip_prefix("mode:") {
                let m: usize = m.parse().map_err(|_| bad())?;
                if m == 0 || m > k {
                    return Err(CliError::Config(format!("{field}: mode {m} outside 1..={k}")));
                }
                return Ok((1..=k).map(|j| re(if j == m { 1.0 } else { 0.0 })).collect());
            }
            let (alt, rest) = match name.strip_prefix("alternating:") {
                Some(r) => (true, r),
                None => (false, name.strip_prefix("decay:").ok_or_else(bad)?),
            };
            let p: f64 = rest.strip_prefix("k^-").and_then(|p| p.parse().ok()).ok_or_else(bad)?;
            Ok((1..=k)
                .map(|j| {
                    let s = if alt && j % 2 == 1 { -1.0 } else { 1.0 };
                    re(s * (j as f64).powf(-p))
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{"schema_version": 1, "rho": 0.5, "alpha": 1.0, "T": 1.0,
        "operator": {"kind": "diagonal_explicit", "eigenvalues": [1.0, 4.0]},
        "phi0": [0.5], "phi1": "mode:2"}"#;

    #[test]
    fn minimal_config() {
        let cfg = ProblemConfig::parse(MIN).unwrap();
        let p = cfg.problem().unwrap();
        assert_eq!(p.phi0[1], Complex64::new(0.0, 0.0));
        assert_eq!(p.phi1[1], Complex64::new(1.0, 0.0));
        assert_eq!(cfg.times().len(), 51);
    }

    #[test]
    fn forcing_forms() {
        let poly = MIN.replacen('{', r#"{"forcing": {"polynomial": ["mode:1", [0, 2]]},"#, 1);
        let f = ProblemConfig::parse(&poly).unwrap().problem().unwrap().f;
        assert_eq!(f[0].eval(2.0), Complex64::new(1.0, 0.0));
        assert_eq!(f[1].eval(2.0), Complex64::new(4.0, 0.0));

        let zero = MIN.replacen('{', r#"{"forcing": "zero","#, 1);
        assert!(ProblemConfig::parse(&zero).unwrap().problem().unwrap().f.iter().all(|g| g.is_zero()));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MIN.replace("\"T\"", "\"rhoo\": 1, \"T\"");
        assert!(matches!(ProblemConfig::parse(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn invalid_rho_names_the_field() {
        let cfg = ProblemConfig::parse(&MIN.replace("0.5, \"alpha\"", "1.5, \"alpha\"")).unwrap();
        let err = cfg.problem().unwrap_err().to_string();
        assert!(err.contains("rho"), "{err}");
    }

    #[test]
    fn presets() {
        let c = expand(&Coefficients::Preset("alternating:k^-2".into()), 3, "x").unwrap();
        assert_eq!(c[0].re, -1.0);
        assert_eq!(c[1].re, 0.25);
        assert!(expand(&Coefficients::Preset("decay:k^-x".into()), 3, "x").is_err());
        assert!(expand(&Coefficients::Preset("mode:4".into()), 3, "x").is_err());
    }
}
