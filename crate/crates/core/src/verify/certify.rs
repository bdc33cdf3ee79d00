//! Stand-alone constant certification over a caller-chosen sweep.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::checks_ml::{large_eigen_sweep, sector_sweep};
use super::common::dyadic_times;
use super::Ml;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub rho: f64,
    pub mu: f64,
    pub alpha: f64,
    /// Eigenvalue for `op_bound_E`.
    pub lambda: f64,
    pub t_end: f64,
    /// `|z| ≤ 10^{max_decade}` for the sector sweep.
    pub max_decade: f64,
    pub per_decade: usize,
    /// `λ` up to `4α²·10^{lambda_decades}`.
    pub lambda_decades: usize,
    /// Times `T·2^{-j}`, `j = 0..=time_levels`.
    pub time_levels: u32,
    pub budget: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            rho: 0.5,
            mu: 1.0,
            alpha: 1.0,
            lambda: 2.0,
            t_end: 1.0,
            max_decade: 6.0,
            per_decade: 10,
            lambda_decades: 6,
            time_levels: 20,
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub check_id: String,
    pub constant: f64,
    pub argmax: Value,
    pub evaluations: usize,
}

/// Supremum of the ratio behind `check_id` over `spec`. Supported ids are
/// `ml_sector_bound`, `ml_large_eigen_estimate` and `op_bound_E` (one mode,
/// `g` fixed, both roots, `t = 0` included).
pub fn certify_constant(check_id: &str, spec: &SweepSpec) -> Result<Certificate> {
    let requested = match check_id {
        "ml_sector_bound" => 3 * (1 + (spec.per_decade as f64 * (spec.max_decade + 3.0)).round() as usize + 1),
        "ml_large_eigen_estimate" => (4 * spec.lambda_decades + 1) * (spec.time_levels as usize + 1),
        "op_bound_E" => 2 * (spec.time_levels as usize + 2),
        other => return Err(Error::Configuration(format!("no certification sweep for `{other}`"))),
    };
    if requested > spec.budget {
        return Err(Error::SweepBudgetExceeded {
            check: check_id.to_string(),
            requested,
            budget: spec.budget,
        });
    }
    let ml = Ml { bias: 0.0 };
    let cert = |constant, argmax, evaluations| Certificate {
        check_id: check_id.to_string(),
        constant,
        argmax,
        evaluations,
    };
    match check_id {
        "ml_sector_bound" => {
            let s = sector_sweep(&ml, spec.rho, spec.mu, spec.max_decade, spec.per_decade)?;
            Ok(cert(s.constant, json!({"z": [s.argmax.re, s.argmax.im]}), s.evaluations))
        }
        "ml_large_eigen_estimate" => {
            let s = large_eigen_sweep(&ml, spec.rho, spec.mu, spec.alpha, spec.t_end, spec.lambda_decades, spec.time_levels)?;
            Ok(cert(s.ratio, s.argmax, s.evaluations))
        }
        _ => {
            let d = Complex64::new(spec.alpha * spec.alpha - spec.lambda, 0.0).sqrt();
            let mut times = vec![0.0];
            times.extend(dyadic_times(spec.t_end, spec.time_levels));
            let mut best = (0.0f64, json!(null));
            let mut n = 0;
            for s in [spec.alpha + d, spec.alpha - d] {
                for &t in &times {
                    let v = ml.e(spec.rho, spec.mu, -s * t.powf(spec.rho))?.norm();
                    n += 1;
                    if v > best.0 {
                        best = (v, json!({"t": t, "root": [s.re, s.im]}));
                    }
                }
            }
            Ok(cert(best.0, best.1, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_vector_attains_one_at_origin() {
        let c = certify_constant("op_bound_E", &SweepSpec::default()).unwrap();
        assert!(c.constant >= 1.0 - 1e-12);
        assert_eq!(c.argmax["t"], 0.0);
    }

    #[test]
    fn budget_and_unknown_ids() {
        let spec = SweepSpec {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            certify_constant("ml_sector_bound", &spec),
            Err(Error::SweepBudgetExceeded { .. })
        ));
        assert!(matches!(
            certify_constant("nope", &SweepSpec::default()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn sector_constant_at_half() {
        let c = certify_constant("ml_sector_bound", &SweepSpec::default()).unwrap();
        assert!(c.constant >= 1.0 && c.constant <= 2.5, "{}", c.constant);
        assert!(c.evaluations <= 3 * 92);
    }
}
