//! Mittag-Leffler functions
//!
//! ```text
//! E_{ρ,μ}(z)   = Σ_k z^k / Γ(ρk + μ),
//! E^γ_{ρ,μ}(z) = Σ_k (γ)_k / k! · z^k / Γ(ρk + μ).
//! ```
//!
//! [`ml`] picks one of three regimes: the power series for `|z| ≤ 8`, the
//! large-argument expansion when `|z| ≥ 20` (or earlier, when `|z|^{1/ρ}` is
//! already large), and inversion of the Laplace transform on a parabolic
//! contour otherwise. Each regime returns an error estimate; a regime is
//! accepted only if its estimate is within `tol · max(1, |E|)`, plus the
//! unavoidable amplification of the rounding in `z` itself.

mod asymptotic;
mod contour;
pub mod gamma;
mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{gamma, ln_gamma, rgamma};

/// Tolerance used by the solvers when they evaluate kernels.
pub const DEFAULT_TOL: f64 = 1e-13;

pub(crate) const SERIES_RADIUS: f64 = 8.0;
pub(crate) const ASYMPTOTIC_RADIUS: f64 = 20.0;
/// Below `ASYMPTOTIC_RADIUS` the expansion is still tried when the
/// exponentially small terms it drops are below `e^{-40}`.
const EARLY_ASYMPTOTIC: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Series,
    Asymptotic,
    Contour,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Series => "series",
            Regime::Asymptotic => "asymptotic",
            Regime::Contour => "contour",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlResult {
    pub value: Complex64,
    pub est_abs_error: f64,
    pub regime: Regime,
}

/// A Mittag-Leffler evaluation request. `gamma` is the Prabhakar weight,
/// 1 for the two-parameter function or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlQuery {
    pub rho: f64,
    pub mu: f64,
    pub gamma: u8,
    pub z: Complex64,
}

impl MlQuery {
    pub fn new(rho: f64, mu: f64, gamma: u8, z: Complex64) -> Result<Self> {
        check_params(rho, mu)?;
        if !(gamma == 1 || gamma == 2) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma as f64,
                reason: "Prabhakar weight must be 1 or 2",
            });
        }
        Ok(Self { rho, mu, gamma, z })
    }

    pub fn eval(&self, tol: f64) -> Result<MlResult> {
        match self.gamma {
            1 => ml(self.rho, self.mu, self.z, tol),
            _ => ml_prabhakar2(self.rho, self.mu, self.z, tol),
        }
    }
}

fn check_params(rho: f64, mu: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 2.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must lie in (0, 2]",
        });
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must be finite",
        });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    Ok(())
}

fn check_z(z: Complex64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::InvalidParameter {
            name: "z",
            value: z.norm(),
            reason: "must be finite",
        });
    }
    Ok(())
}

/// Rounding of `z` alone moves `E(z)` by about `eps · |z|^{1/ρ} · |E|`; no
/// regime can do better, so that floor is added to the target.
fn accepted(r: &MlResult, tol: f64, input_floor: f64) -> bool {
    let scale = r.value.norm();
    r.value.is_finite() && r.est_abs_error <= tol * scale.max(1.0) + input_floor * scale
}

/// Two-parameter Mittag-Leffler function `E_{ρ,μ}(z)`.
pub fn ml(rho: f64, mu: f64, z: Complex64, tol: f64) -> Result<MlResult> {
    check_params(rho, mu)?;
    check_tol(tol)?;
    check_z(z)?;
    if z.norm() == 0.0 {
        let v = rgamma(mu);
        return Ok(MlResult {
            value: Complex64::new(v, 0.0),
            est_abs_error: f64::EPSILON * v.abs(),
            regime: Regime::Series,
        });
    }

    let r = z.norm();
    let input_floor = 8.0 * f64::EPSILON * r.powf(1.0 / rho);
    let mut best: Option<MlResult> = None;
    let mut consider = |res: MlResult| -> Option<MlResult> {
        if accepted(&res, tol, input_floor) {
            return Some(res);
        }
        if res.value.is_finite()
            && best.map_or(true, |b| res.est_abs_error < b.est_abs_error)
        {
            best = Some(res);
        }
        None
    };

    if r <= SERIES_RADIUS {
        if let Some(res) = consider(series::prabhakar_series(rho, mu, 1.0, z, tol)) {
            return Ok(res);
        }
    }
    if r >= ASYMPTOTIC_RADIUS || (r > 1.0 && r.powf(1.0 / rho) >= EARLY_ASYMPTOTIC) {
        if let Some(res) = consider(asymptotic::asymptotic(rho, mu, z)) {
            return Ok(res);
        }
    }
    if let Some(res) = consider(contour::contour(rho, mu, z, tol)) {
        return Ok(res);
    }

    Err(Error::NonConvergence {
        rho,
        mu,
        z_re: z.re,
        z_im: z.im,
        tol,
        achieved: best.map_or(f64::INFINITY, |b| b.est_abs_error),
    })
}

/// Evaluates in a fixed regime without the acceptance test. Intended for
/// cross-checking regimes against each other.
pub fn ml_in_regime(rho: f64, mu: f64, z: Complex64, tol: f64, regime: Regime) -> Result<MlResult> {
    check_params(rho, mu)?;
    check_tol(tol)?;
    check_z(z)?;
    Ok(match regime {
        Regime::Series => series::prabhakar_series(rho, mu, 1.0, z, tol),
        Regime::Asymptotic => asymptotic::asymptotic(rho, mu, z),
        Regime::Contour => contour::contour(rho, mu, z, tol),
    })
}

/// Tolerances tried in turn by the value-only evaluators, for arguments
/// where rounding in the series keeps the estimate above [`DEFAULT_TOL`].
const FALLBACK_TOLS: [f64; 3] = [DEFAULT_TOL, 1e-11, 1e-9];

fn first_converged(f: impl Fn(f64) -> Result<MlResult>) -> Result<Complex64> {
    let mut last = None;
    for tol in FALLBACK_TOLS {
        match f(tol) {
            Ok(r) => return Ok(r.value),
            Err(e @ Error::NonConvergence { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one tolerance"))
}

/// `E_{ρ,μ}(z)` at [`DEFAULT_TOL`], or the loosest tolerance down to `1e-9`
/// that is attainable; value only.
pub fn ml_value(rho: f64, mu: f64, z: Complex64) -> Result<Complex64> {
    first_converged(|tol| ml(rho, mu, z, tol))
}

/// Prabhakar function with γ = 2, reduced to two-parameter functions:
///
/// ```text
/// E²_{ρ,μ}(z) = (1/ρ) [E_{ρ,μ-1}(z) + (1 + ρ - μ) E_{ρ,μ}(z)].
/// ```
pub fn ml_prabhakar2(rho: f64, mu: f64, z: Complex64, tol: f64) -> Result<MlResult> {
    let c = 1.0 + rho - mu;
    // the combination may cancel, so tighten the parts accordingly
    let part_tol = tol / (1.0 + c.abs());
    let a = ml(rho, mu - 1.0, z, part_tol)?;
    let b = ml(rho, mu, z, part_tol)?;
    let regime = if a.regime == Regime::Contour || b.regime == Regime::Contour {
        Regime::Contour
    } else if a.regime == Regime::Asymptotic || b.regime == Regime::Asymptotic {
        Regime::Asymptotic
    } else {
        Regime::Series
    };
    Ok(MlResult {
        value: (a.value + b.value * c) / rho,
        est_abs_error: (a.est_abs_error + c.abs() * b.est_abs_error) / rho,
        regime,
    })
}

/// `E²_{ρ,μ}(z)` with the same tolerance fallback as [`ml_value`].
pub fn ml2_value(rho: f64, mu: f64, z: Complex64) -> Result<Complex64> {
    first_converged(|tol| ml_prabhakar2(rho, mu, z, tol))
}

/// Direct summation of the defining Prabhakar series. Independent of the
/// reduction used by [`ml_prabhakar2`]; practical for moderate `|z|`.
pub fn prabhakar_series(rho: f64, mu: f64, gamma: f64, z: Complex64, tol: f64) -> Result<MlResult> {
    check_params(rho, mu)?;
    check_tol(tol)?;
    check_z(z)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be positive",
        });
    }
    let res = series::prabhakar_series(rho, mu, gamma, z, tol);
    if !res.est_abs_error.is_finite() {
        return Err(Error::NonConvergence {
            rho,
            mu,
            z_re: z.re,
            z_im: z.im,
            tol,
            achieved: res.est_abs_error,
        });
    }
    Ok(res)
}

/// Ratio `|E_{ρ,μ}(z)| (1 + |z|)`, bounded on sectors `|arg z| ≥ β > πρ/2`.
pub fn ml_bound_check(rho: f64, mu: f64, z: Complex64) -> Result<f64> {
    check_params(rho, mu)?;
    check_z(z)?;
    if z.norm() != 0.0 && z.arg().abs() <= PI * rho / 2.0 {
        return Err(Error::SectorViolation {
            rho,
            z_re: z.re,
            z_im: z.im,
        });
    }
    let e = ml(rho, mu, z, DEFAULT_TOL)?;
    Ok(e.value.norm() * (1.0 + z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_at_one() {
        let r = ml(1.0, 1.0, c(1.0, 0.0), 1e-12).unwrap();
        assert_eq!(r.value.re, std::f64::consts::E);
        assert_eq!(r.regime, Regime::Series);
    }

    #[test]
    fn cos_zero() {
        let r = ml(2.0, 1.0, c(-2.4674011002723395, 0.0), 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-12);
    }

    #[test]
    fn e12_at_one() {
        let r = ml(1.0, 2.0, c(1.0, 0.0), 1e-12).unwrap();
        assert!((r.value.re - 1.718281828459045).abs() < 1e-15);
    }

    #[test]
    fn half_half_at_minus_one() {
        // mpmath, 50 digits
        let r = ml(0.5, 0.5, c(-1.0, 0.0), 1e-12).unwrap();
        assert!((r.value.re - 0.13660600739194928).abs() < 1e-14, "{}", r.value.re);
    }

    #[test]
    fn zero_argument() {
        let r = ml(0.7, 0.5, c(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(r.value.re, rgamma(0.5));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ml(0.0, 1.0, c(1.0, 0.0), 1e-12),
            Err(Error::InvalidParameter { name: "rho", .. })
        ));
        assert!(ml(2.5, 1.0, c(1.0, 0.0), 1e-12).is_err());
        assert!(ml(0.5, 1.0, c(1.0, 0.0), 0.0).is_err());
        assert!(MlQuery::new(0.5, 1.0, 3, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn prabhakar_at_zero() {
        let r = ml_prabhakar2(0.5, 1.5, c(0.0, 0.0), 1e-12).unwrap();
        assert!((r.value.re - 1.1283791670955126).abs() < 1e-14);
    }

    #[test]
    fn prabhakar_reduction_matches_series() {
        // mpmath, direct series
        let r = ml_prabhakar2(0.5, 1.5, c(-1.0, 0.0), 1e-12).unwrap();
        assert!((r.value.re - 0.27321201478).abs() < 1e-10);
        let s = prabhakar_series(0.5, 1.5, 2.0, c(-1.0, 0.0), 1e-14).unwrap();
        assert!((r.value - s.value).norm() < 1e-12);
    }

    #[test]
    fn gamma_one_series_is_ml() {
        for &(rho, mu, z) in &[(0.5, 1.0, c(-2.0, 1.0)), (0.8, 0.3, c(3.0, -1.0)), (1.5, 2.0, c(-4.0, 0.0))] {
            let a = ml(rho, mu, z, 1e-13).unwrap().value;
            let b = prabhakar_series(rho, mu, 1.0, z, 1e-14).unwrap().value;
            assert!((a - b).norm() < 1e-11 * a.norm().max(1.0));
        }
    }

    #[test]
    fn bound_check_sector() {
        assert!(matches!(
            ml_bound_check(0.5, 1.0, c(1.0, 0.0)),
            Err(Error::SectorViolation { .. })
        ));
        let at_zero = ml_bound_check(0.5, 0.5, c(0.0, 0.0)).unwrap();
        assert!((at_zero - 0.5641895835477563).abs() < 1e-15);
        let r = ml_bound_check(0.5, 1.0, c(-1.0, 0.0)).unwrap();
        assert!(r > 0.0 && r <= 2.5);
    }

    #[test]
    fn regimes_by_magnitude() {
        assert_eq!(ml(0.9, 1.0, c(-3.0, 0.0), 1e-12).unwrap().regime, Regime::Series);
        assert_eq!(ml(0.9, 1.0, c(-500.0, 0.0), 1e-12).unwrap().regime, Regime::Asymptotic);
        assert_eq!(ml(0.9, 1.0, c(0.0, 12.0), 1e-12).unwrap().regime, Regime::Contour);
    }
}
