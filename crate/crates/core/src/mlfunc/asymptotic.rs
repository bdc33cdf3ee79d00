//! Large-argument expansion
//!
//! ```text
//! E_{ρ,μ}(z) ≈ (1/ρ) Σ_m ζ_m^{1-μ} exp(ζ_m) − Σ_{k≥1} z^{-k} / Γ(μ − ρk),
//! ζ_m = |z|^{1/ρ} exp(i (arg z + 2πm) / ρ),  |arg z + 2πm| < ρπ,
//! ```
//!
//! truncated at the smallest algebraic term. Branches lying exactly on a
//! Stokes line (`|arg z + 2πm| = ρπ`) enter with weight one half.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::rgamma;
use super::{MlResult, Regime};

const MAX_TERMS: usize = 400;
const STOKES_EPS: f64 = 1e-12;

pub(crate) fn asymptotic(rho: f64, mu: f64, z: Complex64) -> MlResult {
    let (r, theta) = z.to_polar();
    let inv_rho = 1.0 / rho;
    let radius = r.powf(inv_rho);

    let mut exp_part = Complex64::new(0.0, 0.0);
    let mut exp_rounding = 0.0;
    let m_max = (rho / 2.0).ceil() as i64 + 1;
    for m in -m_max..=m_max {
        let a = theta + 2.0 * PI * m as f64;
        let weight = if a.abs() < rho * PI - STOKES_EPS {
            1.0
        } else if (a.abs() - rho * PI).abs() <= STOKES_EPS {
            0.5
        } else {
            continue;
        };
        let zeta = Complex64::from_polar(radius, a * inv_rho);
        let contribution = zeta.powf(1.0 - mu) * zeta.exp() * (weight * inv_rho);
        exp_rounding += f64::EPSILON * (4.0 + 3.0 * zeta.norm()) * contribution.norm();
        exp_part += contribution;
    }

    // algebraic tail, truncated before the terms start growing
    let zinv = z.inv();
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut alg = Complex64::new(0.0, 0.0);
    let mut alg_abs = 0.0;
    let mut prev_nonzero = f64::INFINITY;
    let mut omitted = 0.0;
    for k in 1..=MAX_TERMS {
        zpow *= zinv;
        if zpow.norm() == 0.0 {
            break;
        }
        let t = -zpow * rgamma(mu - rho * k as f64);
        let a = t.norm();
        if a == 0.0 {
            continue;
        }
        if a > prev_nonzero {
            omitted = a;
            break;
        }
        if a <= 0.25 * f64::EPSILON * (alg + exp_part).norm() {
            // remaining terms are below rounding
            omitted = a;
            alg += t;
            break;
        }
        alg += t;
        alg_abs += (k as f64 + 2.0) * a;
        prev_nonzero = a;
        if k == MAX_TERMS {
            omitted = a;
        }
    }

    // Near a Stokes line the decaying exponentials switch on smoothly rather
    // than stepwise; bound the mismatch by the branch size times the
    // Gaussian width of the switch.
    let mut stokes = 0.0;
    for m in -m_max - 1..=m_max + 1 {
        let phase = ((theta + 2.0 * PI * m as f64) * inv_rho).abs();
        if phase < PI / 2.0 {
            continue;
        }
        let exponent = radius * phase.cos() - (phase - PI).powi(2) * radius / 2.0;
        stokes += radius.powf(1.0 - mu) * exponent.exp() * inv_rho;
    }
    // the smallest term is only the order of the truncation error
    let est = 3.0 * omitted + stokes + exp_rounding + 2.0 * f64::EPSILON * alg_abs;

    MlResult {
        value: exp_part + alg,
        est_abs_error: est,
        regime: Regime::Asymptotic,
    }
}
