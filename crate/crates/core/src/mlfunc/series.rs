use num_complex::Complex64;

use super::gamma::{gamma_sign, ln_gamma, rgamma};
use super::{MlResult, Regime};

const MAX_TERMS: usize = 500;
const SMALL_RUN: usize = 3;

/// `z^k · coeff / Γ(ρk + μ)` without intermediate overflow.
fn term(z: Complex64, zk: Complex64, k: usize, arg: f64, coeff: f64) -> Complex64 {
    if arg < 170.0 && zk.is_finite() {
        return zk * (coeff * rgamma(arg));
    }
    if arg <= 0.0 && arg == arg.floor() {
        return Complex64::new(0.0, 0.0);
    }
    let (r, th) = z.to_polar();
    let log_mag = k as f64 * r.ln() + coeff.abs().ln() - ln_gamma(arg);
    let sign = gamma_sign(arg) * coeff.signum();
    Complex64::from_polar(sign * log_mag.exp(), k as f64 * th)
}

/// Power series of the Prabhakar function
/// `Σ (γ)_k / k! · z^k / Γ(ρk + μ)`; γ = 1 gives the two-parameter function.
///
/// The error estimate combines the tail (last accepted term) with the
/// rounding error of the partial sums, which dominates when the series
/// cancels (large |z| against the sector).
pub(crate) fn prabhakar_series(rho: f64, mu: f64, gamma: f64, z: Complex64, tol: f64) -> MlResult {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut abs_weighted = 0.0;
    let mut zk = Complex64::new(1.0, 0.0);
    // (γ)_k / k!
    let mut coeff = 1.0;
    let mut run = 0;
    let mut last = f64::INFINITY;
    let mut converged = false;

    for k in 0..MAX_TERMS {
        let t = term(z, zk, k, rho * k as f64 + mu, coeff);
        // Neumaier compensated summation, per component
        let s = sum + t;
        comp.re += if sum.re.abs() >= t.re.abs() {
            (sum.re - s.re) + t.re
        } else {
            (t.re - s.re) + sum.re
        };
        comp.im += if sum.im.abs() >= t.im.abs() {
            (sum.im - s.im) + t.im
        } else {
            (t.im - s.im) + sum.im
        };
        sum = s;

        let a = t.norm();
        abs_weighted += (k as f64 + 4.0) * a;
        last = a;

        if a < tol * (sum + comp).norm().max(1.0) {
            run += 1;
            if run >= SMALL_RUN {
                converged = true;
                break;
            }
        } else {
            run = 0;
        }

        zk *= z;
        coeff *= (gamma + k as f64) / (k as f64 + 1.0);
    }

    let value = sum + comp;
    let rounding = 2.0 * f64::EPSILON * abs_weighted;
    let tail = if converged { 3.0 * last } else { f64::INFINITY };
    MlResult {
        value,
        est_abs_error: rounding + tail,
        regime: Regime::Series,
    }
}
