//! Helpers shared by the checks.

use num_complex::Complex64;

use crate::error::Result;
use crate::fracops::{caputo_l1_at, observed_order, SampledTrajectory, TimeGrid};

/// Number of residual check points, `t = T·i/20`, `i = 1..=20`.
pub const CHECK_POINTS: usize = 20;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Convergence order of the L1 scheme on functions with a `t^ρ` leading
/// term: `min(1+ρ, 2-ρ)`.
pub fn attainable_order(rho: f64) -> f64 {
    (1.0 + rho).min(2.0 - rho)
}

/// `T·2^{-j}`, `j = 0..=levels`.
pub fn dyadic_times(t_end: f64, levels: u32) -> Vec<f64> {
    (0..=levels).map(|j| t_end * 0.5f64.powi(j as i32)).collect()
}

pub fn check_times(t_end: f64) -> Vec<f64> {
    (1..=CHECK_POINTS).map(|i| t_end * i as f64 / CHECK_POINTS as f64).collect()
}

/// Maximum over the check points of `|L1(u) - target|` for every level.
/// `finest` holds `u` on the grid with `levels.last()` intervals, `target`
/// the exact Caputo derivative at [`check_times`].
pub fn l1_residuals(
    rho: f64,
    t_end: f64,
    levels: &[usize],
    finest: &[Complex64],
    target: &[Complex64],
) -> Result<Vec<f64>> {
    let n_max = *levels.last().expect("non-empty levels");
    levels
        .iter()
        .map(|&n| {
            let step = n_max / n;
            let values: Vec<Complex64> = finest.iter().step_by(step).copied().collect();
            let traj = SampledTrajectory::new(TimeGrid::new(t_end, n)?, values)?;
            let nodes: Vec<usize> = (1..=CHECK_POINTS).map(|i| i * n / CHECK_POINTS).collect();
            let l1 = caputo_l1_at(&traj, rho, &nodes)?;
            Ok(l1.iter().zip(target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        })
        .collect()
}

pub fn steps(t_end: f64, levels: &[usize]) -> Vec<f64> {
    levels.iter().map(|&n| t_end / n as f64).collect()
}

/// Errors shrink (up to 5 % noise) as the grid is refined, or sit at
/// round-off level.
pub fn decreasing(err: &[f64], floor: f64) -> bool {
    err.iter().all(|e| e.is_finite())
        && err.windows(2).all(|w| w[1] <= 1.05 * w[0] || w[1] <= floor)
}

pub fn slope(h: &[f64], err: &[f64]) -> f64 {
    observed_order(h, err)
}

pub fn fmax(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

pub fn fmin(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) })
}

/// Euclidean norm of coefficients.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
