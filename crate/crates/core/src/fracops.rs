//! Fractional integrals and the L1 Caputo derivative on uniform grids.
//!
//! These are the independent numerical oracles of the crate: they know
//! nothing about Mittag-Leffler functions and are used to check the
//! closed-form solutions by plugging them back into their equations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlfunc::gamma::gamma;

/// Uniform grid `t_i = i·T/n`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: t_end,
                reason: "must be positive and finite",
            });
        }
        if n == 0 {
            return Err(Error::GridTooCoarse { n, min: 1 });
        }
        Ok(Self { t_end, n })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.t_end / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.t_end
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// First node with `t_i ≥ frac·T`.
    pub fn first_node_after(&self, frac: f64) -> usize {
        ((frac * self.n as f64).ceil() as usize).min(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTrajectory {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
}

impl SampledTrajectory {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid with {} nodes",
                values.len(),
                grid.n() + 1
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Piecewise-linear interpolation, clamped to `[0, T]`.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let h = self.grid.h();
        let n = self.grid.n();
        let x = (t / h).clamp(0.0, n as f64);
        let i = (x.floor() as usize).min(n - 1);
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

fn same_grid(a: &TimeGrid, b: &TimeGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!(
            "(T={}, n={}) vs (T={}, n={})",
            a.t_end(),
            a.n(),
            b.t_end(),
            b.n()
        )));
    }
    Ok(())
}

/// Riemann-Liouville integral `(1/Γ(σ)) ∫₀ᵗ (t-ξ)^{σ-1} h(ξ) dξ` by product
/// integration against the piecewise-linear interpolant of `h`. Exact for
/// linear `h`, second order for smooth `h`.
pub fn frac_integral(traj: &SampledTrajectory, order: f64) -> Result<SampledTrajectory> {
    if !(order > 0.0 && order < 2.0) {
        return Err(Error::InvalidOrder {
            order,
            reason: "integral order must lie in (0, 2)",
        });
    }
    let n = traj.grid.n();
    let a1 = order + 1.0;
    let p: Vec<f64> = (0..=n + 1).map(|k| (k as f64).powf(a1)).collect();
    // weight of u_j at node m depends on k = m - j only, for 1 ≤ j < m
    let c: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 1.0 } else { p[k + 1] - 2.0 * p[k] + p[k - 1] })
        .collect();
    let scale = traj.grid.h().powf(order) / gamma(order + 2.0);
    let u = &traj.values;

    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for (m, o) in out.iter_mut().enumerate().skip(1) {
        let mf = m as f64;
        let a0 = p[m - 1] - (mf - order - 1.0) * mf.powf(order);
        let mut acc = u[0] * a0;
        for j in 1..=m {
            acc += u[j] * c[m - j];
        }
        *o = acc * scale;
    }
    Ok(SampledTrajectory {
        grid: traj.grid,
        values: out,
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidOrder {
            order: rho,
            reason: "Caputo order must lie in (0, 1)",
        });
    }
    Ok(())
}

/// L1 weights `b_j = (j+1)^{1-ρ} - j^{1-ρ}`, `j = 0..n`.
fn l1_weights(rho: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - rho;
    let mut prev = 0.0;
    (0..n)
        .map(|j| {
            let next = ((j + 1) as f64).powf(e);
            let b = next - prev;
            prev = next;
            b
        })
        .collect()
}

fn l1_at(u: &[Complex64], b: &[f64], scale: f64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, bj) in b.iter().enumerate().take(m) {
        acc += (u[m - j] - u[m - j - 1]) * *bj;
    }
    acc * scale
}

/// L1 approximation of the Caputo derivative of order `ρ ∈ (0,1)`. The value
/// at `t_0` is undefined and reported as NaN.
pub fn caputo_l1(traj: &SampledTrajectory, rho: f64) -> Result<SampledTrajectory> {
    let nodes: Vec<usize> = (1..=traj.grid.n()).collect();
    let vals = caputo_l1_at(traj, rho, &nodes)?;
    let mut values = vec![Complex64::new(f64::NAN, f64::NAN)];
    values.extend(vals);
    Ok(SampledTrajectory {
        grid: traj.grid,
        values,
    })
}

/// L1 derivative at selected nodes only, `O(n)` work per node.
pub fn caputo_l1_at(traj: &SampledTrajectory, rho: f64, nodes: &[usize]) -> Result<Vec<Complex64>> {
    check_rho(rho)?;
    let n = traj.grid.n();
    if n < 2 {
        return Err(Error::GridTooCoarse { n, min: 2 });
    }
    if let Some(&bad) = nodes.iter().find(|&&m| m == 0 || m > n) {
        return Err(Error::GridMismatch(format!("node {bad} outside 1..={n}")));
    }
    let b = l1_weights(rho, n);
    let scale = traj.grid.h().powf(-rho) / gamma(2.0 - rho);
    Ok(nodes
        .iter()
        .map(|&m| l1_at(&traj.values, &b, scale, m))
        .collect())
}

/// Residual of `(D^ρ)² y + 2α D^ρ y + λ y = f` with the outer derivative taken
/// by L1 and the inner one supplied analytically (`dtraj`). Maximum over
/// the nodes with `t ≥ 0.05 T`, where the uniform-grid L1 is accurate.
pub fn caputo_squared_residual(
    traj: &SampledTrajectory,
    dtraj: &SampledTrajectory,
    rho: f64,
    alpha: f64,
    lambda: f64,
    f_samples: &SampledTrajectory,
) -> Result<f64> {
    let first = traj.grid.first_node_after(0.05).max(1);
    let nodes: Vec<usize> = (first..=traj.grid.n()).collect();
    caputo_squared_residual_at(traj, dtraj, rho, alpha, lambda, f_samples, &nodes)
}

/// As [`caputo_squared_residual`], restricted to the given nodes.
pub fn caputo_squared_residual_at(
    traj: &SampledTrajectory,
    dtraj: &SampledTrajectory,
    rho: f64,
    alpha: f64,
    lambda: f64,
    f_samples: &SampledTrajectory,
    nodes: &[usize],
) -> Result<f64> {
    same_grid(&traj.grid, &dtraj.grid)?;
    same_grid(&traj.grid, &f_samples.grid)?;
    if traj.len() != dtraj.len() || traj.len() != f_samples.len() {
        return Err(Error::GridMismatch("sample counts differ".into()));
    }
    let d2 = caputo_l1_at(dtraj, rho, nodes)?;
    Ok(nodes
        .iter()
        .zip(d2)
        .map(|(&m, dd)| {
            (dd + dtraj.values[m] * (2.0 * alpha) + traj.values[m] * lambda - f_samples.values[m])
                .norm()
        })
        .fold(0.0, f64::max))
}

/// Least-squares slope of `log err` against `log h`.
pub fn observed_order(h: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::new(1.0, n).unwrap()
    }

    #[test]
    fn integral_of_constant() {
        let g = grid(50);
        let one = SampledTrajectory::from_real_fn(g, |_| 1.0);
        let j = frac_integral(&one, 0.3).unwrap();
        for (i, v) in j.values.iter().enumerate() {
            let t = g.node(i);
            assert!((v.re - t.powf(0.3) / gamma(1.3)).abs() < 1e-13);
        }
    }

    #[test]
    fn integral_of_zero_and_linear() {
        let g = grid(10);
        let zero = SampledTrajectory::from_real_fn(g, |_| 0.0);
        assert!(frac_integral(&zero, 0.7).unwrap().values.iter().all(|v| v.norm() == 0.0));
        let lin = SampledTrajectory::from_real_fn(g, |t| t);
        let j = frac_integral(&lin, 0.5).unwrap();
        assert!((j.values[10].re - 4.0 / (3.0 * PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn integral_rejects_bad_order() {
        let g = grid(4);
        let u = SampledTrajectory::from_real_fn(g, |t| t);
        assert!(matches!(frac_integral(&u, 0.0), Err(Error::InvalidOrder { .. })));
        assert!(frac_integral(&u, 2.0).is_err());
    }

    #[test]
    fn l1_of_linear_is_exact() {
        let g = grid(100);
        let lin = SampledTrajectory::from_real_fn(g, |t| t);
        let d = caputo_l1(&lin, 0.5).unwrap();
        assert!(d.values[0].re.is_nan());
        assert!((d.values[100].re - 2.0 / PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn l1_kills_constants() {
        let g = grid(20);
        let c = SampledTrajectory::from_real_fn(g, |_| 3.5);
        let d = caputo_l1(&c, 0.4).unwrap();
        assert!(d.values[1..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn l1_needs_two_intervals() {
        let u = SampledTrajectory::from_real_fn(grid(1), |t| t);
        assert!(matches!(caputo_l1(&u, 0.5), Err(Error::GridTooCoarse { .. })));
        assert!(matches!(caputo_l1(&u, 1.0), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn l1_of_quadratic_converges_at_two_minus_rho() {
        let rho = 0.4;
        let exact = 2.0 / gamma(3.0 - rho);
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for n in [50, 100, 200, 400] {
            let u = SampledTrajectory::from_real_fn(grid(n), |t| t * t);
            let d = caputo_l1_at(&u, rho, &[n]).unwrap()[0];
            hs.push(1.0 / n as f64);
            errs.push((d.re - exact).abs());
        }
        assert!(observed_order(&hs, &errs) > 2.0 - rho - 0.1);
    }

    #[test]
    fn residual_of_zero_problem() {
        let g = grid(10);
        let z = SampledTrajectory::from_real_fn(g, |_| 0.0);
        let r = caputo_squared_residual(&z, &z, 0.5, 1.0, 2.0, &z).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn residual_rejects_mismatched_grids() {
        let a = SampledTrajectory::from_real_fn(grid(10), |_| 0.0);
        let b = SampledTrajectory::from_real_fn(grid(11), |_| 0.0);
        assert!(matches!(
            caputo_squared_residual(&a, &b, 0.5, 1.0, 1.0, &a),
            Err(Error::GridMismatch(_))
        ));
        assert!(SampledTrajectory::new(grid(3), vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn interpolation_is_linear_between_nodes() {
        let u = SampledTrajectory::from_real_fn(grid(4), |t| 2.0 * t + 1.0);
        assert!((u.interpolate(0.3).re - 1.6).abs() < 1e-15);
        assert_eq!(u.interpolate(5.0).re, 3.0);
    }
}
