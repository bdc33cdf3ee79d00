//! The operator problem
//!
//! ```text
//! (D^ρ)² u + 2α D^ρ u + A u = f,   u(0) = φ₁,   lim_{t→0} D^ρ u = φ₀,
//! ```
//!
//! solved by expanding in the eigenbasis of `A`: `u(t) = Σ T_k(t) v_k`, where
//! each `T_k` solves the scalar problem with `λ = λ_k`. Modes with
//! `λ_k = α²` use the double-root formula; any number of them is allowed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{
    solve_scalar_with, CaseTag, Forcing, QuadratureSpec, ScalarProblem, ScalarSolution,
    DEFAULT_TOL_CRIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    DiagonalExplicit,
    /// `-d²/dx²` on `(0, L)` with Dirichlet conditions.
    Laplacian1dDirichlet { length: f64 },
}

/// Diagonal model of `A`: eigenvalues `0 < λ₁ ≤ λ₂ ≤ …` of the first `K`
/// eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOperator {
    kind: OperatorKind,
    eigenvalues: Vec<f64>,
}

impl SpectralOperator {
    pub fn diagonal(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidProblem("operator needs at least one mode".into()));
        }
        if let Some(&l) = eigenvalues.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "eigenvalues",
                value: l,
                reason: "must be positive and finite",
            });
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidProblem("eigenvalues must be nondecreasing".into()));
        }
        Ok(Self {
            kind: OperatorKind::DiagonalExplicit,
            eigenvalues,
        })
    }

    /// `λ_k = (kπ/L)²`, `v_k(x) = √(2/L) sin(kπx/L)`, `k = 1..=K`.
    pub fn laplacian_1d(length: f64, modes: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "length",
                value: length,
                reason: "must be positive",
            });
        }
        if modes == 0 {
            return Err(Error::InvalidProblem("operator needs at least one mode".into()));
        }
        let eigenvalues = (1..=modes).map(|k| (k as f64 * PI / length).powi(2)).collect();
        Ok(Self {
            kind: OperatorKind::Laplacian1dDirichlet { length },
            eigenvalues,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Same operator restricted to its first `k` modes.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.modes() {
            return Err(Error::InvalidProblem(format!("cannot keep {k} of {} modes", self.modes())));
        }
        Ok(Self {
            kind: self.kind,
            eigenvalues: self.eigenvalues[..k].to_vec(),
        })
    }

    /// `v_k(x)` for the Laplacian, `k` counted from 1.
    pub fn eigenfunction(&self, k: usize, x: f64) -> Result<f64> {
        match self.kind {
            OperatorKind::Laplacian1dDirichlet { length } => {
                Ok((2.0 / length).sqrt() * (k as f64 * PI * x / length).sin())
            }
            OperatorKind::DiagonalExplicit => Err(Error::WrongOperatorKind),
        }
    }

    /// Coefficients `(h, v_k)` of a function on `(0, L)`, by the composite
    /// trapezoidal rule on `points` intervals.
    pub fn coefficients_of(&self, h: impl Fn(f64) -> f64, points: usize) -> Result<Vec<Complex64>> {
        let OperatorKind::Laplacian1dDirichlet { length } = self.kind else {
            return Err(Error::WrongOperatorKind);
        };
        let dx = length / points as f64;
        let samples: Vec<f64> = (0..=points).map(|i| h(i as f64 * dx)).collect();
        (1..=self.modes())
            .map(|k| {
                let mut acc = 0.0;
                for (i, s) in samples.iter().enumerate() {
                    let w = if i == 0 || i == points { 0.5 } else { 1.0 };
                    acc += w * s * self.eigenfunction(k, i as f64 * dx)?;
                }
                Ok(Complex64::new(acc * dx, 0.0))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TelegraphProblem {
    pub rho: f64,
    pub alpha: f64,
    pub t_end: f64,
    pub operator: SpectralOperator,
    pub phi0: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
    /// One forcing per mode.
    pub f: Vec<Forcing>,
    /// Regularity index of `f`, used by the stability bound.
    pub epsilon: f64,
}

impl TelegraphProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho: f64,
        alpha: f64,
        t_end: f64,
        operator: SpectralOperator,
        phi0: Vec<Complex64>,
        phi1: Vec<Complex64>,
        f: Vec<Forcing>,
        epsilon: f64,
    ) -> Result<Self> {
        let p = Self {
            rho,
            alpha,
            t_end,
            operator,
            phi0,
            phi1,
            f,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// Problem without forcing.
    pub fn unforced(
        rho: f64,
        alpha: f64,
        t_end: f64,
        operator: SpectralOperator,
        phi0: Vec<Complex64>,
        phi1: Vec<Complex64>,
    ) -> Result<Self> {
        let k = operator.modes();
        Self::new(rho, alpha, t_end, operator, phi0, phi1, vec![Forcing::Zero; k], 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.operator.modes();
        for (name, len) in [("phi0", self.phi0.len()), ("phi1", self.phi1.len()), ("f", self.f.len())] {
            if len != k {
                return Err(Error::InvalidProblem(format!("{name} has {len} coefficients, operator has {k} modes")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                reason: "must lie in (0, 1)",
            });
        }
        if self.phi0.iter().chain(&self.phi1).any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem("non-finite data coefficient".into()));
        }
        // scalar-level checks on rho, alpha, T
        self.mode_problem(0)?.validate()
    }

    pub fn modes(&self) -> usize {
        self.operator.modes()
    }

    pub fn mode_problem(&self, k: usize) -> Result<ScalarProblem> {
        Ok(ScalarProblem {
            rho: self.rho,
            alpha: self.alpha,
            lambda: self.operator.eigenvalues()[k],
            phi0: self.phi0[k],
            phi1: self.phi1[k],
            g: self.f[k].clone(),
            t_end: self.t_end,
        })
    }

    /// Same problem with the first `k` modes only.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        Self::new(
            self.rho,
            self.alpha,
            self.t_end,
            self.operator.truncate(k)?,
            self.phi0[..k].to_vec(),
            self.phi1[..k].to_vec(),
            self.f[..k].to_vec(),
            self.epsilon,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub parallel: bool,
    pub tol_crit: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            parallel: true,
            tol_crit: DEFAULT_TOL_CRIT,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// `‖h‖_τ`, with `‖h‖_τ² = Σ λ_k^{2τ} |h_k|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub tau: f64,
    pub value: f64,
}

/// Panics if `coeffs` and `eigenvalues` differ in length.
pub fn norm_tau(coeffs: &[Complex64], eigenvalues: &[f64], tau: f64) -> SobolevNorm {
    assert_eq!(coeffs.len(), eigenvalues.len(), "one coefficient per eigenvalue");
    let sum: f64 = coeffs
        .iter()
        .zip(eigenvalues)
        .map(|(c, l)| {
            let w = if tau == 0.0 { 1.0 } else { l.powf(tau) };
            (w * c.norm()).powi(2)
        })
        .sum();
    SobolevNorm {
        tau,
        value: sum.sqrt(),
    }
}

/// Norms of the solution at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub u: f64,
    pub au: f64,
    pub du: f64,
    pub d2u: f64,
}

/// Modal solutions with their assembly.
#[derive(Debug, Clone)]
pub struct SolutionField {
    operator: SpectralOperator,
    alpha: f64,
    t_end: f64,
    forcing: Vec<Forcing>,
    modes: Vec<ScalarSolution>,
}

pub fn solve(problem: &TelegraphProblem) -> Result<SolutionField> {
    solve_with(problem, &SolveOptions::default())
}

pub fn solve_with(problem: &TelegraphProblem, opts: &SolveOptions) -> Result<SolutionField> {
    problem.validate()?;
    let one = |k: usize| -> Result<ScalarSolution> {
        let p = problem.mode_problem(k)?;
        solve_scalar_with(&p, opts.tol_crit, opts.quadrature).map_err(|e| e.in_mode(k + 1))
    };
    let modes: Vec<ScalarSolution> = if opts.parallel {
        (0..problem.modes()).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (0..problem.modes()).map(one).collect::<Result<_>>()?
    };
    Ok(SolutionField {
        operator: problem.operator.clone(),
        alpha: problem.alpha,
        t_end: problem.t_end,
        forcing: problem.f.clone(),
        modes,
    })
}

impl SolutionField {
    pub fn modes(&self) -> &[ScalarSolution] {
        &self.modes
    }

    pub fn operator(&self) -> &SpectralOperator {
        &self.operator
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// 1-based indices of the critical modes.
    pub fn critical_modes(&self) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.case_tag() == CaseTag::Critical)
            .map(|(k, _)| k + 1)
            .collect()
    }

    fn per_mode(&self, f: impl Fn(&ScalarSolution) -> Result<Complex64>) -> Result<Vec<Complex64>> {
        self.modes
            .iter()
            .enumerate()
            .map(|(k, m)| f(m).map_err(|e| e.in_mode(k + 1)))
            .collect()
    }

    /// Coefficients `T_k(t)` of `u(t)`.
    pub fn u(&self, t: f64) -> Result<Vec<Complex64>> {
        self.per_mode(|m| m.y(t))
    }

    /// Coefficients of `D^ρ u(t)`, `t > 0`.
    pub fn du(&self, t: f64) -> Result<Vec<Complex64>> {
        self.per_mode(|m| m.dy_rho(t))
    }

    /// Coefficients of `A u(t)`.
    pub fn au(&self, t: f64) -> Result<Vec<Complex64>> {
        let u = self.u(t)?;
        Ok(u.iter().zip(self.operator.eigenvalues()).map(|(c, l)| c * l).collect())
    }

    /// Coefficients of `(D^ρ)² u(t) = f - 2α D^ρ u - A u`.
    pub fn d2u(&self, t: f64) -> Result<Vec<Complex64>> {
        let u = self.u(t)?;
        let du = self.du(t)?;
        Ok(self.combine_d2(t, &u, &du))
    }

    fn combine_d2(&self, t: f64, u: &[Complex64], du: &[Complex64]) -> Vec<Complex64> {
        (0..u.len())
            .map(|k| self.forcing[k].eval(t) - du[k] * (2.0 * self.alpha) - u[k] * self.operator.eigenvalues()[k])
            .collect()
    }

    /// `‖u‖`, `‖Au‖`, `‖D^ρu‖`, `‖(D^ρ)²u‖` at `t > 0`.
    pub fn norms(&self, t: f64) -> Result<NormSample> {
        let eig = self.operator.eigenvalues();
        let u = self.u(t)?;
        let du = self.du(t)?;
        let d2u = self.combine_d2(t, &u, &du);
        Ok(NormSample {
            t,
            u: norm_tau(&u, eig, 0.0).value,
            au: norm_tau(&u, eig, 1.0).value,
            du: norm_tau(&du, eig, 0.0).value,
            d2u: norm_tau(&d2u, eig, 0.0).value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilitySample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Ratio of `‖(D^ρ)²u‖ + ‖D^ρu‖ + ‖Au‖` to
/// `t^{-ρ}(‖φ₀‖ + ‖φ₁‖_{1/2}) + max_t ‖f(t)‖_ε` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub samples: Vec<StabilitySample>,
    pub sup_ratio: f64,
    pub t_at_sup: f64,
    /// False when the ratio grows as `t` decreases over the last samples.
    pub bounded: bool,
}

/// Samples of `f` used for `max_t ‖f(t)‖_ε`.
const FORCING_SAMPLES: usize = 256;

/// Evaluates the stability ratio at `t = T·2^{-j}`, `j = 0..=levels`.
pub fn stability_report(problem: &TelegraphProblem, field: &SolutionField, levels: u32) -> Result<StabilityReport> {
    let times: Vec<f64> = (0..=levels).map(|j| problem.t_end * 0.5f64.powi(j as i32)).collect();
    stability_report_on(problem, field, &times)
}

pub fn stability_report_on(problem: &TelegraphProblem, field: &SolutionField, times: &[f64]) -> Result<StabilityReport> {
    let eig = problem.operator.eigenvalues();
    let data = norm_tau(&problem.phi0, eig, 0.0).value + norm_tau(&problem.phi1, eig, 0.5).value;
    let mut f_max = 0.0f64;
    for i in 0..=FORCING_SAMPLES {
        let t = problem.t_end * i as f64 / FORCING_SAMPLES as f64;
        let fk: Vec<Complex64> = problem.f.iter().map(|f| f.eval(t)).collect();
        f_max = f_max.max(norm_tau(&fk, eig, problem.epsilon).value);
    }

    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let n = field.norms(t)?;
        let lhs = n.d2u + n.du + n.au;
        let rhs = t.powf(-problem.rho) * data + f_max;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        samples.push(StabilitySample { t, lhs, rhs, ratio });
    }

    let (t_at_sup, sup_ratio) = samples
        .iter()
        .map(|s| (s.t, s.ratio))
        .fold((f64::NAN, 0.0), |acc, (t, r)| if r >= acc.1 { (t, r) } else { acc });
    Ok(StabilityReport {
        bounded: ratio_bounded(&samples),
        sup_ratio,
        t_at_sup,
        samples,
    })
}

/// Bounded unless the ratio keeps growing towards `t = 0` (log-log slope
/// below -0.1 over the smallest five times).
fn ratio_bounded(samples: &[StabilitySample]) -> bool {
    if samples.iter().any(|s| !s.ratio.is_finite()) {
        return false;
    }
    let mut tail: Vec<&StabilitySample> = samples.iter().filter(|s| s.ratio > 0.0).collect();
    tail.sort_by(|a, b| a.t.total_cmp(&b.t));
    tail.truncate(5);
    if tail.len() < 2 {
        return true;
    }
    let h: Vec<f64> = tail.iter().map(|s| s.t).collect();
    let r: Vec<f64> = tail.iter().map(|s| s.ratio).collect();
    crate::fracops::observed_order(&h, &r) >= -0.1
}

/// `u(x_i, t_j)` by sine synthesis; `values[j][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalField {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

pub fn assemble_physical(field: &SolutionField, x_grid: &[f64], t_grid: &[f64]) -> Result<PhysicalField> {
    let op = field.operator();
    if !matches!(op.kind(), OperatorKind::Laplacian1dDirichlet { .. }) {
        return Err(Error::WrongOperatorKind);
    }
    let basis: Vec<Vec<f64>> = x_grid
        .iter()
        .map(|&x| (1..=op.modes()).map(|k| op.eigenfunction(k, x)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let coeffs = field.u(t)?;
        values.push(
            basis
                .iter()
                .map(|b| coeffs.iter().zip(b).map(|(c, v)| c * v).sum())
                .collect(),
        );
    }
    Ok(PhysicalField {
        x: x_grid.to_vec(),
        t: t_grid.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::solve_scalar;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn norm_examples() {
        let n = norm_tau(&[c(1.0)], &[1.0], 0.7);
        assert_eq!(n.value, 1.0);
        let n = norm_tau(&[c(1.0), c(1.0)], &[1.0, 4.0], 0.5);
        assert!((n.value - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn operator_validation() {
        assert!(SpectralOperator::diagonal(vec![]).is_err());
        assert!(SpectralOperator::diagonal(vec![2.0, 1.0]).is_err());
        assert!(SpectralOperator::diagonal(vec![0.0]).is_err());
        let lap = SpectralOperator::laplacian_1d(PI, 3).unwrap();
        assert_eq!(lap.eigenvalues(), &[1.0, 4.0, 9.0]);
        assert!(SpectralOperator::diagonal(vec![1.0]).unwrap().eigenfunction(1, 0.1).is_err());
    }

    #[test]
    fn one_mode_reduces_to_scalar() {
        let op = SpectralOperator::diagonal(vec![2.0]).unwrap();
        let p = TelegraphProblem::new(0.5, 1.0, 1.0, op, vec![c(0.3)], vec![c(1.0)], vec![Forcing::constant(1.0)], 0.5).unwrap();
        let field = solve(&p).unwrap();
        let s = solve_scalar(&p.mode_problem(0).unwrap()).unwrap();
        for t in [0.1, 0.5, 1.0] {
            assert_eq!(field.u(t).unwrap()[0], s.y(t).unwrap());
            assert_eq!(field.du(t).unwrap()[0], s.dy_rho(t).unwrap());
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let op = SpectralOperator::laplacian_1d(PI, 8).unwrap();
        let p = TelegraphProblem::unforced(0.5, 1.0, 1.0, op, vec![c(0.0); 8], vec![c(0.0); 8]).unwrap();
        let field = solve(&p).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert!(field.u(t).unwrap().iter().all(|v| v.norm() == 0.0));
        }
        let rep = stability_report(&p, &field, 5).unwrap();
        assert_eq!(rep.sup_ratio, 0.0);
    }

    #[test]
    fn dirichlet_boundary_and_initial_shape() {
        let l = 2.0;
        let op = SpectralOperator::laplacian_1d(l, 4).unwrap();
        let mut phi1 = vec![c(0.0); 4];
        phi1[0] = c(1.0);
        let p = TelegraphProblem::unforced(0.5, 1.0, 1.0, op, vec![c(0.0); 4], phi1).unwrap();
        let field = solve(&p).unwrap();
        let x = [0.0, 0.5, 1.0, l];
        let phys = assemble_physical(&field, &x, &[0.0, 0.5]).unwrap();
        for row in &phys.values {
            assert!(row[0].norm() < 1e-15 && row[3].norm() < 1e-15);
        }
        for (i, &xi) in x.iter().enumerate() {
            let expect = (2.0 / l).sqrt() * (PI * xi / l).sin();
            assert!((phys.values[0][i].re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let op = SpectralOperator::diagonal(vec![1.0, 2.0]).unwrap();
        assert!(TelegraphProblem::unforced(0.5, 1.0, 1.0, op, vec![c(0.0)], vec![c(0.0); 2]).is_err());
    }

    #[test]
    fn diagonal_operator_has_no_physical_field() {
        let op = SpectralOperator::diagonal(vec![1.0]).unwrap();
        let p = TelegraphProblem::unforced(0.5, 1.0, 1.0, op, vec![c(0.0)], vec![c(1.0)]).unwrap();
        let field = solve(&p).unwrap();
        assert!(matches!(assemble_physical(&field, &[0.5], &[0.5]), Err(Error::WrongOperatorKind)));
    }
}
