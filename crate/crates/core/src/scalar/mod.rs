//! One spectral mode:
//!
//! ```text
//! (D^ρ)² y + 2α D^ρ y + λ y = g,   y(0) = φ₁,   lim_{t→0} D^ρ y = φ₀.
//! ```
//!
//! With `d = √(α² - λ)` (principal branch) and `r± = -α ± d`, `E±(t) = E_{ρ,1}(r± t^ρ)`:
//!
//! ```text
//! α² ≠ λ:  y = [(α+d) E₊ - (α-d) E₋] φ₁ / 2d + [E₊ - E₋] φ₀ / 2d + [u₊ - u₋] / 2d,
//!          u± = ∫₀ᵗ (t-τ)^{ρ-1} E_{ρ,ρ}(r± (t-τ)^ρ) g(τ) dτ,
//! α² = λ:  y = [E_{ρ,1}(-αt^ρ) + α t^ρ E²_{ρ,1+ρ}(-αt^ρ)] φ₁ + t^ρ E²_{ρ,1+ρ}(-αt^ρ) φ₀
//!            + ∫₀ᵗ (t-τ)^{2ρ-1} E²_{ρ,2ρ}(-α(t-τ)^ρ) g(τ) dτ.
//! ```
//!
//! The Caputo derivatives follow from `D^ρ E_{ρ,1}(r t^ρ) = r E_{ρ,1}(r t^ρ)`
//! and `D^ρ u± = r± u± + g` in the first case, and from the Laplace image
//! `s^ρ ŷ - s^{ρ-1} φ₁` in the second:
//!
//! ```text
//! α² = λ:  D^ρ y = -α² t^ρ E²_{ρ,1+ρ}(-αt^ρ) φ₁ + E²_{ρ,1}(-αt^ρ) φ₀
//!                + ∫₀ᵗ (t-τ)^{ρ-1} E²_{ρ,ρ}(-α(t-τ)^ρ) g(τ) dτ.
//! ```

mod convolution;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{SampledTrajectory, TimeGrid};
use crate::mlfunc::gamma::gamma;

pub(crate) use convolution::prabhakar;
use convolution::{Convolution, Kernel};

/// Relative distance `|α² - λ| / max(α², λ)` below which a mode is critical.
pub const DEFAULT_TOL_CRIT: f64 = 1e-8;

/// Imaginary parts below this (relative to `1 + |y|`) are rounding noise
/// for real data.
const REAL_RESIDUE: f64 = 1e-10;

/// Time-dependent forcing of one mode.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    Zero,
    /// `g(t) = Σ c_m t^m`
    Polynomial(Vec<Complex64>),
    /// Samples on a uniform grid, interpolated linearly.
    Sampled(SampledTrajectory),
    Callable(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero => f.write_str("Zero"),
            Forcing::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Forcing::Sampled(s) => f
                .debug_struct("Sampled")
                .field("t_end", &s.grid.t_end())
                .field("n", &s.grid.n())
                .finish(),
            Forcing::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

impl Forcing {
    pub fn constant(c: f64) -> Self {
        Forcing::Polynomial(vec![Complex64::new(c, 0.0)])
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Forcing::Zero => Complex64::new(0.0, 0.0),
            Forcing::Polynomial(c) => c
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, cm| acc * t + cm),
            Forcing::Sampled(s) => s.interpolate(t),
            Forcing::Callable(f) => f(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Polynomial(c) => c.iter().all(|v| v.norm() == 0.0),
            Forcing::Sampled(s) => s.values.iter().all(|v| v.norm() == 0.0),
            Forcing::Callable(_) => false,
        }
    }

    /// Whether `g` is real-valued. Callables are assumed complex.
    fn is_real(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Polynomial(c) => c.iter().all(|v| v.im == 0.0),
            Forcing::Sampled(s) => s.values.iter().all(|v| v.im == 0.0),
            Forcing::Callable(_) => false,
        }
    }

    /// Riemann-Liouville integral of order `order`, exact for polynomials
    /// and by product integration otherwise.
    pub(crate) fn frac_integral_at(&self, order: f64, t: f64, quad: &QuadratureSpec, t_end: f64) -> Result<Complex64> {
        let kernel = Kernel {
            rho: order,
            beta: order,
            gamma: 1,
            r: Complex64::new(0.0, 0.0),
        };
        Convolution::new(kernel, self, quad.grid(t_end)?)?.eval(t)
    }
}

/// Resolution for callable forcing: number of uniform panels on `[0, T]`.
/// Sampled forcing always uses its own grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { panels: 512 }
    }
}

impl QuadratureSpec {
    fn grid(&self, t_end: f64) -> Result<TimeGrid> {
        TimeGrid::new(t_end, self.panels.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    /// `α² ≠ λ`: two distinct characteristic roots.
    Distinct,
    /// `α² = λ`: a double root.
    Critical,
}

pub fn classify_case(alpha: f64, lambda: f64, tol_crit: f64) -> CaseTag {
    let a2 = alpha * alpha;
    if (a2 - lambda).abs() <= tol_crit * a2.max(lambda) {
        CaseTag::Critical
    } else {
        CaseTag::Distinct
    }
}

#[derive(Debug, Clone)]
pub struct ScalarProblem {
    pub rho: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub phi0: Complex64,
    pub phi1: Complex64,
    pub g: Forcing,
    pub t_end: f64,
}

impl ScalarProblem {
    pub fn new(
        rho: f64,
        alpha: f64,
        lambda: f64,
        phi0: Complex64,
        phi1: Complex64,
        g: Forcing,
        t_end: f64,
    ) -> Result<Self> {
        let p = Self {
            rho,
            alpha,
            lambda,
            phi0,
            phi1,
            g,
            t_end,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho", self.rho, "must lie in (0, 1)");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha", self.alpha, "must be positive");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda", self.lambda, "must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("T", self.t_end, "must be positive");
        }
        if !(self.phi0.is_finite() && self.phi1.is_finite()) {
            return bad("phi", f64::NAN, "initial data must be finite");
        }
        if let Forcing::Sampled(s) = &self.g {
            if s.grid.t_end() < self.t_end * (1.0 - 1e-12) {
                return Err(Error::InvalidProblem(format!(
                    "sampled forcing covers [0, {}] but T = {}",
                    s.grid.t_end(),
                    self.t_end
                )));
            }
        }
        Ok(())
    }

    fn is_real(&self) -> bool {
        self.phi0.im == 0.0 && self.phi1.im == 0.0 && self.g.is_real()
    }
}

#[derive(Debug, Clone)]
enum Branch {
    Distinct {
        d: Complex64,
        r_plus: Complex64,
        r_minus: Complex64,
        u_plus: Convolution,
        u_minus: Convolution,
    },
    Critical {
        /// kernel `x^{2ρ-1} E²_{ρ,2ρ}(-αx^ρ)`, the forced part of y
        u: Convolution,
        /// kernel `x^{ρ-1} E²_{ρ,ρ}(-αx^ρ)`, the forced part of D^ρ y
        du: Convolution,
    },
}

/// Closed-form solution of one mode, evaluable at any `t ∈ [0, T]`.
#[derive(Debug, Clone)]
pub struct ScalarSolution {
    problem: ScalarProblem,
    case_tag: CaseTag,
    quadrature: QuadratureSpec,
    real_data: bool,
    branch: Branch,
}

/// Solves with the default critical tolerance and quadrature.
pub fn solve_scalar(p: &ScalarProblem) -> Result<ScalarSolution> {
    solve_scalar_with(p, DEFAULT_TOL_CRIT, QuadratureSpec::default())
}

pub fn solve_scalar_with(p: &ScalarProblem, tol_crit: f64, quad: QuadratureSpec) -> Result<ScalarSolution> {
    match classify_case(p.alpha, p.lambda, tol_crit) {
        CaseTag::Distinct => distinct(p, quad),
        CaseTag::Critical => critical(p, quad),
    }
}

pub fn solve_scalar_distinct(p: &ScalarProblem) -> Result<ScalarSolution> {
    if classify_case(p.alpha, p.lambda, DEFAULT_TOL_CRIT) == CaseTag::Critical {
        return Err(Error::CaseMismatch(format!(
            "alpha^2 = {} and lambda = {} coincide within the critical tolerance",
            p.alpha * p.alpha,
            p.lambda
        )));
    }
    distinct(p, QuadratureSpec::default())
}

pub fn solve_scalar_critical(p: &ScalarProblem) -> Result<ScalarSolution> {
    if classify_case(p.alpha, p.lambda, DEFAULT_TOL_CRIT) == CaseTag::Distinct {
        return Err(Error::CaseMismatch(format!(
            "alpha^2 = {} differs from lambda = {}",
            p.alpha * p.alpha,
            p.lambda
        )));
    }
    critical(p, QuadratureSpec::default())
}

fn distinct(p: &ScalarProblem, quad: QuadratureSpec) -> Result<ScalarSolution> {
    p.validate()?;
    let d = Complex64::new(p.alpha * p.alpha - p.lambda, 0.0).sqrt();
    if d.norm() == 0.0 {
        return Err(Error::CaseMismatch("alpha^2 = lambda exactly".into()));
    }
    let r_plus = -p.alpha + d;
    let r_minus = -p.alpha - d;
    let grid = quad.grid(p.t_end)?;
    let kernel = |r| Kernel {
        rho: p.rho,
        beta: p.rho,
        gamma: 1,
        r,
    };
    let u_plus = Convolution::new(kernel(r_plus), &p.g, grid)?;
    let u_minus = Convolution::new(kernel(r_minus), &p.g, grid)?;
    Ok(ScalarSolution {
        problem: p.clone(),
        case_tag: CaseTag::Distinct,
        quadrature: quad,
        real_data: p.is_real(),
        branch: Branch::Distinct {
            d,
            r_plus,
            r_minus,
            u_plus,
            u_minus,
        },
    })
}

fn critical(p: &ScalarProblem, quad: QuadratureSpec) -> Result<ScalarSolution> {
    p.validate()?;
    let grid = quad.grid(p.t_end)?;
    let r = Complex64::new(-p.alpha, 0.0);
    let u = Convolution::new(
        Kernel {
            rho: p.rho,
            beta: 2.0 * p.rho,
            gamma: 2,
            r,
        },
        &p.g,
        grid,
    )?;
    let du = Convolution::new(
        Kernel {
            rho: p.rho,
            beta: p.rho,
            gamma: 2,
            r,
        },
        &p.g,
        grid,
    )?;
    Ok(ScalarSolution {
        problem: p.clone(),
        case_tag: CaseTag::Critical,
        quadrature: quad,
        real_data: p.is_real(),
        branch: Branch::Critical { u, du },
    })
}

fn e1(rho: f64, z: Complex64) -> Result<Complex64> {
    prabhakar(1, rho, 1.0, z)
}

impl ScalarSolution {
    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    pub fn problem(&self) -> &ScalarProblem {
        &self.problem
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quadrature
    }

    fn check_domain(&self, t: f64, allow_zero: bool) -> Result<()> {
        let t_end = self.problem.t_end;
        let ok = t <= t_end * (1.0 + 1e-12) && (t > 0.0 || (allow_zero && t == 0.0));
        if !ok || t.is_nan() {
            return Err(Error::EvaluationOutOfDomain { t, t_end });
        }
        Ok(())
    }

    fn project(&self, v: Complex64) -> Result<Complex64> {
        if !v.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite value {v}")));
        }
        if !self.real_data {
            return Ok(v);
        }
        if v.im.abs() > REAL_RESIDUE * (1.0 + v.norm()) {
            return Err(Error::QuadratureFailure(format!(
                "imaginary residue {} for real data",
                v.im
            )));
        }
        Ok(Complex64::new(v.re, 0.0))
    }

    /// `y(t)` before the imaginary part is discarded for real data.
    pub fn y_complex(&self, t: f64) -> Result<Complex64> {
        self.check_domain(t, true)?;
        let p = &self.problem;
        if t == 0.0 {
            return Ok(p.phi1);
        }
        let tr = t.powf(p.rho);
        match &self.branch {
            Branch::Distinct {
                d,
                r_plus,
                r_minus,
                u_plus,
                u_minus,
            } => {
                let ep = e1(p.rho, r_plus * tr)?;
                let em = e1(p.rho, r_minus * tr)?;
                let a = Complex64::new(p.alpha, 0.0);
                let mut v = ((a + d) * ep - (a - d) * em) * p.phi1 + (ep - em) * p.phi0;
                if !u_plus.is_zero() {
                    v += u_plus.eval(t)? - u_minus.eval(t)?;
                }
                Ok(v / (d * 2.0))
            }
            Branch::Critical { u, .. } => {
                let z = Complex64::new(-p.alpha * tr, 0.0);
                let e = e1(p.rho, z)?;
                let e2 = prabhakar(2, p.rho, 1.0 + p.rho, z)? * tr;
                Ok((e + e2 * p.alpha) * p.phi1 + e2 * p.phi0 + u.eval(t)?)
            }
        }
    }

    pub fn y(&self, t: f64) -> Result<Complex64> {
        let v = self.y_complex(t)?;
        self.project(v)
    }

    /// Analytic Caputo derivative `D^ρ y(t)`, `t ∈ (0, T]`.
    pub fn dy_rho(&self, t: f64) -> Result<Complex64> {
        self.check_domain(t, false)?;
        let p = &self.problem;
        let tr = t.powf(p.rho);
        let v = match &self.branch {
            Branch::Distinct {
                d,
                r_plus,
                r_minus,
                u_plus,
                u_minus,
            } => {
                let ep = e1(p.rho, r_plus * tr)?;
                let em = e1(p.rho, r_minus * tr)?;
                let mut v = (ep - em) * (-p.lambda) * p.phi1 + (r_plus * ep - r_minus * em) * p.phi0;
                if !u_plus.is_zero() {
                    v += r_plus * u_plus.eval(t)? - r_minus * u_minus.eval(t)?;
                }
                v / (d * 2.0)
            }
            Branch::Critical { du, .. } => {
                let z = Complex64::new(-p.alpha * tr, 0.0);
                let e2 = prabhakar(2, p.rho, 1.0 + p.rho, z)? * tr;
                let e21 = prabhakar(2, p.rho, 1.0, z)?;
                e2 * (-p.alpha * p.alpha) * p.phi1 + e21 * p.phi0 + du.eval(t)?
            }
        };
        self.project(v)
    }

    /// Critical case only: `D^ρ y` assembled through the integro-differential
    /// identity `D^ρ u = -2αu - α² J^ρ u + J^ρ g` for the forced part `u`,
    /// an independent route to [`Self::dy_rho`].
    pub fn dy_rho_integro_route(&self, t: f64) -> Result<Complex64> {
        self.check_domain(t, false)?;
        let Branch::Critical { u, .. } = &self.branch else {
            return Err(Error::CaseMismatch("integro route needs a critical mode".into()));
        };
        let p = &self.problem;
        let tr = t.powf(p.rho);
        let z = Complex64::new(-p.alpha * tr, 0.0);
        let e2 = prabhakar(2, p.rho, 1.0 + p.rho, z)? * tr;
        let e21 = prabhakar(2, p.rho, 1.0, z)?;
        let mut v = e2 * (-p.alpha * p.alpha) * p.phi1 + e21 * p.phi0;
        if !p.g.is_zero() {
            let integro = solve_integro(p.rho, p.alpha, p.g.clone(), p.t_end, self.quadrature)?;
            v += u.eval(t)? * (-2.0 * p.alpha) - integro.j_rho(t)? * (p.alpha * p.alpha)
                + p.g.frac_integral_at(p.rho, t, &self.quadrature, p.t_end)?;
        }
        self.project(v)
    }

    /// `(D^ρ)² y = g - 2α D^ρ y - λ y`.
    pub fn d2y_rho(&self, t: f64) -> Result<Complex64> {
        let p = &self.problem;
        Ok(p.g.eval(t) - self.dy_rho(t)? * (2.0 * p.alpha) - self.y(t)? * p.lambda)
    }

    /// `y` sampled on a grid.
    pub fn sample_y(&self, grid: TimeGrid) -> Result<SampledTrajectory> {
        let values = grid.nodes().into_iter().map(|t| self.y(t)).collect::<Result<_>>()?;
        SampledTrajectory::new(grid, values)
    }

    /// `D^ρ y` sampled on a grid; the value at `t = 0` is its limit `φ₀`.
    pub fn sample_dy(&self, grid: TimeGrid) -> Result<SampledTrajectory> {
        let values = grid
            .nodes()
            .into_iter()
            .map(|t| if t == 0.0 { Ok(self.problem.phi0) } else { self.dy_rho(t) })
            .collect::<Result<_>>()?;
        SampledTrajectory::new(grid, values)
    }
}

/// Free-function form of [`ScalarSolution::dy_rho`].
pub fn dy_rho(sol: &ScalarSolution, t: f64) -> Result<Complex64> {
    sol.dy_rho(t)
}

/// Solution of `D^ρ u - λu = f`, `u(0) = 0`:
/// `u(t) = ∫₀ᵗ (t-τ)^{ρ-1} E_{ρ,ρ}(λ(t-τ)^ρ) f(τ) dτ`.
#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    lambda: Complex64,
    f: Forcing,
    t_end: f64,
    conv: Convolution,
}

pub fn solve_relaxation(
    rho: f64,
    lambda: Complex64,
    f: Forcing,
    t_end: f64,
    quad: QuadratureSpec,
) -> Result<RelaxationSolution> {
    check_aux(rho, t_end)?;
    let conv = Convolution::new(
        Kernel {
            rho,
            beta: rho,
            gamma: 1,
            r: lambda,
        },
        &f,
        quad.grid(t_end)?,
    )?;
    Ok(RelaxationSolution {
        lambda,
        f,
        t_end,
        conv,
    })
}

impl RelaxationSolution {
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        aux_domain(t, self.t_end)?;
        self.conv.eval(t)
    }

    /// `D^ρ u = λu + f`.
    pub fn caputo(&self, t: f64) -> Result<Complex64> {
        Ok(self.lambda * self.eval(t)? + self.f.eval(t))
    }
}

/// Solution of `D^ρ u + 2αu + α² J^ρ u = J^ρ g`, `u(0) = 0`:
/// `u(t) = ∫₀ᵗ (t-τ)^{2ρ-1} E²_{ρ,2ρ}(-α(t-τ)^ρ) g(τ) dτ`.
#[derive(Debug, Clone)]
pub struct IntegroSolution {
    t_end: f64,
    conv: Convolution,
    /// `J^ρ u`, the same convolution with `β = 3ρ`
    j_conv: Convolution,
}

pub fn solve_integro(rho: f64, alpha: f64, g: Forcing, t_end: f64, quad: QuadratureSpec) -> Result<IntegroSolution> {
    check_aux(rho, t_end)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be non-negative",
        });
    }
    let grid = quad.grid(t_end)?;
    let kernel = |beta| Kernel {
        rho,
        beta,
        gamma: 2,
        r: Complex64::new(-alpha, 0.0),
    };
    Ok(IntegroSolution {
        t_end,
        conv: Convolution::new(kernel(2.0 * rho), &g, grid)?,
        j_conv: Convolution::new(kernel(3.0 * rho), &g, grid)?,
    })
}

impl IntegroSolution {
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        aux_domain(t, self.t_end)?;
        self.conv.eval(t)
    }

    /// `J^ρ u(t)`.
    pub fn j_rho(&self, t: f64) -> Result<Complex64> {
        aux_domain(t, self.t_end)?;
        self.j_conv.eval(t)
    }
}

fn check_aux(rho: f64, t_end: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must lie in (0, 1)",
        });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "T",
            value: t_end,
            reason: "must be positive",
        });
    }
    Ok(())
}

fn aux_domain(t: f64, t_end: f64) -> Result<()> {
    if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
        return Err(Error::EvaluationOutOfDomain { t, t_end });
    }
    Ok(())
}

/// `t^{ρ}/Γ(1+ρ)`, the response of the relaxation problem to `f ≡ 1` at `λ = 0`.
pub fn power_response(rho: f64, t: f64) -> f64 {
    t.powf(rho) / gamma(1.0 + rho)
}
