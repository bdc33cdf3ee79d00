//! Checks on the assembled operator solution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::checks_scalar::mode_residual;
use super::common::{attainable_order, c, check_times, dyadic_times, fmax, fmin, norm};
use super::{Context, Outcome};
use crate::error::Result;
use crate::scalar::Forcing;
use crate::spectral::{
    assemble_physical, norm_tau, solve, solve_with, stability_report, SolveOptions, SpectralOperator,
    TelegraphProblem,
};

/// Dirichlet Laplacian on `(0, π)` with `ρ = 1/2`, `α = 1` (so mode 1 is
/// critical), `φ₁ = Σ k⁻³ v_k`, `φ₀ = Σ (-1)^k k⁻² v_k`, `f = 0`.
pub fn laplacian_fixture(modes: usize) -> Result<TelegraphProblem> {
    let phi1 = (1..=modes).map(|k| c((k as f64).powi(-3))).collect();
    let phi0 = (1..=modes)
        .map(|k| c(if k % 2 == 0 { 1.0 } else { -1.0 } / (k * k) as f64))
        .collect();
    TelegraphProblem::unforced(0.5, 1.0, 1.0, SpectralOperator::laplacian_1d(PI, modes)?, phi0, phi1)
}

/// Per-mode L1 residual of the Laplacian fixture, realness of the
/// coefficients and the equation identity for the second derivative.
pub(crate) fn equation_residual(ctx: &Context) -> Result<Outcome> {
    let p = laplacian_fixture(32)?;
    let field = solve(&p)?;
    let levels = &ctx.cfg.residual_levels;
    let res: Vec<Result<Value>> = field
        .modes()
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let r = mode_residual(m, levels)?;
            let mut o = r.to_json();
            o["mode"] = json!(k + 1);
            o["pass"] = json!(r.ok(m.problem().rho));
            Ok(o)
        })
        .collect();
    let rows: Vec<Value> = res.into_iter().collect::<Result<_>>()?;

    let mut imag = 0.0f64;
    let mut identity = 0.0f64;
    let eig = p.operator.eigenvalues();
    for t in check_times(p.t_end) {
        for m in field.modes() {
            let y = m.y_complex(t)?;
            imag = imag.max(y.im.abs() / (1.0 + y.norm()));
        }
        let u = field.u(t)?;
        let du = field.du(t)?;
        let d2 = field.d2u(t)?;
        let r: Vec<Complex64> = (0..u.len()).map(|k| d2[k] + du[k] * (2.0 * p.alpha) + u[k] * eig[k]).collect();
        identity = identity.max(norm(&r));
    }
    let constant = fmax(rows.iter().map(|r| r["C"].as_f64().unwrap_or(f64::NAN)));
    Ok(Outcome {
        pass: rows.iter().all(|r| r["pass"] == true) && imag <= 1e-10 && identity <= 1e-10,
        constant: Some(constant),
        details: json!({
            "operator": "dirichlet laplacian, L = pi, K = 32", "critical_modes": field.critical_modes(),
            "min_slope": fmin(rows.iter().map(|r| r["slope"].as_f64().unwrap_or(f64::NAN))),
            "attainable_order": attainable_order(p.rho),
            "max_scaled_imaginary_part": imag, "identity_residual": identity, "modes": rows,
        }),
    })
}

/// Embedding `‖h‖_σ ≤ max(1, λ₁^{σ-τ}) ‖h‖_τ` for `σ ≤ τ`, and decay of the
/// truncation error `‖u_{2K}(t) - u_K(t)‖` for `K ∈ {8, 16, 32}`.
pub(crate) fn sobolev_norms(ctx: &Context) -> Result<Outcome> {
    let taus = [0.0, 0.25, 0.5, 1.0];
    let mut embed_worst = 0.0f64;
    for fx in &ctx.fixtures {
        let eig = fx.problem.operator.eigenvalues();
        for h in [&fx.problem.phi0, &fx.problem.phi1] {
            for (i, &s) in taus.iter().enumerate() {
                for &t in &taus[i..] {
                    let lhs = norm_tau(h, eig, s).value;
                    let rhs = 1f64.max(eig[0].powf(s - t)) * norm_tau(h, eig, t).value;
                    embed_worst = embed_worst.max(lhs / rhs);
                }
            }
        }
    }

    let reference = solve(&laplacian_fixture(64)?)?;
    let mut rows = Vec::new();
    let mut decay_ok = true;
    for t in [0.5, 1.0] {
        let full = reference.u(t)?;
        let eig = reference.operator().eigenvalues();
        let mut errs = Vec::new();
        for k in [8usize, 16, 32] {
            let truncated = solve(&laplacian_fixture(k)?)?.u(t)?;
            let diff: Vec<Complex64> = (0..2 * k)
                .map(|j| full[j] - truncated.get(j).copied().unwrap_or_default())
                .collect();
            let tail: f64 = (k..2 * k).map(|j| eig[j] * (j as f64 + 1.0).powi(-6)).sum::<f64>().sqrt();
            let e = norm(&diff);
            errs.push(e);
            rows.push(json!({"t": t, "K": k, "error": e, "data_tail": tail, "ratio": e / tail}));
        }
        decay_ok &= errs.windows(2).all(|w| w[1] < w[0]);
    }
    Ok(Outcome {
        pass: embed_worst <= 1.0 + 1e-12 && decay_ok,
        constant: None,
        details: json!({"embedding_max_ratio": embed_worst, "truncation": rows}),
    })
}

/// Coefficient norm against the physical-space L² norm of the synthesised
/// field (trapezoid, 4096 panels).
pub(crate) fn parseval(_ctx: &Context) -> Result<Outcome> {
    let p = laplacian_fixture(32)?;
    let field = solve(&p)?;
    let n = 4096;
    let x: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    let times = [0.25, 0.5, 1.0];
    let phys = assemble_physical(&field, &x, &times)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (j, &t) in times.iter().enumerate() {
        let coeff = norm(&field.u(t)?);
        let dx = PI / n as f64;
        let l2: f64 = phys.values[j]
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 || i == n { 0.5 } else { 1.0 } * v.norm_sqr() * dx)
            .sum::<f64>()
            .sqrt();
        let e = (coeff - l2).abs();
        worst = worst.max(e);
        rows.push(json!({"t": t, "coefficient_norm": coeff, "physical_norm": l2, "difference": e}));
    }
    Ok(Outcome {
        pass: worst <= 1e-6,
        constant: None,
        details: json!({"tolerance": 1e-6, "panels": n, "samples": rows}),
    })
}

/// `‖(D^ρ)²u‖ + ‖D^ρu‖ + ‖Au‖ ≤ C (t^{-ρ}(‖φ₀‖ + ‖φ₁‖_{1/2}) + max ‖f‖_ε)`
/// on `t = T·2^{-j}`.
pub(crate) fn stability(ctx: &Context) -> Result<Outcome> {
    let fields = ctx.fields()?;
    let reports: Vec<Result<Value>> = ctx
        .fixtures
        .par_iter()
        .zip(fields)
        .map(|(fx, field)| {
            let r = stability_report(&fx.problem, field, ctx.cfg.stability_levels)?;
            Ok(json!({
                "fixture": fx.id, "sup_ratio": r.sup_ratio, "t_at_sup": r.t_at_sup,
                "bounded": r.bounded, "smallest_t_ratio": r.samples.last().map(|s| s.ratio),
            }))
        })
        .collect();
    let rows: Vec<Value> = reports.into_iter().collect::<Result<_>>()?;
    let sup = fmax(rows.iter().map(|r| r["sup_ratio"].as_f64().unwrap_or(f64::NAN)));
    Ok(Outcome {
        pass: sup.is_finite() && rows.iter().all(|r| r["bounded"] == true),
        constant: Some(sup),
        details: json!({"levels": ctx.cfg.stability_levels, "fixtures": rows}),
    })
}

/// Zero data gives the zero solution, and serial and parallel modal solves
/// agree bit for bit.
pub(crate) fn uniqueness(ctx: &Context) -> Result<Outcome> {
    let mut zero_max = 0.0f64;
    let mut identical = true;
    for fx in &ctx.fixtures {
        let p = &fx.problem;
        let k = p.modes();
        let zero = TelegraphProblem::new(
            p.rho,
            p.alpha,
            p.t_end,
            p.operator.clone(),
            vec![Complex64::default(); k],
            vec![Complex64::default(); k],
            vec![Forcing::Zero; k],
            p.epsilon,
        )?;
        let field = solve(&zero)?;
        for t in dyadic_times(p.t_end, 20) {
            zero_max = zero_max.max(norm(&field.u(t)?)).max(norm(&field.du(t)?));
        }
        let serial = solve_with(
            p,
            &SolveOptions {
                parallel: false,
                ..Default::default()
            },
        )?;
        let parallel = solve(p)?;
        for t in check_times(p.t_end) {
            identical &= serial.u(t)? == parallel.u(t)? && serial.du(t)? == parallel.du(t)?;
        }
    }
    Ok(Outcome {
        pass: zero_max == 0.0 && identical,
        constant: None,
        details: json!({"zero_data_max_norm": zero_max, "serial_equals_parallel": identical}),
    })
}
