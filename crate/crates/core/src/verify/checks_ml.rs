//! Function-level checks on the Mittag-Leffler evaluator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::common::{c, fmax, slope};
use super::{Context, Ml, Outcome};
use crate::error::Result;
use crate::mlfunc::{ml_prabhakar2, prabhakar_series, rgamma};

const IDENTITY_TOL: f64 = 1e-10;
const RECURRENCE_TOL: f64 = 1e-12;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `10^a .. 10^b` with `per_decade` points per decade.
pub(crate) fn logspace(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    let n = ((b - a) * per_decade as f64).round() as usize;
    (0..=n).map(|i| 10f64.powf(a + (b - a) * i as f64 / n as f64)).collect()
}

/// Closed forms at `ρ ∈ {1, 2}`, the three-parameter reduction against its
/// defining series, and the recurrence `E_{ρ,μ}(z) = z E_{ρ,μ+ρ}(z) + 1/Γ(μ)`.
pub(crate) fn identities(ctx: &Context) -> Result<Outcome> {
    let m = &ctx.ml;
    let grid = linspace(-5.0, 5.0, 100);
    let mut exp_err = 0.0f64;
    let mut e12_err = 0.0f64;
    for &x in &grid {
        exp_err = exp_err.max((m.e(1.0, 1.0, c(x))? - x.exp()).norm());
        e12_err = e12_err.max((m.e(1.0, 2.0, c(x))? - x.exp_m1() / x).norm());
    }
    let mut cos_err = 0.0f64;
    for x in linspace(0.0, 10.0, 100) {
        cos_err = cos_err.max((m.e(2.0, 1.0, c(-x * x))? - x.cos()).norm());
    }
    let mut exp_complex_err = 0.0f64;
    for th in linspace(-PI, PI, 100) {
        let z = Complex64::from_polar(4.0, th);
        exp_complex_err = exp_complex_err.max((m.e(1.0, 1.0, z)? - z.exp()).norm());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed ^ 0x3);
    let mut prab_err = 0.0f64;
    let mut prab_worst = json!(null);
    for _ in 0..50 {
        let rho = rng.gen_range(0.3..1.0);
        let mu = rng.gen_range(0.6..2.5);
        // the direct series is usable while |z|^{1/ρ} stays moderate
        let z = Complex64::from_polar(rng.gen_range(0.0..3f64.min(8f64.powf(rho))), rng.gen_range(-PI..PI));
        let a = ml_prabhakar2(rho, mu, z, 1e-12)?.value;
        let b = prabhakar_series(rho, mu, 2.0, z, 1e-13)?.value;
        let e = (a - b).norm() / b.norm().max(1.0);
        if e > prab_err {
            prab_err = e;
            prab_worst = json!({"rho": rho, "mu": mu, "z": [z.re, z.im]});
        }
    }

    let mut rec_err = 0.0f64;
    for _ in 0..50 {
        let rho = rng.gen_range(0.3..1.0);
        let mu = rng.gen_range(0.3..2.0);
        let th = rng.gen_range(PI / 2.0..PI) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let z = Complex64::from_polar(rng.gen_range(0.0..50.0), th);
        let e0 = m.e(rho, mu, z)?;
        let e1 = m.e(rho, mu + rho, z)?;
        let scale = 1f64.max(e0.norm()).max(z.norm() * e1.norm().max(1.0));
        rec_err = rec_err.max((e0 - z * e1 - rgamma(mu)).norm() / scale);
    }

    let worst = fmax([exp_err, e12_err, cos_err, exp_complex_err, prab_err]);
    Ok(Outcome {
        pass: worst <= IDENTITY_TOL && rec_err <= 10.0 * RECURRENCE_TOL,
        constant: None,
        details: json!({
            "tolerance": IDENTITY_TOL,
            "exp_max_abs_error": exp_err,
            "exp_complex_max_abs_error": exp_complex_err,
            "e12_max_abs_error": e12_err,
            "cos_max_abs_error": cos_err,
            "three_parameter_max_rel_error": prab_err,
            "three_parameter_worst": prab_worst,
            "recurrence_max_scaled_error": rec_err,
        }),
    })
}

const TAIL_PAIRS: [(f64, f64); 8] = [
    (0.25, 1.0),
    (0.5, 1.0),
    (0.75, 1.0),
    (0.9, 1.0),
    (0.5, 1.5),
    (0.75, 0.75),
    (0.25, 2.0),
    (0.9, 0.5),
];

/// `E_{ρ,μ}(z) + z^{-1}/Γ(μ-ρ) = O(|z|^{-2})` on the negative axis. The
/// same ratio with `Γ(ρ-μ)` in place of `Γ(μ-ρ)` is reported for
/// comparison; it grows like `|z|` whenever the two differ.
pub(crate) fn asymptotic_tail(ctx: &Context) -> Result<Outcome> {
    let radii = logspace(2.0, 6.0, 10);
    let mut rows = Vec::new();
    let mut pass = true;
    let mut sup = 0.0f64;
    for (rho, mu) in TAIL_PAIRS {
        let mut std = Vec::new();
        let mut swapped = Vec::new();
        for &r in &radii {
            let z = c(-r);
            let e = ctx.ml.e(rho, mu, z)?;
            std.push(((e + rgamma(mu - rho) / z) * r * r).norm());
            swapped.push(((e + rgamma(rho - mu) / z) * r * r).norm());
        }
        let s_std = slope(&radii, &std);
        let s_sw = slope(&radii, &swapped);
        let m = fmax(std.iter().copied());
        sup = sup.max(m);
        let ok = m.is_finite() && (s_std <= 0.05 || m < 1e-9);
        pass &= ok;
        rows.push(json!({
            "rho": rho, "mu": mu, "sup_ratio": m, "slope": s_std,
            "swapped_gamma_slope": s_sw, "pass": ok,
        }));
    }
    Ok(Outcome {
        pass,
        constant: Some(sup),
        details: json!({"radius_range": [1e2, 1e6], "pairs": rows}),
    })
}

pub(crate) const SECTOR_PAIRS: [(f64, f64); 6] = [
    (0.5, 1.0),
    (0.5, 0.5),
    (0.25, 1.0),
    (0.75, 0.75),
    (0.9, 1.0),
    (0.5, 1.5),
];

pub(crate) struct SectorSweep {
    pub constant: f64,
    pub argmax: Complex64,
    /// Largest log-log slope of `|E|(1+|z|)` over `|z| ≥ 10⁴` among the rays.
    pub tail_slope: f64,
    pub evaluations: usize,
}

/// `sup |E_{ρ,μ}(z)|(1+|z|)` over rays `|arg z| ∈ {β, (β+π)/2, π}` with
/// `β = 3πρ/4`, `|z| ≤ 10^{max_decade}`.
pub(crate) fn sector_sweep(ml: &Ml, rho: f64, mu: f64, max_decade: f64, per_decade: usize) -> Result<SectorSweep> {
    let beta = 0.75 * PI * rho;
    let mut radii = vec![0.0];
    radii.extend(logspace(-3.0, max_decade, per_decade));
    let mut out = SectorSweep {
        constant: 0.0,
        argmax: c(0.0),
        tail_slope: f64::NEG_INFINITY,
        evaluations: 0,
    };
    for th in [beta, 0.5 * (beta + PI), PI] {
        let mut tail_r = Vec::new();
        let mut tail_v = Vec::new();
        for &r in &radii {
            let z = Complex64::from_polar(r, th);
            let v = ml.e(rho, mu, z)?.norm() * (1.0 + r);
            out.evaluations += 1;
            if !(v <= out.constant) {
                out.constant = v;
                out.argmax = z;
            }
            if r >= 1e4 {
                tail_r.push(r);
                tail_v.push(v);
            }
        }
        if tail_r.len() >= 2 {
            out.tail_slope = out.tail_slope.max(slope(&tail_r, &tail_v));
        }
    }
    Ok(out)
}

/// `|E_{ρ,μ}(z)| ≤ M/(1+|z|)` in the sector `β ≤ |arg z| ≤ π`, `β > ρπ/2`.
pub(crate) fn sector_bound(ctx: &Context) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut sup = 0.0f64;
    for (rho, mu) in SECTOR_PAIRS {
        let s = sector_sweep(&ctx.ml, rho, mu, 6.0, 10)?;
        let ok = s.constant.is_finite() && s.tail_slope <= 0.05;
        pass &= ok;
        sup = sup.max(s.constant);
        rows.push(json!({
            "rho": rho, "mu": mu, "M": s.constant,
            "argmax": [s.argmax.re, s.argmax.im],
            "tail_slope": s.tail_slope, "pass": ok,
        }));
    }
    Ok(Outcome {
        pass,
        constant: Some(sup),
        details: json!({"sector_angle": "3*pi*rho/4", "radius_max": 1e6, "pairs": rows}),
    })
}

pub(crate) struct LargeEigenSweep {
    pub ratio: f64,
    pub m: f64,
    pub argmax: serde_json::Value,
    pub evaluations: usize,
}

/// For `λ ≥ 4α²`: `t^{ρ-1}|E_{ρ,μ}(-(α-√(α²-λ))t^ρ)| / (λ^{ε-1/2} t^{2ερ-1})`
/// against `M = sup |E(z)|(1+|z|)` over the same arguments.
pub(crate) fn large_eigen_sweep(
    ml: &Ml,
    rho: f64,
    mu: f64,
    alpha: f64,
    t_end: f64,
    lambda_decades: usize,
    time_levels: u32,
) -> Result<LargeEigenSweep> {
    let mut out = LargeEigenSweep {
        ratio: 0.0,
        m: 0.0,
        argmax: json!(null),
        evaluations: 0,
    };
    let n_l = 4 * lambda_decades;
    for i in 0..=n_l {
        let lambda = 4.0 * alpha * alpha * 10f64.powf(i as f64 / 4.0);
        let w = c(alpha) - c(alpha * alpha - lambda).sqrt();
        for j in 0..=time_levels {
            let t = t_end * 0.5f64.powi(j as i32);
            let z = -w * t.powf(rho);
            let e = ml.e(rho, mu, z)?.norm();
            out.evaluations += 1;
            out.m = out.m.max(e * (1.0 + z.norm()));
            for eps in super::fixtures::EPSILONS {
                let lhs = t.powf(rho - 1.0) * e;
                let rhs = lambda.powf(eps - 0.5) * t.powf(2.0 * eps * rho - 1.0);
                let r = lhs / rhs;
                if !(r <= out.ratio) {
                    out.ratio = r;
                    out.argmax = json!({"lambda": lambda, "t": t, "epsilon": eps});
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn large_eigen_estimate(ctx: &Context) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut sup = 0.0f64;
    for rho in super::fixtures::RHOS {
        for mu in [1.0, rho] {
            for alpha in super::fixtures::ALPHAS {
                let s = large_eigen_sweep(&ctx.ml, rho, mu, alpha, 1.0, 6, 20)?;
                let ok = s.ratio.is_finite() && s.ratio <= s.m * (1.0 + 1e-12);
                pass &= ok;
                sup = sup.max(s.ratio);
                rows.push(json!({
                    "rho": rho, "mu": mu, "alpha": alpha, "ratio": s.ratio,
                    "M": s.m, "argmax": s.argmax, "pass": ok,
                }));
            }
        }
    }
    Ok(Outcome {
        pass,
        constant: Some(sup),
        details: json!({
            "lambda_range": "4 alpha^2 .. 4e6 alpha^2",
            "t_grid": "T 2^-j, j <= 20",
            "cases": rows,
        }),
    })
}
