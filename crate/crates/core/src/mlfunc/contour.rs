//! Numerical inversion of the Laplace transform
//! `s^{ρ-μ} / (s^ρ - z)` at `t = 1` on an optimal parabolic contour
//! (Garrappa, SIAM J. Numer. Anal. 53, 2015). Poles to the right of the
//! chosen contour are added back through their residues.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{MlResult, Regime};

const LOG_EPS: f64 = -36.043653389117154;
const MAX_NODES: f64 = 1000.0;

#[derive(Clone, Copy)]
struct Param {
    mu: f64,
    h: f64,
    n: f64,
}

const NONE: Param = Param {
    mu: 0.0,
    h: 0.0,
    n: f64::INFINITY,
};

/// Parameters for a contour confined between two singularities.
fn param_bounded(t: f64, phi_j: f64, phi_j1: f64, pj: f64, qj: f64, log_epsilon: f64) -> Param {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS).exp();

    let sq_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_epsilon - LOG_EPS) / t).sqrt();
    let sq_j1 = phi_j1.sqrt().min(threshold - sq_j);

    let (sqbar_j, sqbar_j1, f_bar) = if pj < 1e-14 && qj < 1e-14 {
        (sq_j, sq_j1, 1.0)
    } else if pj < 1e-14 {
        let f_min = if sq_j > 0.0 {
            fac * (sq_j / (sq_j1 - sq_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return NONE;
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        (sq_j, (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq), f_bar)
    } else if qj < 1e-14 {
        let f_min = fac * (sq_j1 / (sq_j1 - sq_j)).powf(pj);
        if f_min >= f_max {
            return NONE;
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        ((2.0 * sq_j + fp * sq_j1) / (2.0 - fp), sq_j1, f_bar)
    } else {
        let f_min = fac * (sq_j + sq_j1) / (sq_j1 - sq_j).powf(pj.max(qj));
        if f_min >= f_max {
            return NONE;
        }
        let f_min = f_min.max(1.5);
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 * t / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        let a = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
        let b = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
        (a, b, f_bar)
    };

    let log_epsilon = log_epsilon - f_bar.ln();
    let w = -sqbar_j1 * sqbar_j1 * t / log_epsilon;
    let mu = (((1.0 + w) * sqbar_j + sqbar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_epsilon * (sqbar_j1 - sqbar_j) / ((1.0 + w) * sqbar_j + sqbar_j1);
    let n = ((1.0 - log_epsilon / t / mu).sqrt() / h).ceil();
    if !(mu > 0.0 && h > 0.0 && n.is_finite()) {
        return NONE;
    }
    Param { mu, h, n }
}

/// Parameters for a contour lying to the right of the last singularity.
fn param_unbounded(t: f64, phi_j: f64, pj: f64, log_epsilon: f64) -> Param {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sqbar = phibar.sqrt();

    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0_f64);
    let (mut n, mut a, mut sq_mu);
    let mut iter = 0;
    loop {
        let phi_t = phibar * t;
        let lept = log_epsilon / phi_t;
        n = (phi_t / PI * (1.0 - 1.5 * lept + (1.0 - 2.0 * lept).sqrt())).ceil();
        a = PI * n / phi_t;
        sq_mu = sqbar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sqbar - sq_phi_j) / sq_mu).powf(-pj);
        iter += 1;
        if pj < 1e-14 || (f_min < fbar && fbar < f_max) || iter > 100 {
            break;
        }
        sqbar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sqbar * sqbar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;

    // keep the round-off amplification exp(μt) under control
    let threshold = (log_epsilon - LOG_EPS) / t;
    if mu > threshold {
        let q = if pj.abs() < 1e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (q + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt();
            let u = (-phibar * t / LOG_EPS).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt() / n;
        } else {
            return NONE;
        }
    }
    if !(mu > 0.0 && h > 0.0 && n.is_finite() && n > 0.0) {
        return NONE;
    }
    Param { mu, h, n }
}

pub(crate) fn contour(rho: f64, mu_ml: f64, z: Complex64, tol: f64) -> MlResult {
    let t = 1.0;
    // the trapezoidal error grows with the s^{-μ} behaviour at infinity;
    // ask for more digits when μ is small
    let amp = 10f64.powf(2.0 * (0.5 - mu_ml)).max(1.0);
    let mut log_epsilon = (0.25 * tol / amp).ln().max(LOG_EPS + 1.0);

    // poles s^ρ = z on the principal sheet
    let theta = z.arg();
    let kmin = (-rho / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (rho / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let radius = z.norm().powf(1.0 / rho);
    let mut poles: Vec<(f64, Complex64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(radius, (theta + 2.0 * PI * k as f64) / rho);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (p, s) in &poles {
        s_star.push(*s);
        phi.push(*p);
    }
    let j1 = s_star.len();
    let mut p = vec![(-2.0 * (rho - mu_ml + 1.0)).max(0.0)];
    p.extend(std::iter::repeat(1.0).take(j1 - 1));
    let mut q = vec![1.0; j1 - 1];
    q.push(f64::INFINITY);
    phi.push(f64::INFINITY);

    let (best, ibest, log_eps_used) = loop {
        let admissible: Vec<usize> = (0..j1)
            .filter(|&j| phi[j] < (log_epsilon - LOG_EPS) / t && phi[j] < phi[j + 1])
            .collect();
        let mut best = NONE;
        let mut ibest = 0;
        for &j in &admissible {
            let par = if j + 1 < j1 {
                param_bounded(t, phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                param_unbounded(t, phi[j], p[j], log_epsilon)
            };
            if par.n < best.n {
                best = par;
                ibest = j;
            }
        }
        if best.n <= MAX_NODES || log_epsilon >= -2.0 {
            break (best, ibest, log_epsilon);
        }
        log_epsilon += 10f64.ln();
    };

    if !best.n.is_finite() {
        return MlResult {
            value: Complex64::new(f64::NAN, f64::NAN),
            est_abs_error: f64::INFINITY,
            regime: Regime::Contour,
        };
    }

    let n = best.n as i64;
    let i = Complex64::i();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in -n..=n {
        let u = best.h * k as f64;
        let s = best.mu * (i * u + 1.0).powi(2);
        let ds = Complex64::new(-2.0 * best.mu * u, 2.0 * best.mu);
        let f = s.powf(rho - mu_ml) / (s.powf(rho) - z) * ds;
        let term = (s * t).exp() * f;
        abs_sum += term.norm();
        sum += term;
    }
    let integral = sum * best.h / (2.0 * PI * i);

    let mut residues = Complex64::new(0.0, 0.0);
    let mut residue_rounding = 0.0;
    for s in &s_star[ibest + 1..] {
        let r = s.powf(1.0 - mu_ml) * (s * t).exp() / rho;
        residue_rounding += f64::EPSILON * (4.0 + 2.0 * s.norm()) * r.norm();
        residues += r;
    }

    let mut value = integral + residues;
    // real coefficients: real argument gives a real value
    if z.im == 0.0 {
        value.im = 0.0;
    }
    let rounding = f64::EPSILON * best.h / (2.0 * PI) * abs_sum * 4.0;
    let est = amp * log_eps_used.exp() * value.norm().max(1.0) + rounding + residue_rounding;
    MlResult {
        value,
        est_abs_error: est,
        regime: Regime::Contour,
    }
}
