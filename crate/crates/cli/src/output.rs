//! CSV and JSON writers. Numbers are written in shortest round-trip form.

use std::fmt::Write as _;

use fractel::spectral::{norm_tau, NormSample, PhysicalField, SolutionField};
use fractel::{Complex64, TelegraphProblem};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Per-time coefficients of `u` and `D^ρu`. At `t = 0` these are the data
/// `φ₁` and `φ₀`.
pub struct Trajectory {
    pub t: Vec<f64>,
    pub u: Vec<Vec<Complex64>>,
    pub du: Vec<Vec<Complex64>>,
    pub norms: Vec<NormSample>,
}

pub fn trajectory(problem: &TelegraphProblem, field: &SolutionField, times: &[f64]) -> Result<Trajectory, CliError> {
    let eig = problem.operator.eigenvalues();
    let mut out = Trajectory {
        t: times.to_vec(),
        u: Vec::new(),
        du: Vec::new(),
        norms: Vec::new(),
    };
    for &t in times {
        let (u, du) = if t == 0.0 {
            (problem.phi1.clone(), problem.phi0.clone())
        } else {
            (field.u(t).map_err(solver)?, field.du(t).map_err(solver)?)
        };
        let d2u: Vec<Complex64> = (0..u.len())
            .map(|k| problem.f[k].eval(t) - du[k] * (2.0 * problem.alpha) - u[k] * eig[k])
            .collect();
        out.norms.push(NormSample {
            t,
            u: norm_tau(&u, eig, 0.0).value,
            au: norm_tau(&u, eig, 1.0).value,
            du: norm_tau(&du, eig, 0.0).value,
            d2u: norm_tau(&d2u, eig, 0.0).value,
        });
        out.u.push(u);
        out.du.push(du);
    }
    Ok(out)
}

fn solver(e: fractel::Error) -> CliError {
    CliError::Solver(e.to_string())
}

/// `t, T1_re, T1_im, …, norm_u, norm_Au, norm_Du`.
pub fn solution_csv(tr: &Trajectory) -> String {
    let k = tr.u.first().map_or(0, Vec::len);
    let mut s = String::from("t");
    for j in 1..=k {
        let _ = write!(s, ",T{j}_re,T{j}_im");
    }
    s.push_str(",norm_u,norm_Au,norm_Du\n");
    for (i, t) in tr.t.iter().enumerate() {
        s.push_str(&num(*t));
        for c in &tr.u[i] {
            let _ = write!(s, ",{},{}", num(c.re), num(c.im));
        }
        let n = &tr.norms[i];
        let _ = writeln!(s, ",{},{},{}", num(n.u), num(n.au), num(n.du));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub rho: f64,
    pub alpha: f64,
    pub t_end: f64,
    pub modes: usize,
    /// 1-based.
    pub critical_modes: Vec<usize>,
    pub samples: Vec<NormSample>,
}

pub fn norms_json(problem: &TelegraphProblem, field: &SolutionField, tr: &Trajectory) -> String {
    let r = NormsReport {
        rho: problem.rho,
        alpha: problem.alpha,
        t_end: problem.t_end,
        modes: problem.modes(),
        critical_modes: field.critical_modes(),
        samples: tr.norms.clone(),
    };
    let mut s = serde_json::to_string_pretty(&r).expect("norms serialize");
    s.push('\n');
    s
}

/// Long format `x,t,u`; an extra `u_im` column appears for complex fields.
pub fn field_csv(f: &PhysicalField) -> String {
    let complex = f.values.iter().flatten().any(|v| v.im != 0.0);
    let mut s = String::from(if complex { "x,t,u_re,u_im\n" } else { "x,t,u\n" });
    for (j, t) in f.t.iter().enumerate() {
        for (i, x) in f.x.iter().enumerate() {
            let v = f.values[j][i];
            if complex {
                let _ = writeln!(s, "{},{},{},{}", num(*x), num(*t), num(v.re), num(v.im));
            } else {
                let _ = writeln!(s, "{},{},{}", num(*x), num(*t), num(v.re));
            }
        }
    }
    s
}
