//! Convolutions `∫₀ᵗ k(t-τ) g(τ) dτ` with Prabhakar kernels
//! `k(x) = x^{β-1} E^γ_{ρ,β}(r x^ρ)`.
//!
//! Polynomial forcing is integrated in closed form,
//!
//! ```text
//! ∫₀ᵗ k(t-τ) τ^m dτ = m! t^{β+m} E^γ_{ρ,β+m+1}(r t^ρ).
//! ```
//!
//! Otherwise `g` is replaced by its piecewise-linear interpolant and each
//! panel is integrated exactly through the kernel moments
//! `K₁(x) = x^β E^γ_{ρ,β+1}(r x^ρ)` and `K₂(x) = x^{β+1} E^γ_{ρ,β+2}(r x^ρ)`.

use num_complex::Complex64;

use super::Forcing;
use crate::error::{Error, Result};
use crate::fracops::{SampledTrajectory, TimeGrid};
use crate::mlfunc::gamma::gamma;
use crate::mlfunc::{ml2_value, ml_value, rgamma};

/// `E^γ_{ρ,μ}(z)` for γ ∈ {1, 2}.
pub(crate) fn prabhakar(gamma: u8, rho: f64, mu: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Ok(Complex64::new(rgamma(mu), 0.0));
    }
    match gamma {
        1 => ml_value(rho, mu, z),
        _ => ml2_value(rho, mu, z),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Kernel {
    pub rho: f64,
    pub beta: f64,
    pub gamma: u8,
    pub r: Complex64,
}

impl Kernel {
    /// `x^{β+j-1} E^γ_{ρ,β+j}(r x^ρ)`, the j-fold primitive of the kernel.
    fn primitive(&self, j: usize, x: f64) -> Result<Complex64> {
        if x <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mu = self.beta + j as f64;
        let e = prabhakar(self.gamma, self.rho, mu, self.r * x.powf(self.rho))?;
        Ok(e * x.powf(mu - 1.0))
    }
}

#[derive(Debug, Clone)]
enum Data {
    Zero,
    Polynomial(Vec<Complex64>),
    Grid {
        samples: SampledTrajectory,
        /// `K₁(jh)`, `K₂(jh)`
        k1: Vec<Complex64>,
        k2: Vec<Complex64>,
    },
}

/// A convolution evaluator bound to one kernel and one forcing.
#[derive(Debug, Clone)]
pub(crate) struct Convolution {
    kernel: Kernel,
    data: Data,
}

impl Convolution {
    pub fn new(kernel: Kernel, forcing: &Forcing, grid: TimeGrid) -> Result<Self> {
        let data = match forcing {
            Forcing::Zero => Data::Zero,
            Forcing::Polynomial(c) if c.iter().all(|v| v.norm() == 0.0) => Data::Zero,
            Forcing::Polynomial(c) => Data::Polynomial(c.clone()),
            Forcing::Sampled(s) => Self::grid_data(kernel, s.clone())?,
            Forcing::Callable(f) => {
                let s = SampledTrajectory::from_fn(grid, |t| f(t));
                if s.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::QuadratureFailure(
                        "forcing returned a non-finite value".into(),
                    ));
                }
                Self::grid_data(kernel, s)?
            }
        };
        Ok(Self { kernel, data })
    }

    fn grid_data(kernel: Kernel, samples: SampledTrajectory) -> Result<Data> {
        let g = samples.grid;
        let mut k1 = Vec::with_capacity(g.n() + 1);
        let mut k2 = Vec::with_capacity(g.n() + 1);
        for j in 0..=g.n() {
            let x = j as f64 * g.h();
            k1.push(kernel.primitive(1, x)?);
            k2.push(kernel.primitive(2, x)?);
        }
        Ok(Data::Grid { samples, k1, k2 })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.data, Data::Zero)
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        if t <= 0.0 {
            return Ok(zero);
        }
        match &self.data {
            Data::Zero => Ok(zero),
            Data::Polynomial(c) => {
                let k = self.kernel;
                let mut acc = zero;
                for (m, cm) in c.iter().enumerate() {
                    if cm.norm() == 0.0 {
                        continue;
                    }
                    let mu = k.beta + m as f64 + 1.0;
                    let e = prabhakar(k.gamma, k.rho, mu, k.r * t.powf(k.rho))?;
                    acc += cm * e * (gamma(m as f64 + 1.0) * t.powf(mu - 1.0));
                }
                Ok(acc)
            }
            Data::Grid { samples, k1, k2 } => self.eval_grid(samples, k1, k2, t),
        }
    }

    fn eval_grid(
        &self,
        s: &SampledTrajectory,
        k1: &[Complex64],
        k2: &[Complex64],
        t: f64,
    ) -> Result<Complex64> {
        let g = s.grid;
        let h = g.h();
        if t > g.t_end() * (1.0 + 1e-12) {
            return Err(Error::EvaluationOutOfDomain { t, t_end: g.t_end() });
        }
        let u = &s.values;
        let x = t / h;
        let m = x.round();
        let mut acc = Complex64::new(0.0, 0.0);

        if (x - m).abs() <= 1e-9 * x.max(1.0) {
            // node: panels [jh, (j+1)h] in η = t - τ reuse the cached moments
            let n = m as usize;
            for j in 0..n {
                let a = u[n - j];
                let b = (u[n - j - 1] - u[n - j]) / h;
                acc += a * (k1[j + 1] - k1[j]) + b * (k1[j + 1] * h - (k2[j + 1] - k2[j]));
            }
            return Ok(acc);
        }

        // off-node: breakpoints η = t - τ_i, i = n..0, with τ_n < t < τ_{n+1}
        let n = x.floor() as usize;
        let delta = t - n as f64 * h;
        let k = &self.kernel;
        let gt = s.interpolate(t);
        let mut prev_eta = 0.0;
        let mut prev_k1 = Complex64::new(0.0, 0.0);
        let mut prev_k2 = Complex64::new(0.0, 0.0);
        let mut prev_g = gt;
        for i in (0..=n).rev() {
            let eta = if i == 0 { t } else { delta + (n - i) as f64 * h };
            let c1 = k.primitive(1, eta)?;
            let c2 = k.primitive(2, eta)?;
            let width = eta - prev_eta;
            let slope = (u[i] - prev_g) / width;
            acc += prev_g * (c1 - prev_k1) + slope * (c1 * width - (c2 - prev_k2));
            prev_eta = eta;
            prev_k1 = c1;
            prev_k2 = c2;
            prev_g = u[i];
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn callable_linear_forcing_matches_closed_form() {
        let kernel = Kernel {
            rho: 0.6,
            beta: 0.6,
            gamma: 1,
            r: c(-1.3),
        };
        let grid = TimeGrid::new(1.0, 40).unwrap();
        let poly = Convolution::new(kernel, &Forcing::Polynomial(vec![c(0.5), c(2.0)]), grid).unwrap();
        let call = Convolution::new(
            kernel,
            &Forcing::Callable(Arc::new(|t| Complex64::new(0.5 + 2.0 * t, 0.0))),
            grid,
        )
        .unwrap();
        for &t in &[0.025, 0.3, 0.5, 0.777, 1.0] {
            let a = poly.eval(t).unwrap();
            let b = call.eval(t).unwrap();
            assert!((a - b).norm() < 1e-12, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn prabhakar_kernel_linear_forcing() {
        let kernel = Kernel {
            rho: 0.5,
            beta: 1.0,
            gamma: 2,
            r: c(-1.0),
        };
        let grid = TimeGrid::new(2.0, 16).unwrap();
        let poly = Convolution::new(kernel, &Forcing::Polynomial(vec![c(1.0), c(-0.25)]), grid).unwrap();
        let call = Convolution::new(
            kernel,
            &Forcing::Callable(Arc::new(|t| Complex64::new(1.0 - 0.25 * t, 0.0))),
            grid,
        )
        .unwrap();
        for &t in &[0.1, 1.0, 1.33, 2.0] {
            assert!((poly.eval(t).unwrap() - call.eval(t).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_kernel_argument_gives_power_integral() {
        // r = 0: J^β of the constant 1
        let kernel = Kernel {
            rho: 0.4,
            beta: 0.4,
            gamma: 1,
            r: c(0.0),
        };
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let conv = Convolution::new(kernel, &Forcing::Polynomial(vec![c(1.0)]), grid).unwrap();
        let t: f64 = 0.7;
        assert!((conv.eval(t).unwrap().re - t.powf(0.4) / gamma(1.4)).abs() < 1e-14);
    }
}
