//! Numerical Laplace inversion (fixed Talbot contour), used as an oracle
//! for the closed-form modal solutions. It works directly on the transformed
//! equation
//!
//! ```text
//! ŷ(s) = [ĝ(s) + (s^{2ρ-1} + 2α s^{ρ-1}) φ₁ + s^{ρ-1} φ₀] / (s^{2ρ} + 2α s^ρ + λ),
//! ```
//!
//! and shares no code with the Mittag-Leffler evaluator. Poles of the
//! principal sheet are split off and inverted exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::mlfunc::gamma::gamma;

const NODES: usize = 24;

/// Which function of the mode to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Y,
    /// `D^ρ y`, with image `s^ρ ŷ - s^{ρ-1} φ₁`.
    DyRho,
}

/// Mode with real data and polynomial forcing `Σ c_m t^m`.
#[derive(Debug, Clone)]
pub struct LaplaceMode {
    pub rho: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub poly: Vec<f64>,
}

impl LaplaceMode {
    fn numerator(&self, s: Complex64) -> Complex64 {
        let rho = self.rho;
        let sr1 = s.powf(rho - 1.0);
        let mut g = Complex64::new(0.0, 0.0);
        for (m, c) in self.poly.iter().enumerate() {
            g += *c * gamma(m as f64 + 1.0) / s.powi(m as i32 + 1);
        }
        g + (s.powf(2.0 * rho - 1.0) + sr1 * (2.0 * self.alpha)) * self.phi1 + sr1 * self.phi0
    }

    fn denominator(&self, s: Complex64) -> Complex64 {
        let sr = s.powf(self.rho);
        sr * sr + sr * (2.0 * self.alpha) + self.lambda
    }

    fn image(&self, s: Complex64, target: Target) -> Complex64 {
        let y = self.numerator(s) / self.denominator(s);
        match target {
            Target::Y => y,
            Target::DyRho => s.powf(self.rho) * y - s.powf(self.rho - 1.0) * self.phi1,
        }
    }

    /// Simple poles `s = w^{1/ρ}` with `w² + 2αw + λ = 0` on the principal sheet.
    fn poles(&self) -> Vec<Complex64> {
        let d = Complex64::new(self.alpha * self.alpha - self.lambda, 0.0).sqrt();
        if d.norm() == 0.0 {
            // double root at w = -α, never on the principal sheet for ρ < 1
            return Vec::new();
        }
        [-self.alpha + d, -self.alpha - d]
            .into_iter()
            .filter(|w| w.arg().abs() < self.rho * PI)
            .map(|w| Complex64::from_polar(w.norm().powf(1.0 / self.rho), w.arg() / self.rho))
            .collect()
    }

    fn residue(&self, s: Complex64, t: f64, target: Target) -> Complex64 {
        let rho = self.rho;
        let dp = s.powf(2.0 * rho - 1.0) * (2.0 * rho) + s.powf(rho - 1.0) * (2.0 * self.alpha * rho);
        let n = match target {
            Target::Y => self.numerator(s),
            Target::DyRho => self.numerator(s) * s.powf(rho),
        };
        n * (s * t).exp() / dp
    }

    /// Inverse transform at `t > 0`. The pole parts `c/(s-p)` are removed
    /// from the image before the contour sum and added back exactly, so
    /// poles close to the contour do not spoil the quadrature.
    pub fn invert(&self, t: f64, target: Target) -> f64 {
        let poles: Vec<(Complex64, Complex64)> = self
            .poles()
            .into_iter()
            .map(|p| (p, self.residue(p, 0.0, target)))
            .collect();
        let regular = |s: Complex64| {
            poles
                .iter()
                .fold(self.image(s, target), |acc, (p, c)| acc - c / (s - p))
        };
        let m = NODES as f64;
        let r = 2.0 * m / (5.0 * t);
        let mut acc = 0.5 * (regular(Complex64::new(r, 0.0)) * (r * t).exp()).re;
        for k in 1..NODES {
            let th = k as f64 * PI / m;
            let cot = th.cos() / th.sin();
            let s = Complex64::new(r * th * cot, r * th);
            let sigma = th + (th * cot - 1.0) * cot;
            acc += ((s * t).exp() * regular(s) * Complex64::new(1.0, sigma)).re;
        }
        let value = acc * r / m;
        value + poles.iter().map(|(p, c)| (c * (p * t).exp()).re).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlfunc::ml_value;

    #[test]
    fn relaxation_like_mode() {
        // α² = λ + small: compare against the two-exponential closed form
        // through E_{ρ,1} evaluated by the series/contour evaluator
        let m = LaplaceMode {
            rho: 0.5,
            alpha: 1.0,
            lambda: 0.75,
            phi0: 0.0,
            phi1: 1.0,
            poly: vec![],
        };
        let d = 0.5;
        let t: f64 = 0.7;
        let ep = ml_value(0.5, 1.0, Complex64::new((-1.0 + d) * t.sqrt(), 0.0)).unwrap().re;
        let em = ml_value(0.5, 1.0, Complex64::new((-1.0 - d) * t.sqrt(), 0.0)).unwrap().re;
        let exact = ((1.0 + d) * ep - (1.0 - d) * em) / (2.0 * d);
        assert!((m.invert(t, Target::Y) - exact).abs() < 1e-9);
    }

    #[test]
    fn pole_residues_are_added() {
        // ρ = 0.9 and λ > α² put a conjugate pole pair on the principal sheet
        let m = LaplaceMode {
            rho: 0.9,
            alpha: 0.5,
            lambda: 30.0,
            phi0: 0.0,
            phi1: 1.0,
            poly: vec![],
        };
        assert_eq!(m.poles().len(), 2);
        let a = Complex64::new(0.5, 0.0);
        let d = Complex64::new(0.25 - 30.0, 0.0).sqrt();
        for t in [0.3f64, 1.0] {
            let tr = t.powf(0.9);
            let ep = ml_value(0.9, 1.0, (-a + d) * tr).unwrap();
            let em = ml_value(0.9, 1.0, (-a - d) * tr).unwrap();
            let exact = (((a + d) * ep - (a - d) * em) / (d * 2.0)).re;
            assert!((m.invert(t, Target::Y) - exact).abs() < 1e-8, "t={t}");
        }
    }
}
