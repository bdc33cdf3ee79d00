//! Seeded problem family shared by the checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scalar::Forcing;
use crate::spectral::{SpectralOperator, TelegraphProblem};

pub const RHOS: [f64; 4] = [0.25, 0.5, 0.75, 0.9];
pub const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const MODES: [usize; 3] = [8, 16, 32];
pub const EPSILONS: [f64; 3] = [0.1, 0.25, 0.45];

/// One problem of the family. The operator is the Dirichlet Laplacian on
/// `(0, L)`; `L` is chosen so that mode `critical` (1-based) has `λ = α²`
/// when present.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: usize,
    pub problem: TelegraphProblem,
    /// Polynomial coefficients of each `f_k`, lowest degree first.
    pub forcing: Vec<Vec<f64>>,
    pub critical: Option<usize>,
    /// Seed of the per-fixture generator, for extending the data to more modes.
    pub data_seed: u64,
}

impl Fixture {
    /// Coefficient data for modes `1..=k`, drawn from the fixture's own
    /// stream so that the first modes agree for every `k`.
    pub fn data(&self, k: usize) -> ModeData {
        mode_data(self.data_seed, k, self.forcing.iter().any(|p| p.len() > 1))
    }

    /// The same fixture with `k` modes (more or fewer than its own).
    pub fn with_modes(&self, k: usize) -> Result<TelegraphProblem> {
        let p = &self.problem;
        let length = match p.operator.kind() {
            crate::spectral::OperatorKind::Laplacian1dDirichlet { length } => length,
            crate::spectral::OperatorKind::DiagonalExplicit => unreachable!(),
        };
        let d = self.data(k);
        TelegraphProblem::new(
            p.rho,
            p.alpha,
            p.t_end,
            SpectralOperator::laplacian_1d(length, k)?,
            d.phi0,
            d.phi1,
            d.forcing.into_iter().map(poly_forcing).collect(),
            p.epsilon,
        )
    }
}

pub struct ModeData {
    pub phi0: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
    pub forcing: Vec<Vec<f64>>,
}

fn mode_data(seed: u64, k: usize, linear: bool) -> ModeData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi0 = Vec::with_capacity(k);
    let mut phi1 = Vec::with_capacity(k);
    let mut forcing = Vec::with_capacity(k);
    for j in 1..=k {
        let kf = j as f64;
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let c0: f64 = rng.gen_range(-1.0..1.0);
        let c1: f64 = rng.gen_range(-1.0..1.0);
        // φ₀ ∈ H, φ₁ ∈ D(A^{1/2}), f ∈ D(A^ε) for every ε < 1
        phi0.push(Complex64::new(a / kf, 0.0));
        phi1.push(Complex64::new(b / (kf * kf), 0.0));
        let mut poly = vec![c0 / (kf * kf * kf)];
        if linear {
            poly.push(c1 / (kf * kf * kf));
        }
        forcing.push(poly);
    }
    ModeData {
        phi0,
        phi1,
        forcing,
    }
}

pub fn poly_forcing(c: Vec<f64>) -> Forcing {
    Forcing::Polynomial(c.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// `count` problems cycling through ρ, α and K, every other one with a
/// critical mode.
pub fn fixture_family(seed: u64, count: usize) -> Result<Vec<Fixture>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for id in 0..count {
        let rho = RHOS[id % 4];
        let alpha = ALPHAS[(id / 4) % 3];
        let k = MODES[(id / 2) % 3];
        let epsilon = EPSILONS[id % 3];
        let critical = id % 2 == 0;
        let data_seed: u64 = rng.gen();

        let (length, crit) = if critical {
            let k0 = rng.gen_range(1..=3usize);
            // (k0 π / L)² = α²
            (k0 as f64 * PI / alpha, Some(k0))
        } else {
            // keep every λ_k away from α²
            loop {
                let c: f64 = rng.gen_range(0.3..3.0) * alpha * alpha;
                let ok = (1..=2 * k).all(|j| {
                    let l = c * (j * j) as f64;
                    (l - alpha * alpha).abs() > 0.05 * alpha * alpha
                });
                if ok {
                    break (PI / c.sqrt(), None);
                }
            }
        };

        let linear = id % 3 != 0;
        let d = mode_data(data_seed, k, linear);
        let problem = TelegraphProblem::new(
            rho,
            alpha,
            1.0,
            SpectralOperator::laplacian_1d(length, k)?,
            d.phi0,
            d.phi1,
            d.forcing.iter().cloned().map(poly_forcing).collect(),
            epsilon,
        )?;
        out.push(Fixture {
            id,
            problem,
            forcing: d.forcing,
            critical: crit,
            data_seed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{classify_case, CaseTag, DEFAULT_TOL_CRIT};

    #[test]
    fn family_covers_both_cases() {
        let fam = fixture_family(7, 20).unwrap();
        assert_eq!(fam.len(), 20);
        let mut with = 0;
        let mut without = 0;
        for f in &fam {
            let p = &f.problem;
            let crit: Vec<usize> = p
                .operator
                .eigenvalues()
                .iter()
                .enumerate()
                .filter(|(_, l)| classify_case(p.alpha, **l, DEFAULT_TOL_CRIT) == CaseTag::Critical)
                .map(|(k, _)| k + 1)
                .collect();
            match f.critical {
                Some(k0) => {
                    assert_eq!(crit, vec![k0]);
                    with += 1;
                }
                None => {
                    assert!(crit.is_empty());
                    without += 1;
                }
            }
        }
        assert!(with > 0 && without > 0);
    }

    #[test]
    fn deterministic_and_extendable() {
        let a = fixture_family(3, 4).unwrap();
        let b = fixture_family(3, 4).unwrap();
        assert_eq!(a[1].problem.phi1, b[1].problem.phi1);
        let k = a[1].problem.modes();
        let ext = a[1].with_modes(2 * k).unwrap();
        assert_eq!(&ext.phi0[..k], &a[1].problem.phi0[..]);
    }
}
