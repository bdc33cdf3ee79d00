//! Solver kit for the Cauchy problem of the fractional telegraph equation
//!
//! ```text
//! (D_t^ρ)² u + 2α D_t^ρ u + A u = f,   0 < t ≤ T,
//! lim_{t→0} D_t^ρ u = φ₀,   u(0) = φ₁,
//! ```
//!
//! with Caputo derivatives of order `ρ ∈ (0,1)` and a self-adjoint positive
//! operator `A` given through its eigen-decomposition.
//!
//! The crate is organised bottom-up:
//!
//! - [`mlfunc`]: two-parameter and Prabhakar Mittag-Leffler functions.
//! - [`fracops`]: Riemann-Liouville integrals and the L1 Caputo derivative on
//!   uniform grids, used as independent numerical oracles.
//! - [`scalar`]: closed-form solution of one spectral mode, its Caputo
//!   derivative and the auxiliary relaxation/integro problems.
//! - [`spectral`]: the operator problem, assembled mode by mode.
//! - [`verify`]: the conformance battery that certifies every estimate the
//!   solution theory relies on.

pub mod error;
pub mod fracops;
pub mod mlfunc;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use fracops::{SampledTrajectory, TimeGrid};
pub use mlfunc::{MlQuery, MlResult, Regime};
pub use scalar::{CaseTag, Forcing, QuadratureSpec, ScalarProblem, ScalarSolution};
pub use spectral::{
    OperatorKind, SobolevNorm, SolutionField, SolveOptions, SpectralOperator, TelegraphProblem,
};
pub use verify::{CheckReport, CheckStatus, SuiteConfig};

pub use num_complex::Complex64;
