use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Mittag-Leffler evaluation did not reach tolerance {tol:e} (best estimate {achieved:e}) for rho={rho}, mu={mu}, z={z_re}{z_im:+}i")]
    NonConvergence {
        rho: f64,
        mu: f64,
        z_re: f64,
        z_im: f64,
        tol: f64,
        achieved: f64,
    },

    #[error("argument z={z_re}{z_im:+}i lies outside the sector |arg z| > rho*pi/2 (rho={rho})")]
    SectorViolation { rho: f64, z_re: f64, z_im: f64 },

    #[error("invalid fractional order {order}: {reason}")]
    InvalidOrder { order: f64, reason: &'static str },

    #[error("grid with {n} intervals is too coarse (need at least {min})")]
    GridTooCoarse { n: usize, min: usize },

    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("solver case mismatch: {0}")]
    CaseMismatch(String),

    #[error("evaluation time t={t} outside (0, {t_end}]")]
    EvaluationOutOfDomain { t: f64, t_end: f64 },

    #[error("operation requires a 1D Dirichlet Laplacian operator")]
    WrongOperatorKind,

    #[error("sweep for `{check}` needs {requested} evaluations, budget is {budget}")]
    SweepBudgetExceeded {
        check: String,
        requested: usize,
        budget: usize,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("mode {index}: {source}")]
    Mode {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("suite configuration error: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn in_mode(self, index: usize) -> Self {
        Error::Mode {
            index,
            source: Box::new(self),
        }
    }
}
