//! Error type shared across the crate.
//!
//! Numerical routines here fail loudly instead of guessing: a degenerate
//! ground state that an offset cannot resolve, a step budget that cannot
//! satisfy the accuracy floor, or a non-finite objective all surface as
//! explicit variants rather than NaN-laden results.

use core::fmt;

/// Everything that can go wrong when building operators, resolving ground
/// states, propagating, or optimizing.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Chains need at least 3 spins; with 2 the tunable 1-N link would
    /// coincide with the single nearest-neighbour bond.
    ChainTooSmall { n_spins: usize },
    /// Dense matrices only: 2^N x 2^N storage caps the chain length.
    ChainTooLarge { n_spins: usize, max: usize },
    /// The degeneracy offset must sit in (0, 1e-4].
    OffsetOutOfRange { offset: f64 },
    /// A numeric model parameter (coupling, field) was NaN or infinite.
    NonFiniteParameter,
    /// A sweep grid needs at least two points.
    GridTooSmall { points: usize },
    /// A Pauli string listed the same site twice.
    DuplicateSite { site: usize },
    /// A Pauli string addressed a site outside 1..=N.
    SiteOutOfRange { site: usize, n_spins: usize },
    /// Diagonalization requires a Hermitian input matrix.
    NonHermitian { max_asym: f64 },
    /// The ground level is still degenerate after re-diagonalizing at the
    /// offset coupling; the caller must decide, we do not guess a state.
    DegeneracyPersists { gap: f64, tolerance: f64 },
    /// State vectors fed to the propagator must have unit norm.
    StateNotNormalized { norm: f64 },
    /// Control evaluations outside [0, T] are undefined.
    TimeOutOfRange { t: f64, horizon: f64 },
    /// Composite Simpson needs an odd node count of at least 3.
    BadNodeCount { nodes: usize },
    /// An integrand produced a non-finite value.
    NonFiniteIntegrand { t: f64 },
    /// The accuracy floor asks for more steps than the hard cap allows.
    StepBudgetExceeded { required: usize, cap: usize },
    /// The objective was non-finite at the starting point.
    NonFiniteObjective,
    /// The interaction-picture estimate is only valid on the G(T) = 0
    /// branch of the control family.
    GaugeNotClosed { g_total: f64 },
    /// Control parameters must be finite and the horizon positive.
    BadControl,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ChainTooSmall { n_spins } => {
                write!(f, "chain of {n_spins} spins is too short, need at least 3")
            }
            Error::ChainTooLarge { n_spins, max } => {
                write!(f, "chain of {n_spins} spins exceeds the dense-matrix cap of {max}")
            }
            Error::OffsetOutOfRange { offset } => {
                write!(f, "degeneracy offset {offset:e} outside (0, 1e-4]")
            }
            Error::NonFiniteParameter => write!(f, "model parameter must be finite"),
            Error::GridTooSmall { points } => {
                write!(f, "sweep grid needs at least 2 points, got {points}")
            }
            Error::DuplicateSite { site } => write!(f, "site {site} listed twice in Pauli string"),
            Error::SiteOutOfRange { site, n_spins } => {
                write!(f, "site {site} outside 1..={n_spins}")
            }
            Error::NonHermitian { max_asym } => {
                write!(f, "matrix is not Hermitian, max |H - H^dag| entry {max_asym:e}")
            }
            Error::DegeneracyPersists { gap, tolerance } => write!(
                f,
                "ground level still degenerate at offset coupling (gap {gap:e} < tolerance {tolerance:e})"
            ),
            Error::StateNotNormalized { norm } => {
                write!(f, "state norm {norm} differs from 1 beyond tolerance")
            }
            Error::TimeOutOfRange { t, horizon } => {
                write!(f, "time {t} outside control horizon [0, {horizon}]")
            }
            Error::BadNodeCount { nodes } => {
                write!(f, "Simpson rule needs an odd node count >= 3, got {nodes}")
            }
            Error::NonFiniteIntegrand { t } => {
                write!(f, "integrand non-finite at t = {t}")
            }
            Error::StepBudgetExceeded { required, cap } => {
                write!(f, "accuracy floor needs {required} steps, above the cap of {cap}")
            }
            Error::NonFiniteObjective => write!(f, "objective non-finite at starting point"),
            Error::GaugeNotClosed { g_total } => {
                write!(f, "control antiderivative G(T) = {g_total:e} is not zero")
            }
            Error::BadControl => write!(f, "control amplitudes must be finite and horizon positive"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
