//! Spectral analysis of semi-infinite Jacobi matrices with diagonal `q(n) = n`
//! and 2-periodically modulated weights `w(n) = c(n) * n`, where `c(n)` equals
//! `c1` for odd `n` and `c2` for even `n`.
//!
//! The pair `(c1, c2)` controls a phase transition in the character of the
//! spectrum. The crate provides:
//!
//! - [`model`]: matrix entries, the comparison discriminant, band geometry and
//!   parameter-plane classification;
//! - [`recurrence`]: log-scaled forward and backward (minimal-solution)
//!   solvers for the three-term recurrence, transfer steps, and the decoupled
//!   odd/even second-order coefficients;
//! - [`asymptotics`]: characteristic roots, power-law / exp-sqrt growth
//!   descriptors, and least-squares growth fits on solution traces;
//! - [`eigensolve`]: Sturm-count bisection on finite truncations;
//! - [`degenerate`]: closed-form block spectra when one weight coefficient
//!   vanishes;
//! - [`analysis`]: quadratic-form tools, explicit negative-direction witness
//!   vectors, eigenvalue-count bounds and semiboundedness probes.
//!
//! All numerics are generic over the scalar type via [`Real`] (`f32` or
//! `f64`); the crate root exports `f64` aliases for the common types. The
//! documented tolerances assume `f64`.

pub mod analysis;
pub mod asymptotics;
pub mod degenerate;
pub mod eigensolve;
pub mod model;
pub mod recurrence;

use std::fmt;

use num_traits::float::Float;
use num_traits::FromPrimitive;

/// Scalar type for every numeric routine in this crate.
///
/// Implemented by `f32` and `f64`. The extra bounds beyond [`Float`] are what
/// the solvers actually use: literal conversion from `f64`, formatting in
/// errors and reports, and thread-safe sharing of parameter structs.
pub trait Real: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// Converts an `f64` literal into the working scalar type.
///
/// Infallible for the finite literals used internally; `f32` rounds.
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite literal representable in scalar type")
}

/// Errors shared across the crate's modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A parameter or argument was NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// `c1 * c2 == 0`: the operator splits into finite blocks and the
    /// requested quantity (discriminant, decoupling, ...) is undefined.
    #[error("degenerate parameters: c1 * c2 == 0")]
    DegenerateParams,

    /// A recurrence step would divide by a vanishing weight.
    #[error("vanishing weight at index {index}")]
    DegenerateWeight { index: usize },

    /// Backward recursion did not stabilise before the start-index cap.
    /// Signals the absence of a minimal solution, e.g. inside the
    /// absolutely continuous spectrum.
    #[error("minimal solution did not converge (start index cap {cap})")]
    NoConvergence { cap: usize },

    /// The decoupled coefficients have a pole: the spectral parameter hits
    /// a diagonal entry appearing in a denominator.
    #[error("decoupled coefficient pole: lambda equals diagonal entry {index}")]
    PoleAtDiagonal { index: usize },

    /// On a critical line with `lambda = 1/2` both characteristic roots
    /// coalesce and the exp-sqrt correction degenerates; no asymptotic
    /// descriptor exists at this point.
    #[error("excluded point: double characteristic root with lambda = 1/2")]
    HalfLineResonance,

    /// A fit or ratio estimate was asked for on a trace that is too short
    /// or identically zero.
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),

    /// A block or eigenvalue index outside the defined range.
    #[error("index {index} out of range: {reason}")]
    IndexOutOfRange { index: usize, reason: &'static str },

    /// An analysis routine was called for parameters outside the spectral
    /// region where it is meaningful.
    #[error("wrong parameter region: {0}")]
    WrongRegion(&'static str),

    /// An eigenvalue count changed when the truncation size was doubled.
    #[error("eigenvalue count unstable: {count_n} at size {n}, {count_2n} at size {two_n}")]
    UnstableCount {
        n: usize,
        two_n: usize,
        count_n: usize,
        count_2n: usize,
    },

    /// The classification tolerance covers both critical lines at once;
    /// only possible when the tolerance is large and `c1 * c2` is near 0.
    #[error("ambiguous classification: tolerance covers both critical lines")]
    AmbiguousClassification,

    /// A precondition on a plain argument (range, ordering) was violated.
    #[error("invalid argument: {0}")]
    InvalidInput(&'static str),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// `f64` modulation parameters.
pub type Params64 = model::ModulationParams<f64>;
/// `f32` modulation parameters.
pub type Params32 = model::ModulationParams<f32>;
/// `f64` band geometry.
pub type Bands64 = model::BandStructure<f64>;
/// `f64` classification record.
pub type Region64 = model::SpectralRegion<f64>;
/// `f64` solution trace.
pub type Trace64 = recurrence::SolutionTrace<f64>;
/// `f64` asymptotic descriptor.
pub type Descriptor64 = asymptotics::AsymptoticDescriptor<f64>;
/// `f64` finite truncation.
pub type Truncation64 = eigensolve::Truncation<f64>;
