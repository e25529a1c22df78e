//! Large-index asymptotics of the decoupled recurrences.
//!
//! The odd/even subsequences of a generalized eigenvector satisfy
//! perturbed constant-coefficient recurrences whose coefficients admit the
//! expansion
//!
//! ```text
//! p1(k) = a0 + a1/k + O(1/k^2),      p2(k) = b0 + b1/k + O(1/k^2),
//! ```
//!
//! with `b0 = 1`, `b1 = -1`, and `a0`, `a1` rational in the modulation
//! parameters and the spectral parameter. The limiting characteristic
//! equation `alpha^2 + a0 alpha + 1 = 0` controls the solution shapes:
//!
//! * `|a0| != 2`: two power-law solutions `u ~ alpha^k k^beta` (distinct
//!   roots). For `|a0| > 2` the moduli split and a subordinate solution
//!   exists; for `|a0| < 2` both roots sit on the unit circle and
//!   `Re beta = -1/2` exactly.
//! * `|a0| = 2`: a double root; the shapes become
//!   `u ~ alpha^k k^(-1/4) exp(+-delta sqrt(k))`, with `delta` real
//!   (one decaying subordinate solution) or purely imaginary (oscillation,
//!   no subordinate solution) depending on which side of `lambda = 1/2`
//!   the spectral parameter lies.
//!
//! At `|a0| = 2` and `lambda = 1/2` simultaneously, `delta = 0` and the
//! method degenerates; [`descriptor`] reports this as
//! [`Error::HalfLineResonance`].
//!
//! The fitting routines estimate growth laws from solved traces by linear
//! least squares (Householder QR) on the log-magnitudes of the odd
//! subsequence, and are the measurement side of the predictions above.

use num_complex::Complex;

use crate::model::ModulationParams;
use crate::recurrence::{odd_even_split, LogScaledValue, SolutionTrace};
use crate::{lit, Error, Real, Result};

/// Default tolerance for deciding `|a0| = 2` in [`descriptor`].
pub const DEFAULT_VARIANT_TOL: f64 = 1e-9;

/// Width of the ill-conditioning warning band around `|a0| = 2`.
pub const NEAR_DEGENERATE_MARGIN: f64 = 1e-6;

/// Expansion coefficients of the decoupled recurrence at a spectral
/// parameter: `p1(k) ~ a0 + a1/k`, `p2(k) ~ b0 + b1/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaCoefficients<T> {
    pub a0: T,
    pub a1: T,
    pub b0: T,
    pub b1: T,
}

/// Computes the expansion coefficients.
///
/// `a0 = (c1^2 + c2^2 - 1)/(c1 c2)` is independent of `lambda`;
/// `a1 = -a0/2 + (lambda - 1/2)/(c1 c2)` carries the spectral parameter.
pub fn ba_coefficients<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
) -> Result<BaCoefficients<T>> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if params.is_degenerate() {
        return Err(Error::DegenerateParams);
    }
    let c1 = params.c1();
    let c2 = params.c2();
    let half = lit::<T>(0.5);
    let a0 = (c1 * c1 + c2 * c2 - T::one()) / (c1 * c2);
    let a1 = -a0 * half + (lambda - half) / (c1 * c2);
    Ok(BaCoefficients {
        a0,
        a1,
        b0: T::one(),
        b1: -T::one(),
    })
}

/// Roots of `alpha^2 + a0 alpha + 1 = 0`, ordered so that
/// `|alpha_plus| >= |alpha_minus|`, with the positive-imaginary root first
/// when the pair is complex conjugate (equal moduli).
///
/// The product of the roots is 1. The large root is computed directly and
/// the small one as its reciprocal, avoiding cancellation.
pub fn characteristic_roots<T: Real>(a0: T) -> (Complex<T>, Complex<T>) {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let disc = a0 * a0 - four;
    if disc < T::zero() {
        let im = (-disc).sqrt() / two;
        let re = -a0 / two;
        (Complex::new(re, im), Complex::new(re, -im))
    } else {
        let s = disc.sqrt();
        let big = if a0 >= T::zero() {
            (-a0 - s) / two
        } else {
            (-a0 + s) / two
        };
        (Complex::new(big, T::zero()), Complex::new(T::one() / big, T::zero()))
    }
}

/// Which asymptotic shape applies at a spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Distinct characteristic roots: `u ~ alpha^k k^beta`.
    PowerLaw,
    /// Double root: `u ~ alpha^k k^(-1/4) exp(+-delta sqrt(k))`.
    ExpSqrt,
}

/// Full asymptotic description of the two canonical solutions at one
/// spectral parameter.
///
/// `coupling_*` is the limit of `u(2k)/u(2k-1)` for the corresponding
/// solution, equal to `-(c1 + alpha c2)`. `delta_*` is populated only in
/// the [`Variant::ExpSqrt`] case. `subordinate_exists` states whether one
/// solution decays strictly faster than the other (exponentially, or via a
/// real `exp(-delta sqrt(k))` envelope). `near_degenerate_roots` warns that
/// `|a0|` is within [`NEAR_DEGENERATE_MARGIN`] of 2, where the power-law
/// `beta` values are ill-conditioned and growth fits converge slowly.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticDescriptor<T> {
    pub variant: Variant,
    pub coefficients: BaCoefficients<T>,
    pub alpha_plus: Complex<T>,
    pub alpha_minus: Complex<T>,
    pub beta_plus: Complex<T>,
    pub beta_minus: Complex<T>,
    pub delta_plus: Option<Complex<T>>,
    pub delta_minus: Option<Complex<T>>,
    pub coupling_plus: Complex<T>,
    pub coupling_minus: Complex<T>,
    pub subordinate_exists: bool,
    pub near_degenerate_roots: bool,
}

/// Builds the asymptotic descriptor at `lambda`.
///
/// `tol` decides membership of the double-root case `|a0| = 2`
/// ([`DEFAULT_VARIANT_TOL`] is a reasonable default). Fails with
/// [`Error::HalfLineResonance`] when `|a0| = 2` and `lambda = 1/2` within
/// `tol` simultaneously, where both formulas degenerate.
pub fn descriptor<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    tol: T,
) -> Result<AsymptoticDescriptor<T>> {
    if !(tol >= T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidInput(
            "variant tolerance must be finite and >= 0",
        ));
    }
    let ba = ba_coefficients(params, lambda)?;
    let c1 = params.c1();
    let c2 = params.c2();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let gap = (ba.a0.abs() - two).abs();
    let near_degenerate_roots = gap < lit::<T>(NEAR_DEGENERATE_MARGIN);
    let coupling = |alpha: Complex<T>| -(alpha * c2 + c1);

    if gap <= tol {
        if (lambda - half).abs() <= tol {
            return Err(Error::HalfLineResonance);
        }
        let alpha = Complex::new(-ba.a0 / two, T::zero());
        let arg = ba.a0 * (lambda - half) / (two * c1 * c2);
        let delta_plus = Complex::new(arg, T::zero()).sqrt() * two;
        let beta = Complex::new(-lit::<T>(0.25), T::zero());
        Ok(AsymptoticDescriptor {
            variant: Variant::ExpSqrt,
            coefficients: ba,
            alpha_plus: alpha,
            alpha_minus: alpha,
            beta_plus: beta,
            beta_minus: beta,
            delta_plus: Some(delta_plus),
            delta_minus: Some(-delta_plus),
            coupling_plus: coupling(alpha),
            coupling_minus: coupling(alpha),
            subordinate_exists: arg > T::zero(),
            near_degenerate_roots,
        })
    } else {
        let (alpha_plus, alpha_minus) = characteristic_roots(ba.a0);
        let beta = |alpha: Complex<T>| {
            (alpha * ba.a1 + Complex::new(ba.b1, T::zero()))
                / (alpha * ba.a0 + Complex::new(two * ba.b0, T::zero()))
        };
        Ok(AsymptoticDescriptor {
            variant: Variant::PowerLaw,
            coefficients: ba,
            alpha_plus,
            alpha_minus,
            beta_plus: beta(alpha_plus),
            beta_minus: beta(alpha_minus),
            delta_plus: None,
            delta_minus: None,
            coupling_plus: coupling(alpha_plus),
            coupling_minus: coupling(alpha_minus),
            subordinate_exists: ba.a0.abs() > two,
            near_degenerate_roots,
        })
    }
}

/// Result of a power-law growth fit:
/// `ln |v(k)| ~ rate * k + exponent * ln k + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit<T> {
    pub rate: T,
    pub exponent: T,
    pub offset: T,
    pub points: usize,
}

/// Result of a square-root-envelope fit with the exponent pinned at
/// `-1/4`: `ln |v(k)| + ln(k)/4 ~ rate * sqrt(k) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSqrtFit<T> {
    pub rate: T,
    pub offset: T,
    pub points: usize,
}

/// Result of an adjacent-ratio fit:
/// `u(2k)/u(2k-1) ~ intercept + slope / k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingFit<T> {
    pub intercept: T,
    pub slope: T,
    pub points: usize,
}

const MIN_POWER_POINTS: usize = 64;
const MIN_EXPSQRT_POINTS: usize = 256;
const MIN_COUPLING_POINTS: usize = 16;

/// Fits `ln |v(k)| = rate k + exponent ln k + offset` over the last half of
/// the odd subsequence of a trace, skipping exact zeros.
///
/// Meaningful when a single real-root asymptotic dominates the trace
/// (forward solves in the exponential regime, minimal solutions). Needs at
/// least 64 usable points.
pub fn fit_power_growth<T: Real>(trace: &SolutionTrace<T>) -> Result<PowerFit<T>> {
    let samples = odd_log_tail(trace);
    if samples.len() < MIN_POWER_POINTS {
        return Err(Error::InsufficientData(
            "power-law fit needs at least 64 nonzero odd entries in the tail",
        ));
    }
    let rows: Vec<Vec<T>> = samples
        .iter()
        .map(|&(k, _)| vec![k, k.ln(), T::one()])
        .collect();
    let rhs: Vec<T> = samples.iter().map(|&(_, y)| y).collect();
    let sol = qr_least_squares(rows, rhs)?;
    Ok(PowerFit {
        rate: sol[0],
        exponent: sol[1],
        offset: sol[2],
        points: samples.len(),
    })
}

/// Fits `ln |v(k)| + ln(k)/4 = rate sqrt(k) + offset` over the last half of
/// the odd subsequence. Needs at least 256 usable points; the envelope
/// approaches its asymptote only like `1/sqrt(k)`, so short traces bias the
/// rate.
pub fn fit_expsqrt<T: Real>(trace: &SolutionTrace<T>) -> Result<ExpSqrtFit<T>> {
    let quarter = lit::<T>(0.25);
    let samples = odd_log_tail(trace);
    if samples.len() < MIN_EXPSQRT_POINTS {
        return Err(Error::InsufficientData(
            "exp-sqrt fit needs at least 256 nonzero odd entries in the tail",
        ));
    }
    let rows: Vec<Vec<T>> = samples
        .iter()
        .map(|&(k, _)| vec![k.sqrt(), T::one()])
        .collect();
    let rhs: Vec<T> = samples
        .iter()
        .map(|&(k, y)| y + quarter * k.ln())
        .collect();
    let sol = qr_least_squares(rows, rhs)?;
    Ok(ExpSqrtFit {
        rate: sol[0],
        offset: sol[1],
        points: samples.len(),
    })
}

/// Fits `u(2k)/u(2k-1) = intercept + slope/k` over the last half of the
/// available pairs, skipping pairs with a zero denominator. The intercept
/// estimates the coupling constant `-(c1 + alpha c2)` of the dominant
/// solution in the trace. Needs at least 16 usable pairs.
pub fn coupling_check<T: Real>(trace: &SolutionTrace<T>) -> Result<CouplingFit<T>> {
    let pairs = trace.len() / 2;
    let start = pairs / 2 + 1;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in start..=pairs {
        let den = trace.value(2 * k - 1);
        let num = trace.value(2 * k);
        if den.is_zero() {
            continue;
        }
        let ratio = LogScaledValue::ratio(num, den);
        if !ratio.is_finite() {
            continue;
        }
        rows.push(vec![T::one() / lit::<T>(k as f64), T::one()]);
        rhs.push(ratio);
    }
    if rows.len() < MIN_COUPLING_POINTS {
        return Err(Error::InsufficientData(
            "coupling fit needs at least 16 usable adjacent ratios",
        ));
    }
    let points = rows.len();
    let sol = qr_least_squares(rows, rhs)?;
    Ok(CouplingFit {
        slope: sol[0],
        intercept: sol[1],
        points,
    })
}

/// `(k, ln |v(k)|)` over the last half of the odd subsequence, zeros
/// skipped.
fn odd_log_tail<T: Real>(trace: &SolutionTrace<T>) -> Vec<(T, T)> {
    let (odd, _) = odd_even_split(trace);
    let total = odd.len();
    let start = total / 2 + 1;
    (start..=total)
        .filter(|&k| !odd[k - 1].is_zero())
        .map(|k| (lit::<T>(k as f64), odd[k - 1].ln_abs()))
        .collect()
}

/// Dense least squares by Householder QR. `rows` holds the design matrix
/// one row per sample; all rows must have the same (small) width.
fn qr_least_squares<T: Real>(mut rows: Vec<Vec<T>>, mut rhs: Vec<T>) -> Result<Vec<T>> {
    let m = rows.len();
    let n = rows[0].len();
    debug_assert!(m >= n);
    let two = lit::<T>(2.0);
    for j in 0..n {
        let mut norm2 = T::zero();
        for row in rows.iter().skip(j) {
            norm2 = norm2 + row[j] * row[j];
        }
        let norm = norm2.sqrt();
        if norm == T::zero() {
            return Err(Error::InsufficientData("rank-deficient fit design"));
        }
        let alpha = if rows[j][j] >= T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (j..m).map(|i| rows[i][j]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vnorm2 > T::zero() {
            for col in j..n {
                let mut dot = T::zero();
                for (idx, i) in (j..m).enumerate() {
                    dot = dot + v[idx] * rows[i][col];
                }
                let f = two * dot / vnorm2;
                for (idx, i) in (j..m).enumerate() {
                    rows[i][col] = rows[i][col] - f * v[idx];
                }
            }
            let mut dot = T::zero();
            for (idx, i) in (j..m).enumerate() {
                dot = dot + v[idx] * rhs[i];
            }
            let f = two * dot / vnorm2;
            for (idx, i) in (j..m).enumerate() {
                rhs[i] = rhs[i] - f * v[idx];
            }
        }
        rows[j][j] = alpha;
        for row in rows.iter_mut().take(m).skip(j + 1) {
            row[j] = T::zero();
        }
    }
    let mut x = vec![T::zero(); n];
    for j in (0..n).rev() {
        let mut s = rhs[j];
        for (col, &xc) in x.iter().enumerate().skip(j + 1) {
            s = s - rows[j][col] * xc;
        }
        x[j] = s / rows[j][j];
        if !x[j].is_finite() {
            return Err(Error::InsufficientData("rank-deficient fit design"));
        }
    }
    Ok(x)
}
