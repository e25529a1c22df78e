//! Eigenvalue counting and bracketing for finite truncations.
//!
//! The `n x n` leading principal submatrix of the operator is an
//! unreduced symmetric tridiagonal matrix (for non-degenerate parameters),
//! so all standard Sturm-sequence machinery applies: the number of
//! negative pivots of the `L D L^T` factorization of `J - x I` equals the
//! number of eigenvalues strictly below `x`. Everything else here is
//! bisection on top of that count, which is deterministic, monotone, and
//! immune to clustering.

use crate::model::{entries, ModulationParams};
use crate::{Error, Real, Result};

/// Default bracket width for eigenvalue bisection.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Bisection iteration cap; reached only when `tol` underflows the
/// interval's floating-point resolution.
const MAX_BISECT: usize = 200;

/// A finite truncation: `diag[i]` holds the diagonal entry of row `i + 1`,
/// `offdiag[i]` the weight coupling rows `i + 1` and `i + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation<T> {
    pub diag: Vec<T>,
    pub offdiag: Vec<T>,
}

impl<T: Real> Truncation<T> {
    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// Builds the `n x n` truncation. Degenerate parameters are allowed; the
/// resulting matrix is then block diagonal.
pub fn truncation<T: Real>(params: &ModulationParams<T>, n: usize) -> Result<Truncation<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation needs n >= 1"));
    }
    let diag = (1..=n).map(|i| entries(params, i).q).collect();
    let offdiag = (1..n).map(|i| entries(params, i).w).collect();
    Ok(Truncation { diag, offdiag })
}

/// Number of eigenvalues strictly below `x`.
///
/// Zero pivots are replaced by a tiny guard of the same sign as the
/// stored zero, so an eigenvalue sitting exactly at `x` is not counted.
pub fn count_below<T: Real>(trunc: &Truncation<T>, x: T) -> usize {
    assert!(x.is_finite(), "count_below needs a finite threshold");
    let mut wmax2 = T::one();
    for &w in &trunc.offdiag {
        wmax2 = wmax2.max(w * w);
    }
    let pivmin = T::min_positive_value() * wmax2;
    let guard = |d: T| {
        if d == T::zero() {
            if d.is_sign_negative() {
                -pivmin
            } else {
                pivmin
            }
        } else {
            d
        }
    };
    let mut count = 0;
    let mut d = guard(trunc.diag[0] - x);
    if d < T::zero() {
        count += 1;
    }
    for i in 1..trunc.diag.len() {
        let w = trunc.offdiag[i - 1];
        d = guard((trunc.diag[i] - x) - w * w / d);
        if d < T::zero() {
            count += 1;
        }
    }
    count
}

/// An eigenvalue located by bisection: the midpoint of the final bracket
/// and the bracket's width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketedEigenvalue<T> {
    pub value: T,
    pub width: T,
}

/// All eigenvalues in `[lo, hi)`, each bisected independently until its
/// bracket is narrower than `tol` (or [`MAX_BISECT`] splits). Results come
/// out in ascending order.
pub fn eigenvalues_in<T: Real>(
    trunc: &Truncation<T>,
    lo: T,
    hi: T,
    tol: T,
) -> Result<Vec<BracketedEigenvalue<T>>> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonFinite("interval endpoint"));
    }
    if !(lo < hi) {
        return Err(Error::InvalidInput("eigenvalue interval must satisfy lo < hi"));
    }
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidInput("bisection tolerance must be > 0"));
    }
    let base = count_below(trunc, lo);
    let top = count_below(trunc, hi);
    let two = T::one() + T::one();
    Ok((base..top)
        .map(|j| {
            // invariant: count(a) <= j < count(b)
            let mut a = lo;
            let mut b = hi;
            for _ in 0..MAX_BISECT {
                if b - a <= tol {
                    break;
                }
                let mid = (a + b) / two;
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(trunc, mid) <= j {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            BracketedEigenvalue {
                value: (a + b) / two,
                width: b - a,
            }
        })
        .collect())
}

/// The smallest eigenvalue, bisected to `tol`.
///
/// Brackets by doubling: downward from -1 until no eigenvalue lies below,
/// upward from +1 until at least one does.
pub fn smallest_eigenvalue<T: Real>(trunc: &Truncation<T>, tol: T) -> Result<T> {
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidInput("bisection tolerance must be > 0"));
    }
    let two = T::one() + T::one();
    let mut lo = -T::one();
    while count_below(trunc, lo) > 0 {
        lo = lo * two;
    }
    let mut hi = T::one();
    while count_below(trunc, hi) == 0 {
        hi = hi * two;
    }
    for _ in 0..MAX_BISECT {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(trunc, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}
