//! Matrix entries, comparison discriminant, band geometry and the
//! parameter-plane classification.
//!
//! The operator acts on square-summable sequences as
//!
//! ```text
//! (J u)(n) = w(n-1) u(n-1) + n u(n) + w(n) u(n+1),      w(n) = c(n) * n,
//! ```
//!
//! with `c(n) = c1` for odd `n`, `c2` for even `n`. Dividing row `n` by `n`
//! and letting `n -> inf` yields a 2-periodic comparison operator whose
//! discriminant
//!
//! ```text
//! d(lambda) = ((lambda - 1)^2 - c1^2 - c2^2) / (c1 * c2)
//! ```
//!
//! controls everything: `|d| <= 2` cuts out two bands
//! `[1 - s, 1 - r]` and `[1 + r, 1 + s]` with `s = |c1| + |c2|`,
//! `r = ||c1| - |c2||`, and the position of `d(0)` relative to `+-2`
//! classifies the spectrum of the full operator:
//!
//! - `|d(0)| < 2`: purely absolutely continuous spectrum covering the line;
//! - `r = 1` (equivalently `d(0) = -2` up to signs): ac spectrum on
//!   `(-inf, 1/2)`, discrete spectrum on `(1/2, +inf)`;
//! - `s = 1` (equivalently `d(0) = +2` up to signs): the mirror image,
//!   ac on `(1/2, +inf)`, discrete on `(-inf, 1/2)`;
//! - `|d(0)| > 2`: discrete spectrum;
//! - `c1 * c2 = 0`: the matrix splits into finite blocks (see
//!   [`crate::degenerate`]).
//!
//! Everything here is elementary arithmetic; the point of the module is to
//! pin down orientation conventions (which band edge is which, which side of
//! `1/2` carries point spectrum) once, so the heavier modules can rely on
//! them.

use crate::{lit, Error, Real, Result};

/// The 2-periodic weight modulation pair `(c1, c2)`.
///
/// `c1` multiplies odd-index weights, `c2` even-index weights. Both entries
/// must be finite; zero entries are allowed (the degenerate, block-diagonal
/// case) and are detected exactly, never by tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams<T> {
    c1: T,
    c2: T,
}

impl<T: Real> ModulationParams<T> {
    /// Validates finiteness and wraps the pair.
    pub fn new(c1: T, c2: T) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::NonFinite("modulation parameters"));
        }
        Ok(Self { c1, c2 })
    }

    /// Odd-index modulation coefficient.
    pub fn c1(&self) -> T {
        self.c1
    }

    /// Even-index modulation coefficient.
    pub fn c2(&self) -> T {
        self.c2
    }

    /// Modulation coefficient at index `n >= 1`.
    pub fn coeff(&self, n: usize) -> T {
        assert!(n >= 1, "matrix indices start at 1");
        if n % 2 == 1 {
            self.c1
        } else {
            self.c2
        }
    }

    /// True iff `c1 * c2 == 0` exactly.
    pub fn is_degenerate(&self) -> bool {
        self.c1 * self.c2 == T::zero()
    }

    /// The sign-flipped representative `(|c1|, |c2|)`.
    ///
    /// Flipping the sign of any `c(n)` is a unitary (diagonal `+-1`)
    /// equivalence, so every spectral statement depends on the absolute
    /// values only.
    pub fn normalized(&self) -> Self {
        Self {
            c1: self.c1.abs(),
            c2: self.c2.abs(),
        }
    }

    /// `|c1| + |c2|`, the outer band half-width.
    pub fn abs_sum(&self) -> T {
        self.c1.abs() + self.c2.abs()
    }

    /// `||c1| - |c2||`, the inner gap half-width.
    pub fn abs_diff(&self) -> T {
        (self.c1.abs() - self.c2.abs()).abs()
    }
}

/// One row of the matrix: diagonal `q = n` and weight `w = c(n) * n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixEntry<T> {
    pub n: usize,
    pub q: T,
    pub w: T,
}

/// Entries of row `n >= 1`.
pub fn entries<T: Real>(params: &ModulationParams<T>, n: usize) -> MatrixEntry<T> {
    assert!(n >= 1, "matrix indices start at 1");
    let nf = T::from_usize(n).expect("index representable in scalar type");
    MatrixEntry {
        n,
        q: nf,
        w: params.coeff(n) * nf,
    }
}

/// Discriminant `d(lambda) = ((lambda - 1)^2 - c1^2 - c2^2) / (c1 c2)` of the
/// periodic comparison operator.
///
/// Errors with [`Error::DegenerateParams`] when `c1 c2 = 0`.
pub fn discriminant<T: Real>(params: &ModulationParams<T>, lambda: T) -> Result<T> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if params.is_degenerate() {
        return Err(Error::DegenerateParams);
    }
    let shifted = lambda - T::one();
    Ok((shifted * shifted - params.c1 * params.c1 - params.c2 * params.c2) / (params.c1 * params.c2))
}

/// The four band edges of the comparison operator, in increasing order:
///
/// ```text
/// lo_minus = 1 - (|c1| + |c2|)    lo_plus = 1 - ||c1| - |c2||
/// hi_minus = 1 + ||c1| - |c2||    hi_plus = 1 + (|c1| + |c2|)
/// ```
///
/// The bands are `[lo_minus, lo_plus]` and `[hi_minus, hi_plus]`; they touch
/// at 1 exactly when `|c1| = |c2|`. Both pairs are symmetric about 1:
/// `lo_minus + hi_plus = lo_plus + hi_minus = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandStructure<T> {
    pub lo_minus: T,
    pub lo_plus: T,
    pub hi_minus: T,
    pub hi_plus: T,
}

impl<T: Real> BandStructure<T> {
    /// True iff `lambda` lies in one of the two closed bands.
    pub fn contains(&self, lambda: T) -> bool {
        (lambda >= self.lo_minus && lambda <= self.lo_plus)
            || (lambda >= self.hi_minus && lambda <= self.hi_plus)
    }

    /// Edges as an array in increasing order.
    pub fn edges(&self) -> [T; 4] {
        [self.lo_minus, self.lo_plus, self.hi_minus, self.hi_plus]
    }
}

/// Band geometry for the given parameters.
///
/// Defined for degenerate parameters too (the bands then collapse onto the
/// single interval `[1 - c, 1 + c]` split at 1).
pub fn bands<T: Real>(params: &ModulationParams<T>) -> BandStructure<T> {
    let one = T::one();
    let s = params.abs_sum();
    let r = params.abs_diff();
    BandStructure {
        lo_minus: one - s,
        lo_plus: one - r,
        hi_minus: one + r,
        hi_plus: one + s,
    }
}

/// True iff `|d(lambda)| <= 2`, i.e. `lambda` lies in the closed bands.
///
/// Agrees with [`BandStructure::contains`] away from the edges; exactly on an
/// edge the two routes may round to different sides, but both are within one
/// ulp of the edge.
pub fn in_ac_band<T: Real>(params: &ModulationParams<T>, lambda: T) -> Result<bool> {
    Ok(discriminant(params, lambda)?.abs() <= lit(2.0))
}

/// Coarse spectral character of a parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    /// `|d(0)| < 2`: purely absolutely continuous spectrum on the line.
    PureAc,
    /// `||c1| - |c2|| = 1`: ac spectrum below 1/2, discrete above.
    CriticalB,
    /// `|c1| + |c2| = 1`: discrete spectrum below 1/2, ac above.
    CriticalC,
    /// `|d(0)| > 2`: discrete spectrum.
    Discrete,
    /// `c1 c2 = 0`: block-diagonal, pure point spectrum.
    Degenerate,
}

impl RegionTag {
    /// One-letter region code used by grid sweeps: `a`, `b`, `c`, `d`, `x`.
    pub fn code(&self) -> char {
        match self {
            RegionTag::PureAc => 'a',
            RegionTag::CriticalB => 'b',
            RegionTag::CriticalC => 'c',
            RegionTag::Discrete => 'd',
            RegionTag::Degenerate => 'x',
        }
    }
}

/// Closed-ended interval with `+-inf` endpoints allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    /// The whole real line.
    pub fn full() -> Self {
        Self {
            lo: T::neg_infinity(),
            hi: T::infinity(),
        }
    }
}

/// Classification record: the region tag plus the intervals carrying
/// absolutely continuous and point spectrum, where the theory pins them down.
///
/// On the critical lines the split point `1/2` itself belongs to neither
/// interval; no finite computation classifies it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRegion<T> {
    pub tag: RegionTag,
    pub ac_interval: Option<Interval<T>>,
    pub pp_interval: Option<Interval<T>>,
}

/// Classifies a parameter pair.
///
/// The degenerate test `c1 c2 == 0` is exact and runs first. Membership in
/// the critical lines is tested with the absolute tolerance `tol` on
/// `||c1| - |c2|| - 1` and `|c1| + |c2| - 1`; if `tol` covers both lines at
/// once the call fails with [`Error::AmbiguousClassification`] rather than
/// picking one. Off the lines, the sign of `|d(0)| - 2` decides.
pub fn classify<T: Real>(params: &ModulationParams<T>, tol: T) -> Result<SpectralRegion<T>> {
    if !tol.is_finite() || tol < T::zero() {
        return Err(Error::InvalidInput("classification tolerance must be finite and >= 0"));
    }
    if params.is_degenerate() {
        return Ok(SpectralRegion {
            tag: RegionTag::Degenerate,
            ac_interval: None,
            pp_interval: None,
        });
    }
    let one = T::one();
    let half = lit::<T>(0.5);
    let on_b = (params.abs_diff() - one).abs() <= tol;
    let on_c = (params.abs_sum() - one).abs() <= tol;
    match (on_b, on_c) {
        (true, true) => Err(Error::AmbiguousClassification),
        (true, false) => Ok(SpectralRegion {
            tag: RegionTag::CriticalB,
            ac_interval: Some(Interval {
                lo: T::neg_infinity(),
                hi: half,
            }),
            pp_interval: Some(Interval {
                lo: half,
                hi: T::infinity(),
            }),
        }),
        (false, true) => Ok(SpectralRegion {
            tag: RegionTag::CriticalC,
            ac_interval: Some(Interval {
                lo: half,
                hi: T::infinity(),
            }),
            pp_interval: Some(Interval {
                lo: T::neg_infinity(),
                hi: half,
            }),
        }),
        (false, false) => {
            let d0 = discriminant(params, T::zero())?;
            if d0.abs() < lit(2.0) {
                Ok(SpectralRegion {
                    tag: RegionTag::PureAc,
                    ac_interval: Some(Interval::full()),
                    pp_interval: None,
                })
            } else {
                Ok(SpectralRegion {
                    tag: RegionTag::Discrete,
                    ac_interval: None,
                    pp_interval: Some(Interval::full()),
                })
            }
        }
    }
}

/// Default absolute tolerance for critical-line membership in [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;
