//! Closed-form spectra for degenerate modulation.
//!
//! When exactly one of the two weight parameters vanishes, every other
//! off-diagonal entry of the operator is zero and the matrix decouples
//! into an orthogonal sum of 2 x 2 blocks (plus a leading 1 x 1 block
//! `[1]` when the odd weights vanish). The spectrum is then explicit:
//! each block `[[s, c s], [c s, t]]` with `t = s + 1` contributes the pair
//!
//! ```text
//! (s + t +- sqrt(4 c^2 s^2 + 1)) / 2.
//! ```
//!
//! The minus branch suffers catastrophic cancellation near `|c| = 1` when
//! evaluated as written, so it is computed as `det / lambda_plus` instead;
//! the identity is exact and the quotient form is accurate for all `n`.
//!
//! The minus branches grow like `2 (1 - |c|) n`, so the operator is
//! bounded below for `|c| <= 1` and unbounded below for `|c| > 1`; at
//! `|c| = 1` the minus branches accumulate at `1/2` from below.

use crate::model::ModulationParams;
use crate::{lit, Error, Real, Result};

/// Which weight parameter vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateVariant {
    /// Odd weights vanish (`c1 = 0`): a 1 x 1 block `[1]`, then 2 x 2
    /// blocks coupling rows `2n - 2` and `2n - 1` for `n >= 2`.
    C1Zero,
    /// Even weights vanish (`c2 = 0`): 2 x 2 blocks coupling rows
    /// `2n - 1` and `2n` for `n >= 1`.
    C2Zero,
}

/// A degenerate configuration: the variant plus the surviving nonzero
/// modulation coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateSpec<T> {
    variant: DegenerateVariant,
    c: T,
}

/// Eigenvalues of one 2 x 2 block, `minus <= plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenvalues<T> {
    pub minus: T,
    pub plus: T,
}

impl<T: Real> DegenerateSpec<T> {
    /// Builds a spec directly from the surviving coefficient.
    pub fn new(variant: DegenerateVariant, c: T) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite("degenerate coefficient"));
        }
        if c == T::zero() {
            return Err(Error::InvalidInput(
                "the surviving degenerate coefficient must be nonzero",
            ));
        }
        Ok(Self { variant, c })
    }

    /// Classifies modulation parameters with exactly one vanishing
    /// coefficient.
    pub fn from_params(params: &ModulationParams<T>) -> Result<Self> {
        let z1 = params.c1() == T::zero();
        let z2 = params.c2() == T::zero();
        match (z1, z2) {
            (true, true) => Err(Error::InvalidInput(
                "both coefficients vanish; the operator is already diagonal",
            )),
            (true, false) => Self::new(DegenerateVariant::C1Zero, params.c2()),
            (false, true) => Self::new(DegenerateVariant::C2Zero, params.c1()),
            (false, false) => Err(Error::InvalidInput("parameters are not degenerate")),
        }
    }

    pub fn variant(&self) -> DegenerateVariant {
        self.variant
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// Rows `(s, t)` coupled by block `n`, with `t = s + 1`.
    fn block_rows(&self, n: usize) -> Result<(usize, usize)> {
        match self.variant {
            DegenerateVariant::C2Zero => {
                if n < 1 {
                    return Err(Error::IndexOutOfRange {
                        index: n,
                        reason: "blocks are numbered from 1",
                    });
                }
                Ok((2 * n - 1, 2 * n))
            }
            DegenerateVariant::C1Zero => {
                if n < 2 {
                    return Err(Error::IndexOutOfRange {
                        index: n,
                        reason: "block 1 is the 1 x 1 matrix [1]; pairs start at block 2",
                    });
                }
                Ok((2 * n - 2, 2 * n - 1))
            }
        }
    }

    /// The `n`-th 2 x 2 block.
    pub fn block(&self, n: usize) -> Result<[[T; 2]; 2]> {
        let (s, t) = self.block_rows(n)?;
        let s = lit::<T>(s as f64);
        let t = lit::<T>(t as f64);
        let w = self.c * s;
        Ok([[s, w], [w, t]])
    }

    /// Eigenvalues of the `n`-th block.
    ///
    /// The plus branch comes from the quadratic formula; the minus branch
    /// from `det / plus`, which stays accurate where direct subtraction
    /// cancels.
    pub fn eigenvalue_pair(&self, n: usize) -> Result<BlockEigenvalues<T>> {
        let (s, t) = self.block_rows(n)?;
        let s = lit::<T>(s as f64);
        let t = lit::<T>(t as f64);
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        let disc = (four * self.c * self.c * s * s + T::one()).sqrt();
        let plus = (s + t + disc) / two;
        let det = s * (t - self.c * self.c * s);
        Ok(BlockEigenvalues {
            minus: det / plus,
            plus,
        })
    }

    /// Sorted eigenvalues of the first `n_blocks` blocks (the 1 x 1 block
    /// counts as block 1 in the [`DegenerateVariant::C1Zero`] case).
    pub fn spectrum(&self, n_blocks: usize) -> Result<Vec<T>> {
        if n_blocks == 0 {
            return Err(Error::InvalidInput("spectrum needs at least one block"));
        }
        let mut values = Vec::with_capacity(2 * n_blocks);
        let first_pair = match self.variant {
            DegenerateVariant::C2Zero => 1,
            DegenerateVariant::C1Zero => {
                values.push(T::one());
                2
            }
        };
        for n in first_pair..=n_blocks {
            let pair = self.eigenvalue_pair(n)?;
            values.push(pair.minus);
            values.push(pair.plus);
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(values)
    }

    /// Deviation of the minus branch from its two-terms-plus-`1/n`
    /// expansion
    ///
    /// ```text
    /// C2Zero:  2 (1 - |c|) n + (|c| - 1/2)   - 1/(16 |c| n)
    /// C1Zero:  2 (1 - |c|) n + (2 |c| - 3/2) - 1/(16 |c| n)
    /// ```
    ///
    /// The leading omitted term is of order `1/n^2` in both cases
    /// (`-1/(32 |c| n^2)` and `-1/(16 |c| n^2)` respectively), so
    /// `n^2 * residual` stays bounded while `n^3 * residual` grows.
    pub fn expansion_residual(&self, n: usize) -> Result<T> {
        let pair = self.eigenvalue_pair(n)?;
        let a = self.c.abs();
        let nf = lit::<T>(n as f64);
        let two = lit::<T>(2.0);
        let half = lit::<T>(0.5);
        let sixteen = lit::<T>(16.0);
        let constant = match self.variant {
            DegenerateVariant::C2Zero => a - half,
            DegenerateVariant::C1Zero => two * a - lit::<T>(1.5),
        };
        let approx = two * (T::one() - a) * nf + constant - T::one() / (sixteen * a * nf);
        Ok(pair.minus - approx)
    }
}
