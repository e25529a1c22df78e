//! Solvers for the three-term recurrence
//!
//! ```text
//! w(n-1) u(n-1) + (n - lambda) u(n) + w(n) u(n+1) = 0,      n >= 2,
//! ```
//!
//! which characterises generalized eigenvectors of the operator.
//!
//! Solutions grow or decay at rates like `exp(+-gamma n)` or
//! `exp(+-delta sqrt(n))`, so raw `f64` entries overflow long before the
//! trace lengths of interest. Every stored value is therefore a
//! [`LogScaledValue`]: a sign in `{-1, 0, +1}` plus the natural log of the
//! magnitude, and the iterations renormalize their working pair each step.
//!
//! Two solvers are provided. [`forward_solve`] runs the recurrence upward
//! from prescribed `(u(1), u(2))`; for generic seeds the result is dominated
//! by the fastest-growing solution. [`backward_minimal`] recovers the
//! minimal (fastest-decaying) solution by downward recursion from a far
//! start index with seed `(0, 1)`, doubling the start index until the first
//! `n_max` entries stabilise; failure to stabilise is reported as
//! [`Error::NoConvergence`] and is the expected outcome when no minimal
//! solution exists (spectral parameter inside an absolutely continuous
//! band).
//!
//! The odd and even subsequences `v(k) = u(2k-1)`, `w(k) = u(2k)` decouple
//! into second-order recurrences with rational coefficients; see
//! [`decoupled_coeffs`].

use crate::model::{entries, ModulationParams};
use crate::{Error, Real, Result};

/// A real number stored as sign and log-magnitude.
///
/// `sign == 0` encodes exact zero, with `logmag == -inf` as sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaledValue<T> {
    sign: i8,
    logmag: T,
}

impl<T: Real> LogScaledValue<T> {
    /// Exact zero.
    pub fn zero() -> Self {
        Self {
            sign: 0,
            logmag: T::neg_infinity(),
        }
    }

    /// Encodes a finite value.
    pub fn from_value(x: T) -> Self {
        Self::from_scaled(x, T::zero())
    }

    /// Encodes `x * exp(ln_shift)` without forming the product.
    pub fn from_scaled(x: T, ln_shift: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else {
            Self {
                sign: if x > T::zero() { 1 } else { -1 },
                logmag: x.abs().ln() + ln_shift,
            }
        }
    }

    /// Sign in `{-1, 0, +1}`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(&self) -> T {
        self.logmag
    }

    /// True iff the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The value itself; overflows to `+-inf` when the magnitude exceeds
    /// the scalar range.
    pub fn value(&self) -> T {
        self.scaled(T::zero())
    }

    /// `value * exp(-ln_offset)`, for de-scaling within a common window.
    pub fn scaled(&self, ln_offset: T) -> T {
        match self.sign {
            0 => T::zero(),
            1 => (self.logmag - ln_offset).exp(),
            _ => -(self.logmag - ln_offset).exp(),
        }
    }

    /// `num / den` as a plain scalar. Infinite or NaN when `den` is zero.
    pub fn ratio(num: Self, den: Self) -> T {
        let mag = (num.logmag - den.logmag).exp();
        if num.sign * den.sign >= 0 {
            mag
        } else {
            -mag
        }
    }

    /// Relative agreement test: same sign and log-magnitudes within
    /// `rel_tol` (first-order equivalent to `|a - b| <= rel_tol * |a|`).
    pub fn rel_close(a: Self, b: Self, rel_tol: T) -> bool {
        if a.sign == 0 && b.sign == 0 {
            return true;
        }
        if a.sign != b.sign {
            return false;
        }
        (a.logmag - b.logmag).abs() <= rel_tol
    }
}

/// Which way a trace was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A solved sequence `u(1) .. u(n_max)` in log-scaled form.
#[derive(Debug, Clone)]
pub struct SolutionTrace<T> {
    params: ModulationParams<T>,
    lambda: T,
    direction: Direction,
    values: Vec<LogScaledValue<T>>,
}

impl<T: Real> SolutionTrace<T> {
    /// Assembles a trace from precomputed entries. Test instrumentation;
    /// nothing validates that the entries solve the recurrence.
    #[cfg(test)]
    pub(crate) fn from_values(
        params: ModulationParams<T>,
        lambda: T,
        direction: Direction,
        values: Vec<LogScaledValue<T>>,
    ) -> Self {
        Self {
            params,
            lambda,
            direction,
            values,
        }
    }

    pub fn params(&self) -> &ModulationParams<T> {
        &self.params
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry `u(n)`, 1-based.
    pub fn value(&self, n: usize) -> LogScaledValue<T> {
        assert!(n >= 1 && n <= self.values.len(), "trace index out of range");
        self.values[n - 1]
    }

    /// All entries, index 0 holding `u(1)`.
    pub fn values(&self) -> &[LogScaledValue<T>] {
        &self.values
    }
}

/// One step of the first-order form: maps `(u(n-1), u(n))` to
/// `(u(n), u(n+1))`.
///
/// The matrix is `[[0, 1], [-w(n-1)/w(n), (lambda - n)/w(n)]]` with
/// determinant `w(n-1)/w(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferStep<T> {
    pub matrix: [[T; 2]; 2],
}

impl<T: Real> TransferStep<T> {
    pub fn determinant(&self) -> T {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn apply(&self, pair: [T; 2]) -> [T; 2] {
        [
            self.matrix[0][0] * pair[0] + self.matrix[0][1] * pair[1],
            self.matrix[1][0] * pair[0] + self.matrix[1][1] * pair[1],
        ]
    }
}

/// Transfer step at row `n >= 2`. Fails when the dividing weight `w(n)`
/// vanishes.
pub fn transfer_step<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    n: usize,
) -> Result<TransferStep<T>> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if n < 2 {
        return Err(Error::IndexOutOfRange {
            index: n,
            reason: "transfer steps start at row 2",
        });
    }
    let row = entries(params, n);
    let prev = entries(params, n - 1);
    if row.w == T::zero() {
        return Err(Error::DegenerateWeight { index: n });
    }
    Ok(TransferStep {
        matrix: [
            [T::zero(), T::one()],
            [-prev.w / row.w, (lambda - row.q) / row.w],
        ],
    })
}

/// Runs the recurrence upward from `(u(1), u(2)) = (u1, u2)`, returning
/// `u(1) .. u(n_max)`.
///
/// The working pair is renormalized every step, so traces of any growth
/// rate are representable; magnitudes live in the log field of the stored
/// values. A zero seed pair produces the identically zero trace.
pub fn forward_solve<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    u1: T,
    u2: T,
    n_max: usize,
) -> Result<SolutionTrace<T>> {
    if !lambda.is_finite() || !u1.is_finite() || !u2.is_finite() {
        return Err(Error::NonFinite("forward_solve inputs"));
    }
    if n_max < 2 {
        return Err(Error::InvalidInput("forward_solve needs n_max >= 2"));
    }
    let mut values = Vec::with_capacity(n_max);
    // (a, b) = (u(n-1), u(n)) * exp(-shift)
    let mut a = u1;
    let mut b = u2;
    let mut shift = T::zero();
    values.push(LogScaledValue::from_scaled(a, shift));
    values.push(LogScaledValue::from_scaled(b, shift));
    for n in 2..n_max {
        let row = entries(params, n);
        let w_prev = entries(params, n - 1).w;
        if row.w == T::zero() {
            return Err(Error::DegenerateWeight { index: n });
        }
        let next = -(w_prev * a + (row.q - lambda) * b) / row.w;
        let m = b.abs().max(next.abs());
        if m > T::zero() {
            a = b / m;
            b = next / m;
            shift = shift + m.ln();
        } else {
            a = b;
            b = next;
        }
        values.push(LogScaledValue::from_scaled(b, shift));
    }
    Ok(SolutionTrace {
        params: *params,
        lambda,
        direction: Direction::Forward,
        values,
    })
}

/// Start-index multiplier cap for [`backward_minimal`].
const BACKWARD_CAP_FACTOR: usize = 64;

/// Recovers the minimal solution on `1 ..= n_max` by downward recursion.
///
/// Seeds `(u(M+1), u(M)) = (0, 1)` at `M = 2 n_max` and doubles `M` until
/// two consecutive runs agree entrywise to `rel_tol` after normalizing the
/// trace by its last retained entry (`u(n_max) = +1`). Gives up at
/// `M = 64 n_max` with [`Error::NoConvergence`]; that outcome signals the
/// absence of a minimal solution rather than a numerical fault.
pub fn backward_minimal<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    n_max: usize,
    rel_tol: T,
) -> Result<SolutionTrace<T>> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if n_max < 2 {
        return Err(Error::InvalidInput("backward_minimal needs n_max >= 2"));
    }
    if !(rel_tol > T::zero()) || !rel_tol.is_finite() {
        return Err(Error::InvalidInput("backward_minimal needs rel_tol > 0"));
    }
    if params.c1() == T::zero() {
        return Err(Error::DegenerateWeight { index: 1 });
    }
    if params.c2() == T::zero() {
        return Err(Error::DegenerateWeight { index: 2 });
    }

    let cap = BACKWARD_CAP_FACTOR * n_max;
    let mut previous: Option<Vec<LogScaledValue<T>>> = None;
    let mut factor = 2usize;
    while factor <= BACKWARD_CAP_FACTOR {
        let start = factor * n_max;
        let current = backward_pass(params, lambda, n_max, start);
        if let (Some(prev), Some(cur)) = (&previous, &current) {
            let agree = prev
                .iter()
                .zip(cur.iter())
                .all(|(&p, &c)| LogScaledValue::rel_close(p, c, rel_tol));
            if agree {
                return Ok(SolutionTrace {
                    params: *params,
                    lambda,
                    direction: Direction::Backward,
                    values: current.unwrap(),
                });
            }
        }
        previous = current;
        factor *= 2;
    }
    Err(Error::NoConvergence { cap })
}

/// One downward run from start index `start`, normalized by the last
/// retained entry. `None` when that entry is exactly zero (normalization
/// impossible; treated as disagreement by the caller).
fn backward_pass<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    n_max: usize,
    start: usize,
) -> Option<Vec<LogScaledValue<T>>> {
    let mut values = vec![LogScaledValue::<T>::zero(); n_max];
    // (hi, lo) = (u(n+1), u(n)) * exp(-shift)
    let mut hi = T::zero();
    let mut lo = T::one();
    let mut shift = T::zero();
    for n in (2..=start).rev() {
        let row = entries(params, n);
        let w_prev = entries(params, n - 1).w;
        let prev = -((row.q - lambda) * lo + row.w * hi) / w_prev;
        let m = lo.abs().max(prev.abs());
        debug_assert!(m > T::zero(), "seed (0, 1) cannot collapse to (0, 0)");
        hi = lo / m;
        lo = prev / m;
        shift = shift + m.ln();
        // just computed u(n-1); the pass records u(n_max) .. u(1)
        if n <= n_max + 1 {
            values[n - 2] = LogScaledValue::from_scaled(lo, shift);
        }
    }
    let last = values[n_max - 1];
    if last.is_zero() {
        return None;
    }
    for v in values.iter_mut() {
        *v = LogScaledValue {
            sign: v.sign * last.sign,
            logmag: v.logmag - last.logmag,
        };
    }
    Some(values)
}

/// Coefficients of the decoupled odd/even second-order recurrences at step
/// `k`:
///
/// ```text
/// v(k+2) + p1(k) v(k+1) + p2(k) v(k) = 0        v(k) = u(2k-1)
/// w(k+2) + r1(k) w(k+1) + r2(k) w(k) = 0        w(k) = u(2k)
/// ```
///
/// Both follow one pattern anchored at a base row `m` (`m = 2k` for the odd
/// sequence, `m = 2k+1` for the even one):
///
/// ```text
/// p1 = (q(m+2)-lambda)/(q(m)-lambda) * w(m)^2/(w(m+1) w(m+2))
///      - (q(m+1)-lambda)(q(m+2)-lambda)/(w(m+1) w(m+2)) + w(m+1)/w(m+2)
/// p2 = (q(m+2)-lambda)/(q(m)-lambda) * w(m-1) w(m)/(w(m+1) w(m+2))
/// ```
///
/// so `r_i(k)` is exactly `p_i` shifted by half a period, which swaps the
/// roles of `c1` and `c2`. As `k -> inf`, `k (p1(k) - a0) -> a1` and
/// `k (p2(k) - 1) -> -1` with `a0`, `a1` from
/// [`crate::asymptotics::ba_coefficients`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoupledCoeffs<T> {
    pub p1: T,
    pub p2: T,
    pub r1: T,
    pub r2: T,
}

/// Evaluates the decoupled coefficients at `k >= 1`.
///
/// Fails with [`Error::PoleAtDiagonal`] when `lambda` equals the diagonal
/// entry `q(2k)` (odd pattern) or `q(2k+1)` (even pattern), where the
/// elimination divides by zero.
pub fn decoupled_coeffs<T: Real>(
    params: &ModulationParams<T>,
    lambda: T,
    k: usize,
) -> Result<DecoupledCoeffs<T>> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if k < 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            reason: "decoupled steps start at k = 1",
        });
    }
    if params.is_degenerate() {
        return Err(Error::DegenerateParams);
    }
    let (p1, p2) = coeff_pattern(params, lambda, 2 * k)?;
    let (r1, r2) = coeff_pattern(params, lambda, 2 * k + 1)?;
    Ok(DecoupledCoeffs { p1, p2, r1, r2 })
}

/// The elimination pattern anchored at base row `m >= 2`.
fn coeff_pattern<T: Real>(params: &ModulationParams<T>, lambda: T, m: usize) -> Result<(T, T)> {
    let e0 = entries(params, m - 1);
    let e1 = entries(params, m);
    let e2 = entries(params, m + 1);
    let e3 = entries(params, m + 2);
    if e1.q == lambda {
        return Err(Error::PoleAtDiagonal { index: m });
    }
    let carry = (e3.q - lambda) / (e1.q - lambda);
    let denom = e2.w * e3.w;
    let p1 = carry * e1.w * e1.w / denom - (e2.q - lambda) * (e3.q - lambda) / denom + e2.w / e3.w;
    let p2 = carry * e0.w * e1.w / denom;
    Ok((p1, p2))
}

/// Splits a trace into its odd and even subsequences
/// `(v(k) = u(2k-1), w(k) = u(2k))`.
pub fn odd_even_split<T: Real>(
    trace: &SolutionTrace<T>,
) -> (Vec<LogScaledValue<T>>, Vec<LogScaledValue<T>>) {
    let odd = trace.values.iter().copied().step_by(2).collect();
    let even = trace.values.iter().copied().skip(1).step_by(2).collect();
    (odd, even)
}

/// Largest relative residual of the three-term recurrence over the interior
/// of a trace.
///
/// For each `n`, the three terms are de-scaled within a common exponent
/// window and the residual is measured relative to
/// `max(|w(n-1) u(n-1)|, |w(n) u(n+1)|)`. Solver output satisfies this at
/// the level of accumulated rounding (about `1e-10` is a safe bound for
/// `f64` traces of the lengths used here).
pub fn recurrence_residual<T: Real>(trace: &SolutionTrace<T>) -> T {
    let params = &trace.params;
    let lambda = trace.lambda;
    let mut worst = T::zero();
    for n in 2..trace.len() {
        let row = entries(params, n);
        let w_prev = entries(params, n - 1).w;
        let terms = [
            scaled_product(w_prev, trace.value(n - 1)),
            scaled_product(row.q - lambda, trace.value(n)),
            scaled_product(row.w, trace.value(n + 1)),
        ];
        let window = terms
            .iter()
            .filter(|t| t.sign != 0)
            .map(|t| t.logmag)
            .fold(T::neg_infinity(), T::max);
        if window == T::neg_infinity() {
            continue;
        }
        let de: Vec<T> = terms.iter().map(|t| t.scaled(window)).collect();
        let denom = de[0].abs().max(de[2].abs());
        if denom == T::zero() {
            continue;
        }
        worst = worst.max((de[0] + de[1] + de[2]).abs() / denom);
    }
    worst
}

/// Largest relative residuals of the decoupled recurrences for the odd and
/// even subsequences of a trace, in that order.
pub fn decoupled_residual<T: Real>(trace: &SolutionTrace<T>) -> Result<(T, T)> {
    let (odd, even) = odd_even_split(trace);
    let worst = |seq: &[LogScaledValue<T>], even_pattern: bool| -> Result<T> {
        let mut worst = T::zero();
        for k in 1..=seq.len().saturating_sub(2) {
            let m = if even_pattern { 2 * k + 1 } else { 2 * k };
            let (c1, c2) = coeff_pattern(&trace.params, trace.lambda, m)?;
            let terms = [
                seq[k + 1],
                scaled_product(c1, seq[k]),
                scaled_product(c2, seq[k - 1]),
            ];
            let window = terms
                .iter()
                .filter(|t| t.sign != 0)
                .map(|t| t.logmag)
                .fold(T::neg_infinity(), T::max);
            if window == T::neg_infinity() {
                continue;
            }
            let de: Vec<T> = terms.iter().map(|t| t.scaled(window)).collect();
            let denom = de.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
            if denom > T::zero() {
                worst = worst.max((de[0] + de[1] + de[2]).abs() / denom);
            }
        }
        Ok(worst)
    };
    Ok((worst(&odd, false)?, worst(&even, true)?))
}

/// `factor * value` as a log-scaled number.
fn scaled_product<T: Real>(factor: T, value: LogScaledValue<T>) -> LogScaledValue<T> {
    if factor == T::zero() || value.is_zero() {
        return LogScaledValue::zero();
    }
    let sign = if factor > T::zero() {
        value.sign
    } else {
        -value.sign
    };
    LogScaledValue {
        sign,
        logmag: factor.abs().ln() + value.logmag,
    }
}

/// Discrete Wronskian curve `w(n) (a(n) b(n+1) - a(n+1) b(n))` of two traces
/// of the same problem, up to one common (arbitrary) scale factor.
///
/// For genuine solutions the curve is constant in `n`; two traces are
/// linearly independent iff the constant is nonzero. Values are de-scaled
/// by the largest term over the whole curve, so only ratios between entries
/// are meaningful.
pub fn wronskian_curve<T: Real>(
    a: &SolutionTrace<T>,
    b: &SolutionTrace<T>,
) -> Result<Vec<T>> {
    if a.params != b.params || a.lambda != b.lambda {
        return Err(Error::InvalidInput("wronskian requires traces of one problem"));
    }
    let len = a.len().min(b.len());
    if len < 2 {
        return Err(Error::InsufficientData("wronskian needs two entries"));
    }
    // First pass: common exponent window over every product term.
    let mut window = T::neg_infinity();
    for n in 1..len {
        let w = entries(&a.params, n).w;
        if w == T::zero() {
            continue;
        }
        for (x, y) in [
            (a.value(n), b.value(n + 1)),
            (a.value(n + 1), b.value(n)),
        ] {
            if x.sign != 0 && y.sign != 0 {
                window = window.max(w.abs().ln() + x.ln_abs() + y.ln_abs());
            }
        }
    }
    if window == T::neg_infinity() {
        return Ok(vec![T::zero(); len - 1]);
    }
    let product = |w: T, x: LogScaledValue<T>, y: LogScaledValue<T>| -> T {
        if w == T::zero() || x.sign == 0 || y.sign == 0 {
            return T::zero();
        }
        let mag = (w.abs().ln() + x.ln_abs() + y.ln_abs() - window).exp();
        let sign = (x.sign * y.sign) as i32;
        let sign = if w > T::zero() { sign } else { -sign };
        if sign >= 0 {
            mag
        } else {
            -mag
        }
    };
    Ok((1..len)
        .map(|n| {
            let w = entries(&a.params, n).w;
            product(w, a.value(n), b.value(n + 1)) - product(w, a.value(n + 1), b.value(n))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModulationParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn p(c1: f64, c2: f64) -> ModulationParams<f64> {
        ModulationParams::new(c1, c2).unwrap()
    }

    #[test]
    fn transfer_step_reference_values() {
        let step = transfer_step(&p(1.0, 1.0), 0.0, 2).unwrap();
        assert_eq!(step.matrix, [[0.0, 1.0], [-0.5, -1.0]]);
        assert_eq!(step.determinant(), 0.5);

        let step = transfer_step(&p(0.3, 0.7), 0.5, 3).unwrap();
        assert_eq!(step.matrix[0], [0.0, 1.0]);
        assert_relative_eq!(step.matrix[1][0], -1.4 / 0.9, max_relative = 1e-15);
        assert_relative_eq!(step.matrix[1][1], -2.5 / 0.9, max_relative = 1e-15);

        assert_eq!(
            transfer_step(&p(1.0, 0.0), 0.0, 2),
            Err(Error::DegenerateWeight { index: 2 })
        );
    }

    #[test]
    fn forward_solve_small_trace() {
        // w(1) u(1) + (2 - 0) u(2) + w(2) u(3) = 0 with unit weights gives
        // u(3) = -1/2.
        let trace = forward_solve(&p(1.0, 1.0), 0.0, 1.0, 0.0, 3).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(trace.value(1).sign(), 1);
        assert_abs_diff_eq!(trace.value(1).ln_abs(), 0.0, epsilon = 1e-15);
        assert!(trace.value(2).is_zero());
        assert_eq!(trace.value(3).sign(), -1);
        assert_abs_diff_eq!(trace.value(3).value(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn forward_solve_zero_seeds_give_zero_trace() {
        let trace = forward_solve(&p(1.0, 1.0), 0.0, 0.0, 0.0, 50).unwrap();
        assert!(trace.values().iter().all(|v| v.is_zero()));
        assert_eq!(recurrence_residual(&trace), 0.0);
    }

    #[test]
    fn forward_solve_is_dominated_by_the_growing_root() {
        // Characteristic root of largest modulus for these parameters, from
        // the quadratic alpha^2 + 3 alpha + 1 = 0.
        let alpha_plus = (-3.0 - 5f64.sqrt()) / 2.0;
        let trace = forward_solve(&p(3.0, 1.0), 0.0, 1.0, 1.0, 402).unwrap();
        let k = 200;
        let ratio = LogScaledValue::ratio(trace.value(2 * k + 1), trace.value(2 * k - 1));
        assert!(
            (ratio.abs() - alpha_plus.abs()).abs() <= 0.01 * alpha_plus.abs(),
            "ratio {ratio} vs root {alpha_plus}"
        );
        assert!(ratio < 0.0, "odd-step ratio keeps the root's sign");
        assert!(recurrence_residual(&trace) <= 1e-10);
    }

    #[test]
    fn backward_minimal_finds_the_decaying_root() {
        let alpha_minus = (-3.0 + 5f64.sqrt()) / 2.0;
        let trace = backward_minimal(&p(3.0, 1.0), 0.0, 200, 1e-10).unwrap();
        assert_eq!(trace.len(), 200);
        assert_eq!(trace.direction(), Direction::Backward);
        // Normalized by the last retained entry.
        assert_eq!(trace.value(200).sign(), 1);
        assert_abs_diff_eq!(trace.value(200).ln_abs(), 0.0, epsilon = 1e-15);
        let k = 90;
        let ratio = LogScaledValue::ratio(trace.value(2 * k + 1), trace.value(2 * k - 1));
        assert!(
            (ratio.abs() - alpha_minus.abs()).abs() <= 0.01 * alpha_minus.abs(),
            "ratio {ratio} vs root {alpha_minus}"
        );
        assert!(recurrence_residual(&trace) <= 1e-10);
    }

    #[test]
    fn backward_minimal_critical_line_decay_trend() {
        // On |c1| + |c2| = 1 below the split point the minimal solution
        // decays like exp(-delta sqrt(k)) along odd indices, with
        // delta = 2 sqrt((1 - 2 lambda) / (2 c1 c2)).
        let delta = 2.0 / 0.42f64.sqrt();
        let trace = backward_minimal(&p(0.3, 0.7), 0.0, 200, 1e-10).unwrap();
        let v = |k: usize| trace.value(2 * k - 1).ln_abs();
        let slope = (v(100) - v(25)) / (100f64.sqrt() - 25f64.sqrt());
        assert!(
            (slope + delta).abs() <= 0.05 * delta,
            "slope {slope} vs -delta {}",
            -delta
        );
    }

    #[test]
    fn backward_minimal_fails_inside_ac_spectrum() {
        let err = backward_minimal(&p(1.0, 1.0), 0.0, 100, 1e-10).unwrap_err();
        assert_eq!(err, Error::NoConvergence { cap: 6400 });
    }

    #[test]
    fn backward_minimal_rejects_degenerate_weights() {
        assert_eq!(
            backward_minimal(&p(0.0, 1.0), 0.0, 50, 1e-8).unwrap_err(),
            Error::DegenerateWeight { index: 1 }
        );
    }

    #[test]
    fn decoupled_coeffs_direct_substitution() {
        // p2(k) = (q(2k+2)-lambda)/(q(2k)-lambda) * w(2k-1) w(2k) / (w(2k+1) w(2k+2))
        let params = p(0.3, 0.7);
        let c = decoupled_coeffs(&params, 0.0, 10).unwrap();
        let w = |n: usize| entries(&params, n).w;
        assert_relative_eq!(
            c.p2,
            (22.0 / 20.0) * (w(19) * w(20)) / (w(21) * w(22)),
            max_relative = 1e-14
        );
        let p1_direct = (22.0 / 20.0) * w(20) * w(20) / (w(21) * w(22))
            - (21.0 * 22.0) / (w(21) * w(22))
            + w(21) / w(22);
        assert_relative_eq!(c.p1, p1_direct, max_relative = 1e-13);
    }

    #[test]
    fn decoupled_even_pattern_is_the_half_shifted_odd_pattern() {
        // Substituting k + 1/2 into the odd-pattern rational functions and
        // swapping c1 with c2 must reproduce r1, r2 exactly.
        let params = p(0.3, 0.7);
        let lambda = 0.37;
        for k in [1usize, 5, 17] {
            let c = decoupled_coeffs(&params, lambda, k).unwrap();
            let (c1, c2) = (0.7, 0.3); // swapped
            let kh = k as f64 + 0.5;
            let q = |j: f64| 2.0 * kh + j;
            let w0 = c1 * (2.0 * kh - 1.0);
            let w1 = c2 * (2.0 * kh);
            let w2 = c1 * (2.0 * kh + 1.0);
            let w3 = c2 * (2.0 * kh + 2.0);
            let carry = (q(2.0) - lambda) / (q(0.0) - lambda);
            let r1 = carry * w1 * w1 / (w2 * w3) - (q(1.0) - lambda) * (q(2.0) - lambda) / (w2 * w3) + w2 / w3;
            let r2 = carry * w0 * w1 / (w2 * w3);
            assert_relative_eq!(c.r1, r1, max_relative = 1e-12);
            assert_relative_eq!(c.r2, r2, max_relative = 1e-12);
        }
    }

    #[test]
    fn decoupled_coeffs_limits() {
        // k (p1 - a0) -> a1 and k (p2 - 1) -> -1.
        let params = p(0.3, 0.7);
        let lambda = 0.0;
        let a0 = (0.09 + 0.49 - 1.0) / 0.21;
        let a1 = -a0 / 2.0 + (lambda - 0.5) / 0.21;
        let k = 1_000_000usize;
        let c = decoupled_coeffs(&params, lambda, k).unwrap();
        let kf = k as f64;
        assert_abs_diff_eq!(kf * (c.p1 - a0), a1, epsilon = 1e-3);
        assert_abs_diff_eq!(kf * (c.p2 - 1.0), -1.0, epsilon = 1e-4);
    }

    #[test]
    fn decoupled_coeffs_poles() {
        assert_eq!(
            decoupled_coeffs(&p(0.3, 0.7), 20.0, 10),
            Err(Error::PoleAtDiagonal { index: 20 })
        );
        assert_eq!(
            decoupled_coeffs(&p(0.3, 0.7), 21.0, 10),
            Err(Error::PoleAtDiagonal { index: 21 })
        );
        assert_eq!(
            decoupled_coeffs(&p(0.0, 0.7), 0.0, 10),
            Err(Error::DegenerateParams)
        );
    }

    #[test]
    fn split_subsequences_satisfy_their_recurrences() {
        let trace = forward_solve(&p(0.3, 0.7), 0.37, 1.0, -0.25, 301).unwrap();
        let (odd, even) = odd_even_split(&trace);
        assert_eq!(odd.len(), 151);
        assert_eq!(even.len(), 150);
        assert_eq!(odd[0], trace.value(1));
        assert_eq!(even[0], trace.value(2));
        let (res_odd, res_even) = decoupled_residual(&trace).unwrap();
        assert!(res_odd <= 1e-8, "odd residual {res_odd}");
        assert!(res_even <= 1e-8, "even residual {res_even}");
    }

    #[test]
    fn wronskian_of_independent_solutions_is_constant() {
        let params = p(3.0, 1.0);
        let fwd = forward_solve(&params, 0.0, 1.0, 1.0, 200).unwrap();
        let bwd = backward_minimal(&params, 0.0, 200, 1e-10).unwrap();
        let curve = wronskian_curve(&fwd, &bwd).unwrap();
        let first = curve[0];
        assert!(first != 0.0, "independent solutions have nonzero wronskian");
        for (n, w) in curve.iter().enumerate() {
            assert!(
                ((w - first) / first).abs() <= 1e-8,
                "wronskian drift at n = {}: {} vs {}",
                n + 1,
                w,
                first
            );
        }
    }

    proptest! {
        /// det = w(n-1)/w(n), exactly as floating-point expressions.
        #[test]
        fn transfer_determinant_is_the_weight_ratio(
            c1 in 0.05f64..3.0,
            c2 in 0.05f64..3.0,
            lambda in -5.0f64..5.0,
            n in 2usize..500,
        ) {
            let params = p(c1, c2);
            let step = transfer_step(&params, lambda, n).unwrap();
            let expected = entries(&params, n - 1).w / entries(&params, n).w;
            prop_assert_eq!(step.determinant(), expected);
        }

        /// Solving is linear in the seed pair.
        #[test]
        fn forward_solve_linearity(
            c1 in 0.1f64..2.0,
            c2 in 0.1f64..2.0,
            lambda in -3.0f64..3.0,
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let params = p(c1, c2);
            let n = 60;
            let t1 = forward_solve(&params, lambda, 1.0, 0.0, n).unwrap();
            let t2 = forward_solve(&params, lambda, 0.0, 1.0, n).unwrap();
            let t3 = forward_solve(&params, lambda, a, b, n).unwrap();
            for i in 1..=n {
                let (x, y, z) = (t1.value(i), t2.value(i), t3.value(i));
                let window = x.ln_abs().max(y.ln_abs()).max(z.ln_abs());
                if window == f64::NEG_INFINITY {
                    continue;
                }
                // De-scaled by the largest of the three entries, so the
                // comparison is absolute on a unit scale. The three traces
                // round independently and each step can cancel internally,
                // so the noise allowance grows with the step count.
                let combo = a * x.scaled(window) + b * y.scaled(window);
                let direct = z.scaled(window);
                prop_assert!(
                    (combo - direct).abs() <= 1e-12 * i as f64,
                    "n = {}: {} vs {}", i, combo, direct
                );
            }
        }

        /// Solver output satisfies the recurrence it was built from.
        #[test]
        fn forward_traces_have_tiny_residual(
            c1 in 0.1f64..2.5,
            c2 in 0.1f64..2.5,
            lambda in -3.0f64..3.0,
            u1 in -2.0f64..2.0,
            u2 in -2.0f64..2.0,
        ) {
            let trace = forward_solve(&p(c1, c2), lambda, u1, u2, 300).unwrap();
            prop_assert!(recurrence_residual(&trace) <= 1e-10);
        }
    }
}
