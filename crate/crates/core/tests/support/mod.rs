//! Shared helpers for the integration tests: an extended-precision dense
//! eigenvalue oracle for small symmetric tridiagonal matrices, and seeded
//! random number generators.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic generator for test draws.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Double-double value: an unevaluated sum `hi + lo` with `|lo|` below one
/// ulp of `hi`, giving roughly 31 significant decimal digits.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum of two doubles (Knuth).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free sum assuming `|a| >= |b|` (Dekker).
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Error-free product via fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Sign of the represented value: -1, 0, or +1.
    pub fn signum(self) -> i8 {
        if self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0) {
            1
        } else if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -1
        } else {
            0
        }
    }
}

/// Evaluates `det(T - x I)` for the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal, by the leading-principal-minor
/// recurrence `p_i = (d_i - x) p_{i-1} - e_{i-1}^2 p_{i-2}` carried in
/// double-double arithmetic.
pub fn char_poly(diag: &[f64], offdiag: &[f64], x: f64) -> Dd {
    assert!(!diag.is_empty());
    assert_eq!(offdiag.len() + 1, diag.len());
    let mut prev = Dd::from_f64(1.0);
    let mut cur = Dd::from_f64(diag[0]).sub(Dd::from_f64(x));
    for i in 1..diag.len() {
        let d = Dd::from_f64(diag[i]).sub(Dd::from_f64(x));
        let e = Dd::from_f64(offdiag[i - 1]);
        let next = d.mul(cur).sub(e.mul(e).mul(prev));
        prev = cur;
        cur = next;
    }
    cur
}

/// All eigenvalues of the symmetric tridiagonal matrix, ascending, each
/// bisected to f64 exhaustion with the characteristic-polynomial sign
/// evaluated in double-double arithmetic.
///
/// Nonzero off-diagonal entries make every eigenvalue simple, so the sign
/// of the characteristic polynomial flips at each root; a uniform grid over
/// the padded Gershgorin interval is refined until all roots are bracketed.
pub fn dense_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 1);
    assert!(
        offdiag.iter().all(|&e| e != 0.0),
        "the oracle needs simple eigenvalues"
    );
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += offdiag[i - 1].abs();
        }
        if i < n - 1 {
            radius += offdiag[i].abs();
        }
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    lo -= 1.0;
    hi += 1.0;

    let sign_at = |x: f64| -> i8 {
        let s = char_poly(diag, offdiag, x).signum();
        if s != 0 {
            s
        } else {
            // An exact root on a probe point: nudge right; the nudged sign
            // brackets the root on the left side.
            char_poly(diag, offdiag, x + (hi - lo) * 1e-15).signum()
        }
    };

    let mut cells = 8 * n;
    loop {
        let mut brackets: Vec<(f64, f64, i8)> = Vec::with_capacity(n);
        let mut prev_x = lo;
        let mut prev_s = sign_at(lo);
        for i in 1..=cells {
            let x = lo + (hi - lo) * i as f64 / cells as f64;
            let s = sign_at(x);
            if s != prev_s {
                brackets.push((prev_x, x, prev_s));
            }
            prev_x = x;
            prev_s = s;
        }
        if brackets.len() == n {
            return brackets
                .into_iter()
                .map(|(a, b, sa)| bisect(diag, offdiag, a, b, sa))
                .collect();
        }
        cells *= 2;
        assert!(
            cells <= 1 << 24,
            "oracle grid failed to isolate {} eigenvalues",
            n
        );
    }
}

fn bisect(diag: &[f64], offdiag: &[f64], mut a: f64, mut b: f64, sign_a: i8) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let s = char_poly(diag, offdiag, mid).signum();
        if s == 0 {
            return mid;
        }
        if s == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
