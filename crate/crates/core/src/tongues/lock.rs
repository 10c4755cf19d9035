use std::fmt;

use serde::{Deserialize, Serialize};

/// A reduced rational winding number `p:q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalLock {
    pub p: u64,
    pub q: u64,
}

impl RationalLock {
    /// Panics unless `p, q > 0` and `gcd(p, q) == 1`.
    pub fn new(p: u64, q: u64) -> Self {
        assert!(p > 0 && q > 0, "p and q must be positive");
        assert_eq!(gcd(p, q), 1, "{p}:{q} is not reduced");
        Self { p, q }
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_one_to_one(&self) -> bool {
        self.p == 1 && self.q == 1
    }
}

impl fmt::Display for RationalLock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.q)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Simplest positive rational with denominator `<= max_q` inside
/// `[winding - tol, winding + tol]`.
///
/// Descends the Stern-Brocot tree toward `winding`; the first mediant that
/// lands in the interval has the smallest denominator of any rational in it
/// (and is unique at that denominator).
pub fn classify_lock(winding: f64, max_q: u64, tol: f64) -> Option<RationalLock> {
    if !winding.is_finite() || !(tol > 0.0) || max_q == 0 {
        return None;
    }
    let (lo, hi) = (winding - tol, winding + tol);
    if hi <= 0.0 || winding > 1e9 {
        return None;
    }
    // left = a/b, right = c/d; start from 0/1 and 1/0
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, 0u64);
    // Whole-number part first, so large windings take one jump instead of
    // a walk along the right spine.
    if lo > 0.0 {
        a = lo.ceil() as u64 - 1;
    }
    loop {
        let (p, q) = (a + c, b + d);
        if q > max_q {
            return None;
        }
        let v = p as f64 / q as f64;
        if (v - winding).abs() <= tol {
            // Two reduced fractions with one denominator can only share an
            // interval when that denominator is 1.
            if q == 1 && ((p + 1) as f64 - winding).abs() < (v - winding).abs() {
                return Some(RationalLock { p: p + 1, q });
            }
            return Some(RationalLock { p, q });
        }
        if v < lo {
            (a, b) = (p, q);
        } else if v > hi {
            (c, d) = (p, q);
        } else {
            // Rounding put v inside [lo, hi] but outside tol; treat as miss
            // on the side it falls.
            if v < winding {
                (a, b) = (p, q);
            } else {
                (c, d) = (p, q);
            }
        }
    }
}
