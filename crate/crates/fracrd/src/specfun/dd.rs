//! Minimal double-double arithmetic for compensated series summation.
//!
//! Alternating series (Mittag-Leffler at negative arguments, the Wright
//! function) lose digits to cancellation long before the terms themselves
//! degrade. Accumulating in roughly 32 significant digits pushes the
//! summation error below the error of the individual terms, so the final
//! accuracy is limited by term evaluation only.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

// The full arithmetic set is exercised by the extended-precision test
// oracles; production code only accumulates.
#[allow(dead_code)]
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = two_sum(s, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        self.add_f64(other.hi).add_f64(other.lo)
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let lo = f64::mul_add(self.lo, x, e);
        let (hi, lo) = two_sum(p, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let lo = f64::mul_add(self.hi, other.lo, f64::mul_add(self.lo, other.hi, e));
        let (hi, lo) = two_sum(p, lo);
        Dd { hi, lo }
    }

    /// Division via one Newton correction on the f64 quotient.
    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul_f64(-q1));
        let q2 = r.to_f64() / other.hi;
        Dd::from_f64(q1).add_f64(q2)
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_tracks_roundoff() {
        let a = Dd::from_f64(1.0).add_f64(1e-20);
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
    }

    #[test]
    fn mul_is_nearly_exact() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60; plain f64 drops the last term,
        // the dd product keeps it in the low word.
        let x = 1.0 + (0.5f64).powi(30);
        let sq = Dd::from_f64(x).mul(Dd::from_f64(x));
        assert_eq!(sq.hi, x * x);
        assert_eq!(sq.lo, (0.5f64).powi(60));
    }

    #[test]
    fn div_round_trips() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = Dd::from_f64(std::f64::consts::E);
        let q = a.div(b).mul(b);
        assert!((q.to_f64() - std::f64::consts::PI).abs() < 1e-30);
        assert!((q.add(a.neg())).to_f64().abs() < 1e-30);
    }

    #[test]
    fn alternating_sum_beats_plain_f64() {
        // exp(-20) by raw Taylor: condition number e^40 destroys f64.
        // With terms and accumulator both in dd the result holds ~15 digits.
        let mut acc = Dd::ZERO;
        let mut term = Dd::from_f64(1.0);
        for k in 1..200i32 {
            acc = acc.add(term);
            term = term.mul_f64(-20.0).div(Dd::from_f64(f64::from(k)));
        }
        let exact = (-20.0f64).exp();
        assert!((acc.to_f64() - exact).abs() / exact < 1e-12);
    }
}
