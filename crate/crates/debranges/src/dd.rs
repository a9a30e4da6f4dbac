//! Double-double arithmetic (~31 significant digits) for the power series
//! of the companion functions, which cancel catastrophically on the real
//! axis once |z| grows past ~15.
//!
//! Standard error-free transformations: `two_sum`, `quick_two_sum`, and a
//! fused-multiply-add `two_prod`. See Hida, Li, Bailey, "Library for
//! double-double and quad-double arithmetic" for the algorithms.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
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
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles as a Dd.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Exact product of two doubles as a Dd.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    #[inline]
    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> CDd {
        CDd { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    #[inline]
    pub fn add(self, other: CDd) -> CDd {
        CDd { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline]
    pub fn mul(self, other: CDd) -> CDd {
        CDd {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn mul_dd(self, s: Dd) -> CDd {
        CDd { re: self.re.mul(s), im: self.im.mul(s) }
    }

    /// Approximate modulus, accurate at the f64 level (enough for
    /// convergence tests).
    #[inline]
    pub fn abs_approx(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_carries_low_part() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-30);
        let s = a.add(b);
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-30);
    }

    #[test]
    fn prod_is_error_free() {
        let p = Dd::from_prod(1.0 + 2f64.powi(-30), 1.0 + 2f64.powi(-30));
        // (1+e)^2 = 1 + 2e + e^2; hi rounds to 1 + 2e, lo carries e^2 exactly
        assert_eq!(p.lo, 2f64.powi(-60));
    }

    #[test]
    fn div_roundtrips() {
        let a = Dd::from_sum(std::f64::consts::PI, 1.2e-17);
        let b = Dd::from_sum(std::f64::consts::E, -3.4e-17);
        let q = a.div(b);
        let back = q.mul(b);
        let err = back.sub(a);
        assert!(err.to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_mul_matches_f64_for_small_values() {
        let a = CDd::from_f64(1.5, -2.5);
        let b = CDd::from_f64(-0.25, 3.0);
        let p = a.mul(b);
        assert!((p.re.to_f64() - (1.5 * -0.25 - -2.5 * 3.0)).abs() < 1e-30);
        assert!((p.im.to_f64() - (1.5 * 3.0 + -2.5 * -0.25)).abs() < 1e-30);
    }
}
