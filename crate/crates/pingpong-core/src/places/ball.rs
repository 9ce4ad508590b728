//! Certified real intervals: midpoint-radius balls over dyadic rationals.
//!
//! Every operation returns a ball containing the exact image of its operands,
//! with midpoints rounded to the working precision and the rounding slack folded
//! into the radius. Operations that happen to be exact keep radius zero, so
//! quantities that are genuinely dyadic stay point intervals and boundary
//! comparisons against them remain decidable.

use num_bigint::BigInt;


use super::dyadic::Dyadic;
use super::Verdict;
use crate::Q;

/// Radii carry little information; they are rounded to this many bits.
const RAD_BITS: u32 = 32;

#[derive(Clone, Debug)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic, // >= 0
}

impl Ball {
    pub fn from_parts(mid: Dyadic, rad: Dyadic) -> Self {
        assert!(rad.sign() >= 0, "negative radius");
        Ball { mid, rad }
    }

    pub fn exact(d: Dyadic) -> Self {
        Ball {
            mid: d,
            rad: Dyadic::zero(),
        }
    }

    pub fn zero() -> Self {
        Ball::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Ball::exact(Dyadic::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Ball::exact(Dyadic::from_i64(v))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Ball::exact(Dyadic::from_bigint(v))
    }

    /// Encloses the rational q; exact (radius zero) when q is dyadic.
    pub fn from_q(q: &Q, prec: u32) -> Self {
        let lo = Dyadic::from_q_dir(q, prec, false);
        let hi = Dyadic::from_q_dir(q, prec, true);
        Ball::from_endpoints(lo, hi)
    }

    pub fn from_endpoints(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "endpoints out of order");
        let mid = lo.add(&hi).mul_pow2(-1);
        let rad = hi.sub(&lo).mul_pow2(-1);
        Ball { mid, rad }
    }

    pub fn from_endpoints_q(lo: &Q, hi: &Q, prec: u32) -> Self {
        Ball::from_endpoints(
            Dyadic::from_q_dir(lo, prec, false),
            Dyadic::from_q_dir(hi, prec, true),
        )
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    /// Lower bound of the interval (outward by at most one ulp).
    pub fn inf(&self) -> Dyadic {
        self.mid.add_down_lazy(&self.rad.neg())
    }

    /// Upper bound of the interval (outward by at most one ulp).
    pub fn sup(&self) -> Dyadic {
        self.mid.add_up_lazy(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_q(&self, q: &Q) -> bool {
        self.inf().to_q() <= *q && *q <= self.sup().to_q()
    }

    pub fn contains_zero(&self) -> bool {
        self.inf().sign() <= 0 && self.sup().sign() >= 0
    }

    pub fn overlaps(&self, o: &Ball) -> bool {
        self.inf() <= o.sup() && o.inf() <= self.sup()
    }

    /// Round mid down to `prec` bits and absorb the shift into the radius.
    /// Containment is preserved; exact values within precision stay exact.
    fn rounded(mid: Dyadic, rad: Dyadic, prec: u32) -> Ball {
        // A midpoint drowned in the radius carries no information; collapsing
        // it to zero keeps exponent gaps (and alignment costs) bounded.
        if !mid.is_zero() && !rad.is_zero() && mid.msb_exp() < rad.msb_exp() - 2 * RAD_BITS as i64
        {
            let r = rad.add_up_lazy(&mid.abs()).round_dir(RAD_BITS, true);
            return Ball {
                mid: Dyadic::zero(),
                rad: r,
            };
        }
        let m = mid.round_dir(prec, false);
        let delta = mid.sub(&m); // >= 0, below one ulp of m
        let r = rad.add_up_lazy(&delta).round_dir(RAD_BITS, true);
        Ball { mid: m, rad: r }
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, o: &Ball, prec: u32) -> Ball {
        let (mid, err) = self.mid.add_lazy(&o.mid);
        let rad = self.rad.add_up_lazy(&o.rad).add_up_lazy(&err);
        Ball::rounded(mid, rad, prec)
    }

    pub fn sub(&self, o: &Ball, prec: u32) -> Ball {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Ball, prec: u32) -> Ball {
        let mid = self.mid.mul(&o.mid);
        let rad = self
            .mid
            .abs()
            .mul(&o.rad)
            .add_up_lazy(&o.mid.abs().mul(&self.rad))
            .add_up_lazy(&self.rad.mul(&o.rad));
        Ball::rounded(mid, rad, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
        }
    }

    /// None when the interval contains zero.
    pub fn inv(&self, prec: u32) -> Option<Ball> {
        let lo = self.inf();
        let hi = self.sup();
        if lo.sign() <= 0 && hi.sign() >= 0 {
            return None;
        }
        let one = Dyadic::one();
        let a = one.div_dir(&hi, prec, false);
        let b = one.div_dir(&lo, prec, true);
        Some(Ball::from_endpoints(a, b))
    }

    pub fn div(&self, o: &Ball, prec: u32) -> Option<Ball> {
        Some(self.mul(&o.inv(prec)?, prec))
    }

    pub fn abs(&self) -> Ball {
        let lo = self.inf();
        let hi = self.sup();
        if lo.sign() >= 0 {
            self.clone()
        } else if hi.sign() <= 0 {
            self.neg()
        } else {
            Ball::from_endpoints(Dyadic::zero(), lo.neg().max(hi))
        }
    }

    /// Square root of an interval known to describe a nonnegative quantity:
    /// a lower endpoint below zero (possible from outward rounding) is clamped.
    /// None when the whole interval is negative.
    pub fn sqrt_nonneg(&self, prec: u32) -> Option<Ball> {
        let hi = self.sup();
        if hi.sign() < 0 {
            return None;
        }
        let lo = self.inf();
        let lo = if lo.sign() < 0 { Dyadic::zero() } else { lo };
        Some(Ball::from_endpoints(
            lo.sqrt_dir(prec, false),
            hi.sqrt_dir(prec, true),
        ))
    }

    /// j-th root, same contract as sqrt_nonneg.
    pub fn nth_root_nonneg(&self, j: u32, prec: u32) -> Option<Ball> {
        let hi = self.sup();
        if hi.sign() < 0 {
            return None;
        }
        let lo = self.inf();
        let lo = if lo.sign() < 0 { Dyadic::zero() } else { lo };
        Some(Ball::from_endpoints(
            lo.nth_root_dir(j, prec, false),
            hi.nth_root_dir(j, prec, true),
        ))
    }

    pub fn pow_u(&self, k: u64, prec: u32) -> Ball {
        let mut acc = Ball::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            base = base.mul(&base, prec);
            k >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, k: i64, prec: u32) -> Option<Ball> {
        if k >= 0 {
            Some(self.pow_u(k as u64, prec))
        } else {
            self.pow_u(k.unsigned_abs(), prec).inv(prec)
        }
    }

    /// Natural logarithm; None unless the interval is strictly positive.
    pub fn ln(&self, prec: u32) -> Option<Ball> {
        let lo = self.inf();
        if lo.sign() <= 0 {
            return None;
        }
        let a = ln_dyadic(&lo, prec);
        let b = ln_dyadic(&self.sup(), prec);
        Some(Ball::from_endpoints(a.inf(), b.sup()))
    }

    pub fn hull(&self, o: &Ball) -> Ball {
        Ball::from_endpoints(self.inf().min(o.inf()), self.sup().max(o.sup()))
    }

    pub fn max(&self, o: &Ball) -> Ball {
        Ball::from_endpoints(self.inf().max(o.inf()), self.sup().max(o.sup()))
    }

    pub fn min(&self, o: &Ball) -> Ball {
        Ball::from_endpoints(self.inf().min(o.inf()), self.sup().min(o.sup()))
    }

    /// Widen the radius by `r` (used for truncation-error padding).
    pub fn pad(&self, r: Dyadic) -> Ball {
        assert!(r.sign() >= 0);
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add_up_lazy(&r).round_dir(RAD_BITS, true),
        }
    }

    /// Non-strict certified comparison: True means every point of self is <=
    /// every point of o; False means every point is >; else Undecided.
    pub fn le(&self, o: &Ball) -> Verdict {
        if self.sup() <= o.inf() {
            Verdict::True
        } else if self.inf() > o.sup() {
            Verdict::False
        } else {
            Verdict::Undecided
        }
    }

    pub fn lt(&self, o: &Ball) -> Verdict {
        if self.sup() < o.inf() {
            Verdict::True
        } else if self.inf() >= o.sup() {
            Verdict::False
        } else {
            Verdict::Undecided
        }
    }

    pub fn ge(&self, o: &Ball) -> Verdict {
        o.le(self)
    }

    pub fn gt(&self, o: &Ball) -> Verdict {
        o.lt(self)
    }

    /// Sign of the whole interval: Some(-1|0|1) when uniform, None when mixed.
    pub fn sign(&self) -> Option<i32> {
        let lo = self.inf().sign();
        let hi = self.sup().sign();
        if lo == hi {
            Some(lo)
        } else if lo > 0 {
            Some(1)
        } else if hi < 0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }
}

impl std::fmt::Display for Ball {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.rad.is_zero() {
            write!(f, "{}", self.mid)
        } else {
            write!(f, "[{} +/- {}]", self.mid.to_f64(), self.rad.to_f64())
        }
    }
}

/// Certified enclosure of ln(x) for a positive dyadic x.
///
/// Writes x = m * 2^E with m in [1,2) and uses ln(m) = 2*atanh((m-1)/(m+1)),
/// where the argument lies in [0, 1/3]; ln 2 comes from the same series at 1/3.
pub fn ln_dyadic(x: &Dyadic, prec: u32) -> Ball {
    assert!(x.sign() > 0, "ln of nonpositive dyadic");
    let w = prec + 16;
    let bits = x.bits();
    let m = Dyadic::new(x.mant().clone(), -(bits as i64 - 1));
    let e = x.exp() + bits as i64 - 1;
    let num = m.sub(&Dyadic::one());
    let den = m.add(&Dyadic::one());
    let t = if num.is_zero() {
        Ball::zero()
    } else {
        Ball::from_endpoints(num.div_dir(&den, w, false), num.div_dir(&den, w, true))
    };
    let terms = prec / 2 + 8;
    let ln_m = if t.is_exact() && t.mid().is_zero() {
        Ball::zero()
    } else {
        atanh_small(&t, terms, w).mul_pow2(1)
    };
    if e == 0 {
        return ln_m;
    }
    let ln2 = ln2_ball(w);
    ln_m.add(&ln2.mul(&Ball::from_i64(e), w), w)
}

/// Certified ln 2 = 2 * atanh(1/3).
pub fn ln2_ball(prec: u32) -> Ball {
    let w = prec + 8;
    let one = Dyadic::one();
    let three = Dyadic::from_i64(3);
    let t = Ball::from_endpoints(one.div_dir(&three, w, false), one.div_dir(&three, w, true));
    atanh_small(&t, prec / 2 + 8, w).mul_pow2(1)
}

/// atanh by truncated series, valid for 0 <= t <= 1/2: the tail after `terms`
/// odd-power terms is below 2^(-2*terms) and is padded into the radius.
fn atanh_small(t: &Ball, terms: u32, prec: u32) -> Ball {
    assert!(t.inf().sign() >= 0);
    assert!(t.sup() <= Dyadic::new(BigInt::from(1), -1), "series argument too large");
    let t2 = t.mul(t, prec);
    let mut tp = t.clone();
    let mut sum = t.clone();
    for k in 1..terms {
        tp = tp.mul(&t2, prec);
        let odd = Dyadic::from_i64(2 * k as i64 + 1);
        let term = Ball::from_endpoints(
            tp.inf().max(Dyadic::zero()).div_dir(&odd, prec, false),
            tp.sup().div_dir(&odd, prec, true),
        );
        sum = sum.add(&term, prec);
    }
    sum.pad(Dyadic::new(BigInt::from(1), -(2 * terms as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_arithmetic_keeps_radius_zero() {
        let a = Ball::from_i64(3);
        let b = Ball::from_q(&q(7, 8), 64);
        assert!(b.is_exact());
        let c = a.mul(&b, 64).add(&Ball::from_i64(1), 64);
        assert!(c.is_exact());
        assert_eq!(c.mid().to_q(), q(29, 8));
    }

    #[test]
    fn equality_boundary_is_decidable_for_exact_values() {
        let two = Ball::from_i64(2);
        assert_eq!(two.le(&Ball::from_i64(2)), Verdict::True);
        assert_eq!(two.lt(&Ball::from_i64(2)), Verdict::False);
        assert_eq!(two.le(&Ball::from_i64(1)), Verdict::False);
    }

    #[test]
    fn inexact_input_is_enclosed() {
        let third = Ball::from_q(&q(1, 3), 50);
        assert!(!third.is_exact());
        assert!(third.contains_q(&q(1, 3)));
        assert!(third.sup().sub(&third.inf()).to_q() < q(1, 1 << 48));
    }

    #[test]
    fn sqrt_two_enclosure() {
        let s = Ball::from_i64(2).sqrt_nonneg(64).unwrap();
        // 1.41421356237309504880...
        assert!(s.contains_q(&q(141421356237, 100000000000)) || {
            // the rational above is below sqrt(2); containment of the truth:
            let sq = s.mul(&s, 80);
            sq.contains_q(&q(2, 1))
        });
        let sq = s.mul(&s, 80);
        assert!(sq.contains_q(&q(2, 1)));
        assert_eq!(s.lt(&Ball::from_q(&q(15, 10), 64)), Verdict::True);
        assert_eq!(s.gt(&Ball::from_q(&q(14, 10), 64)), Verdict::True);
    }

    #[test]
    fn exact_roots_stay_exact() {
        let four = Ball::from_i64(4).sqrt_nonneg(32).unwrap();
        assert!(four.is_exact());
        assert_eq!(four.mid().to_q(), q(2, 1));
        let cube = Ball::from_i64(27).nth_root_nonneg(3, 32).unwrap();
        assert!(cube.is_exact());
        assert_eq!(cube.mid().to_q(), q(3, 1));
    }

    #[test]
    fn division_rejects_zero_straddle() {
        let z = Ball::from_endpoints(Dyadic::from_i64(-1), Dyadic::from_i64(1));
        assert!(z.inv(32).is_none());
        let ok = Ball::from_i64(1).div(&Ball::from_i64(3), 64).unwrap();
        assert!(ok.contains_q(&q(1, 3)));
    }

    #[test]
    fn ln2_matches_reference() {
        let l = ln2_ball(64);
        // 0.69314718055994530941... lies strictly between these rationals
        let lo = Ball::from_q(&q(6931471805599453, 10000000000000000), 80);
        let hi = Ball::from_q(&q(6931471805599454, 10000000000000000), 80);
        assert_eq!(l.gt(&lo), Verdict::True);
        assert_eq!(l.lt(&hi), Verdict::True);
        assert!(l.sup().sub(&l.inf()).to_q() < q(1, 1 << 40));
    }

    #[test]
    fn ln_is_multiplicative_on_powers() {
        let eight = Ball::from_i64(8).ln(64).unwrap();
        let two = Ball::from_i64(2).ln(64).unwrap();
        let three_two = two.mul(&Ball::from_i64(3), 64);
        assert!(eight.overlaps(&three_two));
        assert_eq!(Ball::one().ln(64).unwrap().le(&Ball::zero()), Verdict::True);
        assert_eq!(Ball::one().ln(64).unwrap().ge(&Ball::zero()), Verdict::True);
    }

    #[test]
    fn ln_of_one_is_exactly_zero() {
        let z = Ball::one().ln(64).unwrap();
        assert!(z.is_exact());
        assert!(z.mid().is_zero());
    }

    #[test]
    fn pow_and_hull() {
        let b = Ball::from_q(&q(3, 2), 64);
        let p = b.pow_i(4, 64).unwrap();
        assert!(p.contains_q(&q(81, 16)));
        let n = b.pow_i(-2, 64).unwrap();
        assert!(n.contains_q(&q(4, 9)));
        let h = Ball::from_i64(1).hull(&Ball::from_i64(5));
        assert!(h.contains_q(&q(3, 1)));
    }
}
