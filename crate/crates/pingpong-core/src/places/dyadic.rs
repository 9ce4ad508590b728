//! Dyadic rationals m * 2^e with exact arithmetic and directed rounding.
//!
//! These are the endpoints of certified real intervals. Every operation here is
//! either exact or explicitly rounded in a stated direction, so interval code
//! built on top never silently loses containment.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Q;

/// Leading-bit gap beyond which [`Dyadic::add_lazy`] drops the smaller operand
/// instead of aligning mantissas. Large enough that the substituted error bound
/// is far below any working precision, small enough that exact-path shifts
/// stay cheap.
const LAZY_GAP: i64 = 4096;

/// Value mant * 2^exp, kept canonical: mant odd or zero, and zero has exp 0.
/// Canonical form makes derived equality and hashing agree with value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        if d.mant.is_zero() {
            d.exp = 0;
        } else {
            let tz = d.mant.trailing_zeros().unwrap();
            if tz > 0 {
                d.mant >>= tz;
                d.exp += tz as i64;
            }
        }
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> i32 {
        match self.mant.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: if self.mant.is_zero() { 0 } else { self.exp },
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b) = if self.exp <= o.exp {
            (self, o)
        } else {
            (o, self)
        };
        let shifted: BigInt = &b.mant << (b.exp - a.exp) as u64;
        Dyadic::new(&a.mant + shifted, a.exp)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    /// Exponent of the most significant bit: |value| < 2^msb_exp. Zero input
    /// yields i64::MIN as a sentinel.
    pub fn msb_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    /// Addition that refuses to align operands across a huge exponent gap:
    /// when the leading bits are more than `LAZY_GAP` apart, returns the larger
    /// operand unchanged together with a one-bit error bound at the smaller
    /// operand's magnitude (so about 2^-LAZY_GAP relative to the result).
    /// Exact sums return a zero error; their alignment shift is bounded by
    /// the gap plus the mantissa widths.
    pub fn add_lazy(&self, o: &Dyadic) -> (Dyadic, Dyadic) {
        if self.is_zero() {
            return (o.clone(), Dyadic::zero());
        }
        if o.is_zero() {
            return (self.clone(), Dyadic::zero());
        }
        let (hi, lo) = if self.msb_exp() >= o.msb_exp() {
            (self, o)
        } else {
            (o, self)
        };
        if lo.msb_exp() <= hi.msb_exp() - LAZY_GAP {
            let err = Dyadic {
                mant: BigInt::one(),
                exp: lo.msb_exp(),
            };
            (hi.clone(), err)
        } else {
            (self.add(o), Dyadic::zero())
        }
    }

    /// Upper bound on self + o, avoiding huge alignments. When a term was
    /// dropped, the result is rounded up at `LAZY_GAP` bits and bumped by one
    /// ulp there, which dominates the dropped term without ever aligning
    /// across the gap.
    pub fn add_up_lazy(&self, o: &Dyadic) -> Dyadic {
        let (s, e) = self.add_lazy(o);
        if e.is_zero() {
            return s;
        }
        let r = s.round_dir(LAZY_GAP as u32, true);
        let ulp = Dyadic {
            mant: BigInt::one(),
            exp: r.msb_exp() - LAZY_GAP,
        };
        r.add(&ulp)
    }

    /// Lower bound on self + o, the mirror of [`Dyadic::add_up_lazy`].
    pub fn add_down_lazy(&self, o: &Dyadic) -> Dyadic {
        let (s, e) = self.add_lazy(o);
        if e.is_zero() {
            return s;
        }
        let r = s.round_dir(LAZY_GAP as u32, false);
        let ulp = Dyadic {
            mant: BigInt::one(),
            exp: r.msb_exp() - LAZY_GAP,
        };
        r.sub(&ulp)
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &o.mant,
            exp: self.exp + o.exp,
        }
    }

    /// Exact multiplication by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to at most `prec` significant bits. `up` rounds toward +inf,
    /// otherwise toward -inf. Values already within `prec` bits are returned
    /// unchanged, so exactness is preserved where possible.
    pub fn round_dir(&self, prec: u32, up: bool) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let drop = bits - prec as u64;
        // BigInt shr is arithmetic: floor division by 2^drop.
        let floor: BigInt = &self.mant >> drop;
        let exact = (&floor << drop) == self.mant;
        let m = if exact || !up { floor } else { floor + 1 };
        Dyadic::new(m, self.exp + drop as i64)
    }

    pub fn to_q(&self) -> Q {
        if self.exp >= 0 {
            Q::from(&self.mant << self.exp as u64)
        } else {
            Q::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Dyadic with ~`prec` significant bits on the chosen side of q.
    pub fn from_q_dir(q: &Q, prec: u32, up: bool) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom(); // > 0 in canonical BigRational
        let s = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if s >= 0 {
            (num << s as u64, den.clone())
        } else {
            (num.clone(), den << (-s) as u64)
        };
        let (fl, rem) = n.div_mod_floor(&d);
        let m = if rem.is_zero() || !up { fl } else { fl + 1 };
        Dyadic::new(m, -s)
    }

    /// Directed quotient self/o with ~`prec` significant bits. o must be nonzero.
    pub fn div_dir(&self, o: &Dyadic, prec: u32, up: bool) -> Dyadic {
        assert!(!o.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let s = prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64;
        let (n, d) = if s >= 0 {
            (&self.mant << s as u64, o.mant.clone())
        } else {
            (self.mant.clone(), &o.mant << (-s) as u64)
        };
        // div_mod_floor rounds toward -inf for either sign of divisor.
        let (fl, rem) = n.div_mod_floor(&d);
        let m = if rem.is_zero() || !up { fl } else { fl + 1 };
        Dyadic::new(m, self.exp - o.exp - s)
    }

    /// Directed square root of a nonnegative dyadic, ~`prec` significant bits.
    /// Exact square roots are returned exactly.
    pub fn sqrt_dir(&self, prec: u32, up: bool) -> Dyadic {
        assert!(self.sign() >= 0, "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut m = self.mant.clone();
        let mut e = self.exp;
        if e.rem_euclid(2) != 0 {
            m <<= 1u32;
            e -= 1;
        }
        let b = m.bits();
        let need = 2 * (prec as u64 + 2);
        let s = if b >= need { 0 } else { (need - b).div_ceil(2) };
        let scaled: BigInt = &m << (2 * s);
        let r = scaled.sqrt();
        let exact = &r * &r == scaled;
        let rr = if exact || !up { r } else { r + 1 };
        Dyadic::new(rr, e / 2 - s as i64)
    }

    /// Directed j-th root of a nonnegative dyadic. Exact roots exact.
    pub fn nth_root_dir(&self, j: u32, prec: u32, up: bool) -> Dyadic {
        assert!(j >= 1);
        assert!(self.sign() >= 0, "root of negative dyadic");
        if j == 1 {
            return self.clone();
        }
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut m = self.mant.clone();
        let mut e = self.exp;
        let r = e.rem_euclid(j as i64);
        if r != 0 {
            m <<= r as u64;
            e -= r;
        }
        let b = m.bits();
        let need = (j as u64) * (prec as u64 + 2);
        let s = if b >= need { 0 } else { (need - b).div_ceil(j as u64) };
        let scaled: BigInt = &m << (j as u64 * s);
        let root = scaled.nth_root(j);
        let exact = root.pow(j) == scaled;
        let rr = if exact || !up { root } else { root + 1 };
        Dyadic::new(rr, e / j as i64 - s as i64)
    }

    /// Lossy conversion for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits() as i64;
        if bits <= 52 {
            let m = self.mant.to_f64().unwrap_or(f64::NAN);
            return m * pow2_f64(self.exp);
        }
        // Keep the top 53 bits and fold the rest into the exponent.
        let drop = bits - 53;
        let top: BigInt = &self.mant >> drop as u64;
        let m = top.to_f64().unwrap_or(f64::NAN);
        m * pow2_f64(self.exp + drop)
    }
}

fn pow2_f64(e: i64) -> f64 {
    if e > 2000 {
        f64::INFINITY
    } else if e < -2000 {
        0.0
    } else {
        (2.0f64).powi(e as i32)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Dyadic) -> Ordering {
        let s = self.sign();
        match s.cmp(&o.sign()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if s == 0 {
            return Ordering::Equal;
        }
        // Same sign: decide by magnitude order of the leading bit when possible,
        // so values with wildly different exponents never get aligned.
        let (ma, mb) = (self.msb_exp(), o.msb_exp());
        if ma != mb {
            let ord = ma.cmp(&mb);
            return if s > 0 { ord } else { ord.reverse() };
        }
        self.sub(o).sign().cmp(&0)
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d(8, 0), d(1, 3));
        assert_eq!(d(12, -2), d(3, 0));
        assert_eq!(d(0, 17), Dyadic::zero());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = d(3, -2); // 0.75
        let b = d(5, -3); // 0.625
        assert_eq!(a.add(&b), d(11, -3));
        assert_eq!(a.sub(&b), d(1, -3));
        assert_eq!(a.mul(&b), d(15, -5));
        assert_eq!(a.mul_pow2(3), d(3, 1));
    }

    #[test]
    fn ordering_is_by_value() {
        assert!(d(1, 2) > d(3, 0)); // 4 > 3
        assert!(d(-1, 10) < d(1, -10));
        assert!(d(7, -3) < d(1, 0));
        assert_eq!(d(4, -2).cmp(&d(1, 0)), Ordering::Equal);
    }

    #[test]
    fn directed_rounding_brackets() {
        let v = d(0b101011, 0); // 43, 6 bits
        let lo = v.round_dir(3, false);
        let hi = v.round_dir(3, true);
        assert!(lo <= v && v <= hi);
        assert_eq!(lo, d(40, 0)); // 101 << 3
        assert_eq!(hi, d(48, 0)); // 110 << 3
        // exact fit returns unchanged
        assert_eq!(v.round_dir(6, true), v);
    }

    #[test]
    fn from_q_brackets_value() {
        let third = Q::new(BigInt::from(1), BigInt::from(3));
        let lo = Dyadic::from_q_dir(&third, 30, false);
        let hi = Dyadic::from_q_dir(&third, 30, true);
        assert!(lo.to_q() < third && third < hi.to_q());
        assert!(hi.sub(&lo).to_q() < Q::new(BigInt::from(1), BigInt::from(1u64 << 30)));
        // dyadic rationals convert exactly
        let q = Q::new(BigInt::from(7), BigInt::from(16));
        assert_eq!(Dyadic::from_q_dir(&q, 10, false), d(7, -4));
        assert_eq!(Dyadic::from_q_dir(&q, 10, true), d(7, -4));
    }

    #[test]
    fn division_directed() {
        let one = Dyadic::one();
        let three = d(3, 0);
        let lo = one.div_dir(&three, 20, false);
        let hi = one.div_dir(&three, 20, true);
        assert!(lo.to_q() < Q::new(BigInt::from(1), BigInt::from(3)));
        assert!(hi.to_q() > Q::new(BigInt::from(1), BigInt::from(3)));
        // exact division stays exact
        assert_eq!(d(3, 0).div_dir(&d(1, 1), 8, false), d(3, -1));
        assert_eq!(d(3, 0).div_dir(&d(1, 1), 8, true), d(3, -1));
    }

    #[test]
    fn sqrt_directed_and_exact() {
        let lo = d(2, 0).sqrt_dir(40, false);
        let hi = d(2, 0).sqrt_dir(40, true);
        assert!(lo.mul(&lo).to_q() < Q::from(BigInt::from(2)));
        assert!(hi.mul(&hi).to_q() > Q::from(BigInt::from(2)));
        assert_eq!(d(9, 2).sqrt_dir(16, false), d(6, 0));
        assert_eq!(d(9, 2).sqrt_dir(16, true), d(6, 0));
        assert_eq!(d(1, -2).sqrt_dir(16, true), d(1, -1));
    }

    #[test]
    fn nth_root_directed_and_exact() {
        assert_eq!(d(27, 0).nth_root_dir(3, 16, false), d(3, 0));
        assert_eq!(d(27, 0).nth_root_dir(3, 16, true), d(3, 0));
        assert_eq!(d(1, 6).nth_root_dir(3, 16, true), d(1, 2));
        let lo = d(5, 0).nth_root_dir(3, 30, false);
        let hi = d(5, 0).nth_root_dir(3, 30, true);
        let cube = |x: &Dyadic| x.mul(x).mul(x);
        assert!(cube(&lo).to_q() < Q::from(BigInt::from(5)));
        assert!(cube(&hi).to_q() > Q::from(BigInt::from(5)));
    }
}
