//! Exact magnitudes at finite places.
//!
//! For rational inputs everything p-adic is exactly computable: valuations are
//! integers, norms of vectors and matrices are powers of p, and spectral radii
//! (via Newton polygons) are powers of p with rational exponent. A magnitude is
//! therefore stored as the exponent itself and compared exactly — the p-adic
//! side of the certification never needs interval arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::Ball;
use crate::exact::SMatrix;
use crate::Q;

/// p-adic valuation of a nonzero integer.
pub fn val_bigint(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; None for zero (valuation +infinity).
pub fn val_q(q: &Q, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(val_bigint(q.numer(), p) as i64 - val_bigint(q.denom(), p) as i64)
}

/// A magnitude at the place p: either 0 or p^exp with exp rational.
/// |x|_p = p^(-v_p(x)), so exp = -v_p(x) for rational x; Newton-polygon
/// spectral radii contribute genuinely fractional exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMag {
    p: u64,
    exp: Option<Q>,
}

impl PMag {
    pub fn new(p: u64, exp: Q) -> Self {
        assert!(p >= 2);
        PMag { p, exp: Some(exp) }
    }

    pub fn zero(p: u64) -> Self {
        PMag { p, exp: None }
    }

    pub fn one(p: u64) -> Self {
        PMag {
            p,
            exp: Some(Q::zero()),
        }
    }

    pub fn from_q(x: &Q, p: u64) -> Self {
        match val_q(x, p) {
            None => PMag::zero(p),
            Some(v) => PMag {
                p,
                exp: Some(Q::from(BigInt::from(-v))),
            },
        }
    }

    pub fn place(&self) -> u64 {
        self.p
    }

    /// Exponent e with |x| = p^e; None encodes the zero magnitude.
    pub fn exp(&self) -> Option<&Q> {
        self.exp.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.exp.is_none()
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.exp, Some(e) if e.is_zero())
    }

    pub fn mul(&self, o: &PMag) -> PMag {
        assert_eq!(self.p, o.p, "mixed places");
        match (&self.exp, &o.exp) {
            (Some(a), Some(b)) => PMag {
                p: self.p,
                exp: Some(a + b),
            },
            _ => PMag::zero(self.p),
        }
    }

    pub fn recip(&self) -> PMag {
        PMag {
            p: self.p,
            exp: Some(-self.exp.clone().expect("reciprocal of zero magnitude")),
        }
    }

    pub fn pow_i(&self, k: i64) -> PMag {
        match &self.exp {
            None => {
                assert!(k > 0, "zero magnitude to a nonpositive power");
                PMag::zero(self.p)
            }
            Some(e) => PMag {
                p: self.p,
                exp: Some(e * Q::from(BigInt::from(k))),
            },
        }
    }

    /// j-th root: divides the exponent.
    pub fn nth_root(&self, j: u32) -> PMag {
        assert!(j >= 1);
        match &self.exp {
            None => PMag::zero(self.p),
            Some(e) => PMag {
                p: self.p,
                exp: Some(e / Q::from(BigInt::from(j))),
            },
        }
    }

    /// Exact value as a rational — only for integer exponents.
    pub fn to_q(&self) -> Option<Q> {
        match &self.exp {
            None => Some(Q::zero()),
            Some(e) => {
                if !e.denom().is_one() {
                    return None;
                }
                let k = e.numer().to_i64()?;
                let pw = BigInt::from(self.p).pow(k.unsigned_abs() as u32);
                Some(if k >= 0 {
                    Q::from(pw)
                } else {
                    Q::new(BigInt::one(), pw)
                })
            }
        }
    }

    /// Exact comparison of this magnitude against a nonnegative rational,
    /// via cross-powering: p^(a/b) vs q  <=>  p^a vs q^b.
    pub fn cmp_q(&self, q: &Q) -> Ordering {
        assert!(!q.is_negative(), "magnitudes compare against nonnegative rationals");
        match &self.exp {
            None => {
                if q.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Less
                }
            }
            Some(e) => {
                if q.is_zero() {
                    return Ordering::Greater;
                }
                let a = e.numer().to_i64().expect("magnitude exponent out of range");
                let b = e
                    .denom()
                    .to_i64()
                    .expect("magnitude exponent denominator out of range");
                let pw = BigInt::from(self.p).pow(a.unsigned_abs() as u32);
                let lhs = if a >= 0 {
                    Q::from(pw)
                } else {
                    Q::new(BigInt::one(), pw)
                };
                let qb = Q::new(q.numer().pow(b as u32), q.denom().pow(b as u32));
                lhs.cmp(&qb)
            }
        }
    }

    /// Certified real enclosure of p^exp, for cross-place comparisons.
    pub fn to_ball(&self, prec: u32) -> Ball {
        let Some(e) = &self.exp else {
            return Ball::zero();
        };
        let a = e
            .numer()
            .to_i64()
            .expect("magnitude exponent out of range");
        let b = e.denom().to_u32().expect("magnitude exponent denominator out of range");
        let base = Ball::from_bigint(BigInt::from(self.p).pow(a.unsigned_abs() as u32));
        let rooted = if b == 1 {
            base
        } else {
            base.nth_root_nonneg(b, prec).unwrap()
        };
        if a >= 0 {
            rooted
        } else {
            rooted.inv(prec).unwrap()
        }
    }
}

impl PartialOrd for PMag {
    fn partial_cmp(&self, o: &PMag) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for PMag {
    fn cmp(&self, o: &PMag) -> Ordering {
        assert_eq!(self.p, o.p, "mixed places");
        match (&self.exp, &o.exp) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(b),
        }
    }
}

impl std::fmt::Display for PMag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.exp {
            None => write!(f, "0"),
            Some(e) => {
                if e.is_zero() {
                    write!(f, "1")
                } else {
                    write!(f, "{}^({})", self.p, e)
                }
            }
        }
    }
}

/// Max-norm of a rational vector at p.
pub fn vec_norm_p(v: &[Q], p: u64) -> PMag {
    let mut out = PMag::zero(p);
    for x in v {
        out = out.max(PMag::from_q(x, p));
    }
    out
}

/// Operator norm of a rational matrix on (Q_p^n, max-norm): the largest
/// entry magnitude.
pub fn op_norm_p(g: &SMatrix, p: u64) -> PMag {
    let mut out = PMag::zero(p);
    for i in 0..g.n {
        for j in 0..g.n {
            out = out.max(PMag::from_q(g.at(i, j), p));
        }
    }
    out
}
