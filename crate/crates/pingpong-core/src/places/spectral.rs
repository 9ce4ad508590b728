//! Certified operator norms, singular values, and spectral radii.
//!
//! At the archimedean place the operator norm is the square root of the top
//! eigenvalue of g^T g, isolated exactly by Sturm sequences; the spectral radius
//! of a characteristic polynomial is enclosed by Graeffe root-squaring carried
//! out in ball arithmetic. At a finite place both come out exactly: the norm is
//! the largest entry magnitude and the spectral radius is read off the Newton
//! polygon.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ball::Ball;
use super::dyadic::Dyadic;
use super::padic::{op_norm_p, val_q, PMag};
use super::{Mag, Place};
use crate::exact::poly::{isolate_real_roots, refine_root};
use crate::exact::{root_product_poly, QPoly, SMatrix};
use crate::Q;

/// A real root of a rational polynomial: a certified enclosure plus the exact
/// rational value when the root is rational and cheaply recognizable.
#[derive(Clone, Debug)]
pub struct RealRoot {
    pub enc: Ball,
    pub exact: Option<Q>,
    pub mult: usize,
}

/// Coefficient height (in bits) above which rational-root extraction via
/// factorization is skipped; isolation alone is always available.
const FACTOR_HEIGHT_BITS: u64 = 320;

fn poly_height_bits(f: &QPoly) -> u64 {
    let mut h = 0;
    for i in 0..=f.deg() {
        let c = f.coeff(i);
        h = h.max(c.numer().bits()).max(c.denom().bits());
    }
    h
}

/// All real roots of f, sorted by decreasing value, with multiplicities.
/// Rational roots of small-height polynomials come back exact.
pub fn real_roots_desc(f: &QPoly, prec: u32) -> Vec<RealRoot> {
    let mut out: Vec<RealRoot> = vec![];
    for (part, mult) in f.squarefree_decomposition() {
        if part.degree().unwrap_or(0) == 0 {
            continue;
        }
        let pieces: Vec<QPoly> = if poly_height_bits(&part) <= FACTOR_HEIGHT_BITS {
            crate::exact::factor(&part).into_iter().map(|(p, _)| p).collect()
        } else {
            vec![part.clone()]
        };
        for piece in pieces {
            if piece.degree() == Some(1) {
                // monic linear factor x + c: exact root -c
                let root = -(piece.coeff(0) / piece.coeff(1));
                out.push(RealRoot {
                    enc: Ball::from_q(&root, prec),
                    exact: Some(root),
                    mult,
                });
                continue;
            }
            for (a, b) in isolate_real_roots(&piece) {
                let (a, b) = refine_root(&piece, a, b, prec + 4);
                out.push(RealRoot {
                    enc: Ball::from_endpoints_q(&a, &b, prec + 4),
                    exact: if a == b { Some(a) } else { None },
                    mult,
                });
            }
        }
    }
    out.sort_by(|x, y| y.enc.mid().cmp(x.enc.mid()));
    out
}

/// A singular value: certified enclosure of the value itself, plus the exact
/// rational square (Gram eigenvalue) when available. The square is what exact
/// boundary comparisons should use.
#[derive(Clone, Debug)]
pub struct SingularValue {
    pub value: Ball,
    pub sq_exact: Option<Q>,
}

/// Largest singular value of g, as a certified enclosure.
pub fn op_norm_inf(g: &SMatrix, prec: u32) -> Ball {
    singular_values_inf(g, prec)
        .into_iter()
        .next()
        .expect("empty matrix")
        .value
}

/// All singular values of g, sorted descending, with multiplicity (length n).
pub fn singular_values_inf(g: &SMatrix, prec: u32) -> Vec<SingularValue> {
    let cp = g.gram().char_poly();
    let mut out: Vec<SingularValue> = vec![];
    for root in real_roots_desc(&cp, prec) {
        let value = root
            .enc
            .sqrt_nonneg(prec)
            .expect("negative Gram eigenvalue");
        for _ in 0..root.mult {
            out.push(SingularValue {
                value: value.clone(),
                sq_exact: root.exact.clone(),
            });
        }
    }
    assert_eq!(out.len(), g.n, "Gram spectrum has non-real eigenvalues");
    out
}

/// Operator norm at an arbitrary place.
pub fn op_norm_at(g: &SMatrix, place: Place, prec: u32) -> Mag {
    match place {
        Place::Infinity => Mag::Real(op_norm_inf(g, prec)),
        Place::Finite(p) => Mag::Padic(op_norm_p(g, p)),
    }
}

/// Largest root modulus of a polynomial, certified, via Graeffe root-squaring
/// with ball coefficients. The returned enclosure has relative width about
/// 2^(-rel_bits) until the exponent ceiling kicks in (see below); exact zero
/// (all roots zero) is returned exactly, and integer lower bounds such as 1
/// survive exactly when the arithmetic is exact. Callers needing unbounded
/// precision on matrices should prefer `lambda_sq_inf`, which isolates the
/// squared modulus as an exact real root instead.
pub fn max_root_abs_inf(f: &QPoly, rel_bits: u32) -> Ball {
    let n = f.degree().expect("zero polynomial");
    assert!(n >= 1, "constant polynomial has no roots");
    assert!(n <= 64, "degree out of supported range");
    let monic = f.monic();
    // strip roots at zero; they never realize the maximum unless all roots vanish
    let k0 = (0..=n)
        .find(|&i| !monic.coeff(i).is_zero())
        .expect("monic polynomial");
    if k0 == n {
        return Ball::zero();
    }
    let coeffs: Vec<Q> = (k0..=n).map(|i| monic.coeff(i)).collect();
    let d = coeffs.len() - 1;

    let steps = rel_bits + 6;
    let w = 2 * steps + 64;
    let mut bf: Vec<Ball> = coeffs.iter().map(|c| Ball::from_q(c, w)).collect();
    // Coefficient magnitudes square with every step, so their dyadic exponents
    // double; stop early before they can leave the i64 range. The bracket
    // below is valid after any number of squarings, so an early stop only
    // widens the result (the relative width saturates near 2^-50 for roots
    // far from the unit circle at very large rel_bits).
    const EXP_CEILING: i64 = 1 << 60;
    let mut steps_done = 0u32;
    for _ in 0..steps {
        let peak = bf
            .iter()
            .flat_map(|c| [c.inf(), c.sup()])
            .filter(|e| !e.is_zero())
            .map(|e| e.msb_exp().abs())
            .max()
            .unwrap_or(0);
        if peak > EXP_CEILING {
            break;
        }
        bf = graeffe_step(&bf, w);
        steps_done += 1;
    }

    // Fujiwara-style bracket for the largest root of the squared-out polynomial:
    //   max_j (|c_{d-j}| / C(d,j))^(1/j)  <=  R  <=  2 * max_j |c_{d-j}|^(1/j)
    let mut upper = Dyadic::zero();
    let mut lower = Dyadic::zero();
    for j in 1..=d {
        let c = bf[d - j].abs();
        let hi = c.sup().nth_root_dir(j as u32, w, true);
        if hi > upper {
            upper = hi;
        }
        let lo_c = c.inf();
        if lo_c.sign() > 0 {
            let binom = Dyadic::from_bigint(binomial(d as u64, j as u64));
            let lo = lo_c
                .div_dir(&binom, w, false)
                .nth_root_dir(j as u32, w, false);
            if lo > lower {
                lower = lo;
            }
        }
    }
    let mut hi = upper.mul_pow2(1);
    let mut lo = lower;
    // undo the squarings actually performed
    for _ in 0..steps_done {
        lo = lo.sqrt_dir(w, false);
        hi = hi.sqrt_dir(w, true);
    }
    Ball::from_endpoints(lo, hi)
}

/// One Graeffe step: g(y) = (-1)^d f(sqrt(y)) f(-sqrt(y)), which squares all
/// the roots and preserves monicity.
fn graeffe_step(f: &[Ball], prec: u32) -> Vec<Ball> {
    let d = f.len() - 1;
    let mut even = vec![];
    let mut odd = vec![];
    for (i, c) in f.iter().enumerate() {
        if i % 2 == 0 {
            even.push(c.clone());
        } else {
            odd.push(c.clone());
        }
    }
    let e2 = ball_poly_mul(&even, &even, prec);
    let o2 = ball_poly_mul(&odd, &odd, prec);
    let mut out = vec![Ball::zero(); d + 1];
    for (i, c) in e2.into_iter().enumerate() {
        out[i] = out[i].add(&c, prec);
    }
    for (i, c) in o2.into_iter().enumerate() {
        out[i + 1] = out[i + 1].sub(&c, prec);
    }
    if d % 2 == 1 {
        for c in &mut out {
            *c = c.neg();
        }
    }
    out
}

fn ball_poly_mul(a: &[Ball], b: &[Ball], prec: u32) -> Vec<Ball> {
    let mut out = vec![Ball::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y, prec), prec);
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Valuations of the nonzero roots of f at p, with multiplicities, read off the
/// lower Newton polygon: a side of slope s carries (horizontal length) roots of
/// valuation -s. Returned sorted by increasing valuation (decreasing magnitude),
/// together with the number of roots equal to zero.
pub fn root_valuations_p(f: &QPoly, p: u64) -> (Vec<(Q, usize)>, usize) {
    let n = f.degree().expect("zero polynomial");
    let monic = f.monic();
    let k0 = (0..=n)
        .find(|&i| !monic.coeff(i).is_zero())
        .expect("monic polynomial");
    let zeros = k0;
    if k0 == n {
        return (vec![], zeros);
    }
    let pts: Vec<(i64, Q)> = (k0..=n)
        .filter_map(|i| {
            let c = monic.coeff(i);
            val_q(&c, p).map(|v| (i as i64, Q::from(BigInt::from(v))))
        })
        .collect();
    // lower convex hull, left to right
    let mut hull: Vec<(i64, Q)> = vec![];
    for pt in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // drop b when it lies on or above segment a->pt
            let lhs = (&b.1 - &a.1) * Q::from(BigInt::from(pt.0 - a.0));
            let rhs = (&pt.1 - &a.1) * Q::from(BigInt::from(b.0 - a.0));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut vals: Vec<(Q, usize)> = vec![];
    for win in hull.windows(2) {
        let (i1, v1) = &win[0];
        let (i2, v2) = &win[1];
        let len = (i2 - i1) as usize;
        let slope = (v2 - v1) / Q::from(BigInt::from(i2 - i1));
        vals.push((-slope, len));
    }
    // hull slopes increase, so valuations decrease; flip to increasing
    vals.reverse();
    (vals, zeros)
}

/// Largest root magnitude of f at p: p^(max Newton-polygon slope), exactly.
pub fn max_root_abs_p(f: &QPoly, p: u64) -> PMag {
    let (vals, _zeros) = root_valuations_p(f, p);
    match vals.first() {
        None => PMag::zero(p),
        Some((v, _)) => PMag::new(p, -v.clone()),
    }
}

/// Squared spectral radius of g at the archimedean place, as an isolated real
/// root: Lambda^2 is exactly the largest real root of the pairwise
/// root-product polynomial of the characteristic polynomial, so Sturm
/// isolation delivers an enclosure of any requested precision and an exact
/// rational value whenever there is one (including complex eigenvalue pairs
/// with rational modulus squared).
pub fn lambda_sq_inf(g: &SMatrix, rel_bits: u32) -> RealRoot {
    let h = root_product_poly(&g.char_poly());
    real_roots_desc(&h, rel_bits)
        .into_iter()
        .next()
        .expect("squared eigenvalue moduli are real roots")
}

/// Spectral radius of g at the archimedean place (max eigenvalue modulus).
pub fn lambda_inf(g: &SMatrix, rel_bits: u32) -> Ball {
    lambda_sq_inf(g, rel_bits)
        .enc
        .sqrt_nonneg(rel_bits)
        .expect("squared spectral radius is nonnegative")
}

/// Spectral radius of g at p, exact.
pub fn lambda_p(g: &SMatrix, p: u64) -> PMag {
    max_root_abs_p(&g.char_poly(), p)
}

pub fn lambda_at(g: &SMatrix, place: Place, rel_bits: u32) -> Mag {
    match place {
        Place::Infinity => Mag::Real(lambda_inf(g, rel_bits)),
        Place::Finite(p) => Mag::Padic(lambda_p(g, p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::places::Verdict;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn op_norm_of_unipotent_is_golden_ratio() {
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let nrm = op_norm_inf(&t, 64);
        // (1+sqrt(5))/2 = 1.6180339887...
        assert_eq!(nrm.gt(&Ball::from_q(&q(161803, 100000), 64)), Verdict::True);
        assert_eq!(nrm.lt(&Ball::from_q(&q(161804, 100000), 64)), Verdict::True);
        // norm of g and g^{-1} agree for this symmetric situation
        let ti = t.inverse().unwrap();
        assert!(op_norm_inf(&ti, 64).overlaps(&nrm));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let g = SMatrix::new(2, vec![q(3, 1), Q::zero(), Q::zero(), q(1, 3)]);
        let sv = singular_values_inf(&g, 64);
        assert_eq!(sv.len(), 2);
        // Gram eigenvalues 9 and 1/9 are recognized exactly
        assert_eq!(sv[0].sq_exact, Some(q(9, 1)));
        assert_eq!(sv[1].sq_exact, Some(q(1, 9)));
        assert!(sv[0].value.contains_q(&q(3, 1)));
        assert!(sv[1].value.contains_q(&q(1, 3)));
        let id = SMatrix::identity(3);
        for s in singular_values_inf(&id, 64) {
            assert_eq!(s.sq_exact, Some(Q::one()));
            assert!(s.value.is_exact() && s.value.mid().to_q() == Q::one());
        }
    }

    #[test]
    fn det_one_forces_norm_at_least_one() {
        for g in [
            SMatrix::from_i64(&[&[2, 1], &[1, 1]]),
            SMatrix::from_i64(&[&[1, -3], &[0, 1]]),
            SMatrix::new(2, vec![q(1, 2), Q::zero(), q(5, 1), q(2, 1)]),
        ] {
            let nrm = op_norm_inf(&g, 64);
            assert_ne!(nrm.ge(&Ball::one()), Verdict::False);
            assert_eq!(nrm.gt(&Ball::from_q(&q(99, 100), 64)), Verdict::True);
        }
    }

    #[test]
    fn norm_is_submultiplicative() {
        let g = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let h = SMatrix::from_i64(&[&[1, 4], &[-1, -3]]);
        let lhs = op_norm_inf(&g.mul(&h), 64);
        let rhs = op_norm_inf(&g, 64).mul(&op_norm_inf(&h, 64), 64);
        assert_ne!(lhs.le(&rhs), Verdict::False);
    }

    #[test]
    fn graeffe_encloses_dominant_eigenvalue() {
        // char poly of [[2,1],[1,1]]: x^2 - 3x + 1, roots (3 +/- sqrt5)/2
        let f = QPoly::new(vec![q(1, 1), q(-3, 1), q(1, 1)]);
        let r = max_root_abs_inf(&f, 24);
        // (3+sqrt5)/2 = 2.61803398...
        assert_eq!(r.gt(&Ball::from_q(&q(261802, 100000), 64)), Verdict::True);
        assert_eq!(r.lt(&Ball::from_q(&q(261804, 100000), 64)), Verdict::True);
    }

    #[test]
    fn graeffe_handles_degenerate_spectra() {
        // nilpotent: all roots zero, exact
        let nil = SMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let r = lambda_inf(&nil, 16);
        assert!(r.is_exact() && r.mid().is_zero());
        // unipotent: spectral radius 1 with an exact lower endpoint
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let r = lambda_inf(&t, 24);
        assert!(r.contains_q(&Q::one()));
        assert_eq!(r.inf(), Dyadic::one());
        assert_eq!(r.lt(&Ball::from_q(&q(1000001, 1000000), 64)), Verdict::True);
    }

    #[test]
    fn isolation_route_reaches_high_precision() {
        // Graeffe exponents double per squaring and its bracket saturates near
        // fifty bits; the root-isolation route must keep tightening instead.
        let g = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let lam = lambda_inf(&g, 200);
        // phi^2 = 2.618033988749894848..., pinned to 10^-18
        let lo = q(2618033988749894848, 1000000000000000000);
        let hi = q(2618033988749894849, 1000000000000000000);
        assert_eq!(lam.gt(&Ball::from_q(&lo, 80)), Verdict::True);
        assert_eq!(lam.lt(&Ball::from_q(&hi, 80)), Verdict::True);
        // the Graeffe bracket stays sound (if wide) at the same request
        let r = max_root_abs_inf(&g.char_poly(), 200);
        assert_eq!(r.gt(&Ball::from_q(&q(261802, 100000), 64)), Verdict::True);
        assert_eq!(r.lt(&Ball::from_q(&q(261804, 100000), 64)), Verdict::True);
    }

    #[test]
    fn complex_pairs_expose_rational_squared_radius() {
        // rotation by pi/2: eigenvalues +-i, squared radius exactly 1
        let g = SMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let root = lambda_sq_inf(&g, 32);
        assert_eq!(root.exact, Some(Q::one()));
        // companion of x^2 - 3x + 1: squared radius phi^4 is irrational
        let h = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert!(lambda_sq_inf(&h, 32).exact.is_none());
    }

    #[test]
    fn spectral_radius_bounded_by_norm() {
        for g in [
            SMatrix::from_i64(&[&[2, 1], &[1, 1]]),
            SMatrix::from_i64(&[&[3, 1], &[2, 1]]),
        ] {
            let lam = lambda_inf(&g, 24);
            let nrm = op_norm_inf(&g, 64);
            assert_ne!(lam.le(&nrm), Verdict::False);
        }
    }

    #[test]
    fn newton_polygon_valuations() {
        // diag(4, 1, 1/4) at p=2: valuations 2, 0, -2
        let g = SMatrix::new(
            3,
            vec![
                q(4, 1),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                Q::one(),
                Q::zero(),
                Q::zero(),
                Q::zero(),
                q(1, 4),
            ],
        );
        let (vals, zeros) = root_valuations_p(&g.char_poly(), 2);
        assert_eq!(zeros, 0);
        let flat: Vec<(Q, usize)> = vals;
        assert_eq!(
            flat,
            vec![(q(-2, 1), 1), (q(0, 1), 1), (q(2, 1), 1)]
        );
        assert_eq!(lambda_p(&g, 2).to_q().unwrap(), q(4, 1));
    }

    #[test]
    fn padic_spectral_radius_oracle() {
        // diag(2, 1/2): char x^2 - (5/2)x + 1, Lambda_2 = |1/2|_2 = 2
        let g = SMatrix::new(2, vec![q(2, 1), Q::zero(), Q::zero(), q(1, 2)]);
        assert_eq!(lambda_p(&g, 2).to_q().unwrap(), q(2, 1));
        // at p=3 both eigenvalues are units
        assert!(lambda_p(&g, 3).is_one());
        // unipotent: eigenvalues 1, radius exactly 1
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(lambda_p(&t, 2).is_one());
        // nilpotent part: char poly x^2 -> zero magnitude
        let nil = SMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(max_root_abs_p(&nil.char_poly(), 2).is_zero());
    }

    #[test]
    fn fractional_newton_slope() {
        // x^2 - 2: roots have valuation 1/2 at p=2
        let f = QPoly::new(vec![q(-2, 1), Q::zero(), Q::one()]);
        let (vals, _) = root_valuations_p(&f, 2);
        assert_eq!(vals, vec![(q(1, 2), 2)]);
        let lam = max_root_abs_p(&f, 2);
        assert_eq!(*lam.exp().unwrap(), q(-1, 2));
        // |sqrt 2|_2 = 2^(-1/2): ball squares to 1/2
        let b = lam.to_ball(64);
        assert!(b.mul(&b, 80).contains_q(&q(1, 2)));
    }

    #[test]
    fn eigenvalue_power_consistency() {
        let g = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let lam1 = lambda_inf(&g, 24);
        let lam3 = lambda_inf(&g.pow(3), 24);
        let cubed = lam1.pow_i(3, 80).unwrap();
        assert!(lam3.overlaps(&cubed));
        // and exactly at p: diag(2,1/2) cubed has Lambda_2 = 8
        let h = SMatrix::new(2, vec![q(2, 1), Q::zero(), Q::zero(), q(1, 2)]);
        assert_eq!(lambda_p(&h.pow(3), 2).to_q().unwrap(), q(8, 1));
    }
}
