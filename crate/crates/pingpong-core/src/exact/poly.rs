//! Exact univariate polynomials over Q: arithmetic, gcd, squarefree decomposition,
//! Sturm-based real root isolation, cyclotomics.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Q;

fn q_zero() -> Q {
    Q::zero()
}

fn q_i64(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Polynomial over Q, `coeffs[i]` is the coefficient of x^i; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<Q>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        QPoly::new(vec![c])
    }

    /// x^k
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![q_zero(); k + 1];
        c[k] = Q::one();
        QPoly { coeffs: c }
    }

    /// x - r
    pub fn linear_root(r: &Q) -> Self {
        QPoly::new(vec![-r.clone(), Q::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| q_i64(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn leading(&self) -> &Q {
        self.coeffs.last().expect("leading coeff of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(q_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) + other.coeff(i));
        }
        QPoly::new(c)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) - other.coeff(i));
        }
        QPoly::new(c)
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![q_zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }

    pub fn scale(&self, s: &Q) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn divrem(&self, div: &QPoly) -> (QPoly, QPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.deg();
        let lead_inv = Q::one() / div.leading().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![q_zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] * &lead_inv;
            if !c.is_zero() {
                for j in 0..dd {
                    let t = &c * &div.coeffs[j];
                    rem[i - dd + j] -= t;
                }
            }
            rem[i] = q_zero();
            quot[i - dd] = c;
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, div: &QPoly) -> QPoly {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q_i64(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let inv = Q::one() / self.leading().clone();
        self.scale(&inv)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic_or_zero();
        }
        a.monic_or_zero()
    }

    fn monic_or_zero(&self) -> QPoly {
        if self.is_zero() {
            QPoly::zero()
        } else {
            self.monic()
        }
    }

    pub fn is_squarefree(&self) -> bool {
        if self.degree().unwrap_or(0) <= 1 {
            return true;
        }
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Monic squarefree part (product of distinct irreducible factors).
    pub fn squarefree_part(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.monic()
        } else {
            self.div_exact(&g).monic()
        }
    }

    /// Yun squarefree decomposition: returns (g_i, i) with self ~ prod g_i^i, g_i squarefree.
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, usize)> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        if a0.degree() == Some(0) {
            return vec![(f, 1)];
        }
        let mut out = vec![];
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut i = 1;
        loop {
            let d = c.sub(&b.derivative());
            if d.is_zero() {
                if b.degree().unwrap_or(0) > 0 {
                    out.push((b.monic(), i));
                }
                break;
            }
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_exact(&g);
            c = d.div_exact(&g);
            i += 1;
            if b.degree() == Some(0) {
                break;
            }
        }
        out
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = q_zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Substitute x -> s*x (roots get divided by s).
    pub fn scale_var(&self, s: &Q) -> QPoly {
        let mut pow = Q::one();
        let mut c = Vec::with_capacity(self.coeffs.len());
        for coeff in &self.coeffs {
            c.push(coeff * &pow);
            pow *= s;
        }
        QPoly::new(c)
    }

    /// Composition self(other(x)); used for small compositions only.
    pub fn compose(&self, other: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    /// Clear denominators and content: primitive integer coefficients, positive leading.
    pub fn primitive_z(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let mut zs: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for z in &zs {
            g = num_integer::gcd(g, z.clone());
        }
        if !g.is_zero() && !g.is_one() {
            for z in zs.iter_mut() {
                *z = &*z / &g;
            }
        }
        if zs.last().map_or(false, |l| l.is_negative()) {
            for z in zs.iter_mut() {
                *z = -&*z;
            }
        }
        zs
    }

    /// Cauchy bound: every complex root has |z| <= 1 + max |c_i / c_n|.
    pub fn root_bound(&self) -> Q {
        let n = self.deg();
        let lead = self.leading();
        let mut m = q_zero();
        for c in &self.coeffs[..n] {
            let r = (c / lead).abs();
            if r > m {
                m = r;
            }
        }
        m + Q::one()
    }
}

/// k-th cyclotomic polynomial, computed by exact division of x^k - 1.
pub fn cyclotomic(k: u64) -> QPoly {
    assert!(k >= 1);
    let mut num = QPoly::monomial(k as usize).sub(&QPoly::one());
    for d in 1..k {
        if k % d == 0 {
            num = num.div_exact(&cyclotomic(d));
        }
    }
    num
}

/// Sign of a rational, as -1/0/1.
fn sgn(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm chain of a squarefree polynomial.
pub struct SturmChain {
    chain: Vec<QPoly>,
}

impl SturmChain {
    pub fn new(p: &QPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Q) -> usize {
        let mut count = 0;
        let mut prev = 0;
        for p in &self.chain {
            let s = sgn(&p.eval(x));
            if s != 0 {
                if prev != 0 && s != prev {
                    count += 1;
                }
                prev = s;
            }
        }
        count
    }

    /// Number of distinct real roots in (a, b]; requires a < b, p(a) != 0, p(b) != 0
    /// for exactness at the endpoints (we only call it on non-root endpoints).
    pub fn count_in(&self, a: &Q, b: &Q) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Monic polynomial of degree n^2 whose roots are the pairwise products
/// lambda_i * lambda_j (all ordered pairs, with multiplicity) of the roots of
/// `f`, a polynomial of degree n >= 1. The k-th power sum of the product roots
/// is the square of the k-th power sum of f's roots, so Newton's identities in
/// both directions keep the whole computation in Q.
///
/// Since complex roots of a rational polynomial come in conjugate pairs, every
/// squared root modulus lambda * conj(lambda) is a real root of the result,
/// and the largest real root is exactly the squared maximal modulus.
pub fn root_product_poly(f: &QPoly) -> QPoly {
    let n = f.degree().expect("zero polynomial has no roots");
    assert!(n >= 1, "constant polynomial has no roots");
    let monic = f.monic();
    let m = n * n;
    // a[k] is the coefficient of x^(n-k); a[0] = 1.
    let a: Vec<Q> = (0..=n).map(|k| monic.coeff(n - k)).collect();
    // Power sums p_k of f's roots, k = 1..=m (index 0 unused).
    let mut p: Vec<Q> = vec![q_zero(); m + 1];
    for k in 1..=m {
        let mut s = if k <= n {
            -(q_i64(k as i64) * &a[k])
        } else {
            q_zero()
        };
        for i in 1..=k.saturating_sub(1).min(n) {
            s -= &a[i] * &p[k - i];
        }
        p[k] = s;
    }
    // Elementary symmetric functions e_k of the product roots, from the squared
    // power sums: k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i^2.
    let mut e: Vec<Q> = vec![q_zero(); m + 1];
    e[0] = Q::one();
    for k in 1..=m {
        let mut s = q_zero();
        for i in 1..=k {
            let term = &e[k - i] * &(&p[i] * &p[i]);
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        e[k] = s / q_i64(k as i64);
    }
    // coefficient of x^(m-k) is (-1)^k e_k
    let mut coeffs = vec![q_zero(); m + 1];
    for (k, ek) in e.into_iter().enumerate() {
        coeffs[m - k] = if k % 2 == 0 { ek } else { -ek };
    }
    QPoly::new(coeffs)
}

/// Isolating intervals for all real roots of `p` (not necessarily squarefree; isolation
/// runs on the squarefree part). Each returned (a, b) satisfies a <= b and contains
/// exactly one real root; a == b means the root is the rational a itself. Intervals are
/// sorted and pairwise disjoint, with p nonzero at all endpoints of open intervals.
pub fn isolate_real_roots(p: &QPoly) -> Vec<(Q, Q)> {
    let sf = p.squarefree_part();
    if sf.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    let chain = SturmChain::new(&sf);
    let bound = sf.root_bound();
    let lo = -bound.clone() - Q::one();
    let hi = bound + Q::one();
    // Endpoints are strictly outside the root bound, so sf is nonzero there.
    debug_assert!(!sf.eval(&lo).is_zero() && !sf.eval(&hi).is_zero());
    let mut out = vec![];
    let mut stack = vec![];
    let total = chain.count_in(&lo, &hi);
    if total == 0 {
        return out;
    }
    stack.push((lo.clone(), hi.clone(), total));
    let two = q_i64(2);
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / &two;
        if sf.eval(&mid).is_zero() {
            // Bisection hit a rational root; record it and recurse on punctured sides
            // so Sturm endpoint counts stay exact.
            out.push((mid.clone(), mid.clone()));
            let mut eps = smallest_gap_guard(&sf, &mid);
            // keep the punctured sides inside (a, b)
            while eps >= &b - &mid || eps >= &mid - &a {
                eps = eps / &two;
            }
            let left = chain.count_in(&a, &(&mid - &eps));
            let right = chain.count_in(&(&mid + &eps), &b);
            stack.push((a, &mid - &eps, left));
            stack.push((&mid + &eps, b, right));
            continue;
        }
        let left = chain.count_in(&a, &mid);
        stack.push((a, mid.clone(), left));
        stack.push((mid, b, count - left));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// A width below half the distance from rational root `r` to any other root of sf:
/// shrink 1 by factor 2 until the interval (r-eps, r+eps) contains exactly one root.
fn smallest_gap_guard(sf: &QPoly, r: &Q) -> Q {
    // Divide out the known root and keep eps below the distance to the nearest
    // remaining root (checked by sign-based evaluation, exact).
    let reduced = sf.div_exact(&QPoly::linear_root(r));
    let chain = SturmChain::new(&reduced);
    let mut eps = Q::one();
    let two = q_i64(2);
    loop {
        let a = r - &eps;
        let b = r + &eps;
        if !reduced.eval(&a).is_zero() && !reduced.eval(&b).is_zero() && chain.count_in(&a, &b) == 0
        {
            return eps;
        }
        eps = eps / &two;
    }
}

/// Shrink an isolating interval of a squarefree polynomial by bisection until
/// b - a <= 2^-bits. Requires sign(p(a)) != sign(p(b)) or a == b.
pub fn refine_root(p: &QPoly, mut a: Q, mut b: Q, bits: u32) -> (Q, Q) {
    if a == b {
        return (a, b);
    }
    let sa = sgn(&p.eval(&a));
    let target = Q::new(BigInt::one(), BigInt::one() << bits);
    let two = q_i64(2);
    debug_assert!(sa != 0 && sgn(&p.eval(&b)) != 0 && sa != sgn(&p.eval(&b)));
    while &b - &a > target {
        let mid = (&a + &b) / &two;
        let sm = sgn(&p.eval(&mid));
        if sm == 0 {
            return (mid.clone(), mid);
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn divrem_roundtrip() {
        let a = QPoly::from_i64(&[2, 0, -3, 1, 5]);
        let b = QPoly::from_i64(&[1, 2, 1]);
        let (quot, rem) = a.divrem(&b);
        assert_eq!(quot.mul(&b).add(&rem), a);
        assert!(rem.degree().unwrap_or(0) < b.deg());
    }

    #[test]
    fn root_products_of_a_double_root() {
        // (x-1)^2: all four pairwise products are 1
        let f = QPoly::from_i64(&[1, -2, 1]);
        assert_eq!(root_product_poly(&f), QPoly::from_i64(&[1, -4, 6, -4, 1]));
    }

    #[test]
    fn root_products_of_the_golden_ratio_polynomial() {
        // x^2 - 3x + 1 has roots phi^2 and phi^-2; products are phi^4, 1, 1, phi^-4,
        // giving (x-1)^2 (x^2 - 7x + 1).
        let f = QPoly::from_i64(&[1, -3, 1]);
        assert_eq!(root_product_poly(&f), QPoly::from_i64(&[1, -9, 16, -9, 1]));
    }

    #[test]
    fn root_products_expose_rational_moduli_of_complex_roots() {
        // x^2 + 2 has roots +-i sqrt(2); the squared modulus 2 must be a root.
        let f = QPoly::from_i64(&[2, 0, 1]);
        let h = root_product_poly(&f);
        assert!(h.eval(&q(2, 1)).is_zero());
        assert!(h.eval(&q(-2, 1)).is_zero());
    }

    #[test]
    fn root_products_scale_out_the_leading_coefficient() {
        // 3x - 6 has the single root 2; the product polynomial is x - 4.
        let f = QPoly::from_i64(&[-6, 3]);
        assert_eq!(root_product_poly(&f), QPoly::from_i64(&[-4, 1]));
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = QPoly::from_i64(&[-1, 1]); // x - 1
        let g = QPoly::from_i64(&[1, 1]); // x + 1
        let a = f.mul(&g);
        let b = f.mul(&QPoly::from_i64(&[3, 1]));
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        let f = QPoly::from_i64(&[-1, 1]); // x-1
        let g = QPoly::from_i64(&[2, 1]); // x+2
        let p = f.mul(&f).mul(&g).mul(&g).mul(&g);
        let dec = p.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (f.monic(), 2));
        assert_eq!(dec[1], (g.monic(), 3));
    }

    #[test]
    fn cyclotomics_small() {
        assert_eq!(cyclotomic(1), QPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2), QPoly::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(3), QPoly::from_i64(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), QPoly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), QPoly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), QPoly::from_i64(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn isolates_roots_of_product() {
        // roots at -2, 1/3, 5, and a rational root hit exactly by a bisection midpoint: 0
        let p = QPoly::linear_root(&q(-2, 1))
            .mul(&QPoly::linear_root(&q(1, 3)))
            .mul(&QPoly::linear_root(&q(5, 1)))
            .mul(&QPoly::linear_root(&q(0, 1)));
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 4);
        let expected = [q(-2, 1), q(0, 1), q(1, 3), q(5, 1)];
        for ((a, b), e) in roots.iter().zip(expected.iter()) {
            assert!(a <= e && e <= b, "root {e} not in [{a}, {b}]");
        }
    }

    #[test]
    fn isolates_irrational_roots() {
        // x^2 - 2: roots +-sqrt(2)
        let p = QPoly::from_i64(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 2);
        let (a, b) = refine_root(&p, roots[1].0.clone(), roots[1].1.clone(), 40);
        // sqrt(2) = 1.41421356...
        assert!(a < b || p.eval(&a).is_zero());
        let lo = q(141421356, 100000000);
        let hi = q(141421357, 100000000);
        assert!(b >= lo && a <= hi, "sqrt2 interval [{a},{b}]");
    }

    #[test]
    fn counts_no_real_roots_for_positive_definite() {
        let p = QPoly::from_i64(&[1, 0, 1]); // x^2+1
        assert!(isolate_real_roots(&p).is_empty());
    }

    #[test]
    fn refines_to_width() {
        let p = QPoly::from_i64(&[-3, 0, 1]); // sqrt(3)
        let roots = isolate_real_roots(&p);
        let (a, b) = refine_root(&p, roots[1].0.clone(), roots[1].1.clone(), 64);
        assert!(&b - &a <= Q::new(BigInt::one(), BigInt::one() << 64));
        assert!(p.eval(&a) < Q::zero() && p.eval(&b) > Q::zero());
    }
}
