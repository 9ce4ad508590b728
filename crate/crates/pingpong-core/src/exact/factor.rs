//! Factorization of rational polynomials into monic irreducibles: squarefree
//! decomposition, then small-prime modular factoring (distinct-degree plus
//! equal-degree splitting), quadratic Hensel lifting, and subset recombination.
//! Randomness in the equal-degree split is a fixed-seed xorshift, so results
//! are deterministic.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::QPoly;
use crate::Q;

/// Monic irreducible factors with multiplicities, sorted for determinism.
pub fn factor(p: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out: Vec<(QPoly, usize)> = vec![];
    for (sf, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&sf) {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| {
        a.0.coeffs
            .len()
            .cmp(&b.0.coeffs.len())
            .then_with(|| a.0.coeffs.cmp(&b.0.coeffs))
    });
    out
}

/// Monic irreducible factors of a squarefree polynomial.
pub fn factor_squarefree(p: &QPoly) -> Vec<QPoly> {
    let deg = match p.degree() {
        None | Some(0) => return vec![],
        Some(d) => d,
    };
    if deg == 1 {
        return vec![p.monic()];
    }
    // Monicize by substitution: if f has leading c, then c^(n-1) f(y/c) is monic with
    // integer coefficients once f is primitive-integer; factors map back by y -> c x.
    let zcoeffs = p.primitive_z();
    let lead = zcoeffs.last().unwrap().clone();
    let n = zcoeffs.len() - 1;
    let mut monic = Vec::with_capacity(n + 1);
    // coefficient of y^i in c^(n-1) f(y/c) is f_i * c^(n-1-i)
    for (i, c) in zcoeffs.iter().enumerate() {
        let mut pw = BigInt::one();
        for _ in 0..(n - 1).saturating_sub(i.min(n - 1)) {
            pw *= &lead;
        }
        // for i = n this gives c^0 adjustments below
        monic.push(c * pw);
    }
    // fix top coefficient: f_n * c^(n-1-n) isn't integral; recompute directly
    monic[n] = BigInt::one();
    // monic[i] = f_i c^{n-1-i} for i < n is what the loop built (pw = c^{n-1-i})
    let factors_y = factor_monic_squarefree_z(&monic);
    let lead_q = Q::from_integer(lead);
    factors_y
        .iter()
        .map(|fz| {
            let fq = QPoly::new(fz.iter().map(|c| Q::from_integer(c.clone())).collect());
            // substitute y = c x, then renormalize monic
            fq.scale_var(&lead_q).monic()
        })
        .collect()
}

/// Factor a monic squarefree polynomial with integer coefficients.
fn factor_monic_squarefree_z(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n == 1 {
        return vec![f.to_vec()];
    }
    const PRIMES: [u64; 15] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let (p, modular) = PRIMES
        .iter()
        .find_map(|&p| {
            let fp = reduce_mod_p(f, p);
            if fp.len() != f.len() {
                return None; // cannot happen for monic f, kept for clarity
            }
            if !is_squarefree_mod_p(&fp, p) {
                return None;
            }
            Some((p, factor_mod_p(&fp, p)))
        })
        .expect("no usable small prime; input not squarefree?");
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    // Mignotte-style bound: any monic factor has |coeff| <= 2^n * ||f||_2.
    let norm2_sq: BigInt = f.iter().map(|c| c * c).sum();
    let mut bound = sqrt_ceil(&norm2_sq) + BigInt::one();
    bound <<= n;
    let two_bound: BigInt = &bound * 2 + 1;
    let mut modulus = BigInt::from(p);
    while modulus <= two_bound {
        modulus = &modulus * &modulus;
    }
    let lifted = hensel_tree_lift(f, &modular, p, &modulus);
    recombine(f.to_vec(), lifted, &modulus)
}

/// Subset recombination: find which products of lifted modular factors are true factors.
fn recombine(mut f: Vec<BigInt>, mut lifted: Vec<Vec<BigInt>>, modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let mut out = vec![];
    let mut k = 1usize;
    while 2 * k <= lifted.len() {
        let mut found = None;
        for combo in combinations(lifted.len(), k) {
            let mut prod = vec![BigInt::one()];
            for &i in &combo {
                prod = mul_mod(&prod, &lifted[i], modulus);
            }
            let cand = symmetric_rep(&prod, modulus);
            if let Some(quot) = divide_exact_z(&f, &cand) {
                found = Some((combo, cand, quot));
                break;
            }
        }
        match found {
            Some((combo, cand, quot)) => {
                out.push(cand);
                f = quot;
                let mut keep = vec![];
                for (i, fac) in lifted.drain(..).enumerate() {
                    if !combo.contains(&i) {
                        keep.push(fac);
                    }
                }
                lifted = keep;
                // retry same cardinality with the reduced factor list
            }
            None => k += 1,
        }
    }
    if f.len() > 1 {
        out.push(f);
    }
    out
}

/// All k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact division of integer polynomials (num must be monic times candidate-monic):
/// returns quotient if divisor divides exactly over Z.
fn divide_exact_z(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    if den.len() > num.len() || den.is_empty() {
        return None;
    }
    assert!(den.last().unwrap().is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if !c.is_zero() {
            for j in 0..dd {
                let t = &c * &den[j];
                rem[i - dd + j] -= t;
            }
        }
        rem[i] = BigInt::zero();
        quot[i - dd] = c;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

fn symmetric_rep(poly: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let half = modulus / 2;
    poly.iter()
        .map(|c| {
            let mut r = c.mod_floor(modulus);
            if r > half {
                r -= modulus;
            }
            r
        })
        .collect()
}

fn sqrt_ceil(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) == n {
        s
    } else {
        s + 1
    }
}

// ---------- arithmetic mod p with u64 coefficients ----------

fn reduce_mod_p(f: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = f
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn zp_normalize(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn zp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = ((c[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    zp_normalize(c)
}

fn zp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut c = vec![0u64; n];
    for i in 0..n {
        let x = *a.get(i).unwrap_or(&0);
        let y = *b.get(i).unwrap_or(&0);
        c[i] = (x + p - y) % p;
    }
    zp_normalize(c)
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // extended euclid
    let (mut t, mut newt) = (0i128, 1i128);
    let (mut r, mut newr) = (p as i128, a as i128 % p as i128);
    while newr != 0 {
        let q = r / newr;
        (t, newt) = (newt, t - q * newt);
        (r, newr) = (newr, r - q * newr);
    }
    assert!(r == 1, "not invertible mod p");
    (((t % p as i128) + p as i128) % p as i128) as u64
}

fn zp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (vec![], a.to_vec());
    }
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod_u64(*b.last().unwrap(), p);
    let mut quot = vec![0u64; a.len() - db];
    for i in (db..rem.len()).rev() {
        let c = (rem[i] as u128 * lead_inv as u128 % p as u128) as u64;
        if c != 0 {
            for j in 0..db {
                let t = (c as u128 * b[j] as u128 % p as u128) as u64;
                rem[i - db + j] = (rem[i - db + j] + p - t) % p;
            }
        }
        rem[i] = 0;
        quot[i - db] = c;
    }
    (zp_normalize(quot), zp_normalize(rem))
}

fn zp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let (_, r) = zp_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    // monic normalize
    if let Some(&l) = a.last() {
        if l != 1 {
            let inv = inv_mod_u64(l, p);
            for c in a.iter_mut() {
                *c = (*c as u128 * inv as u128 % p as u128) as u64;
            }
        }
    }
    a
}

fn zp_derivative(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return vec![];
    }
    zp_normalize(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (c as u128 * (i as u64 % p) as u128 % p as u128) as u64)
            .collect(),
    )
}

fn is_squarefree_mod_p(f: &[u64], p: u64) -> bool {
    let d = zp_derivative(f, p);
    if d.is_empty() {
        return false;
    }
    zp_gcd(f, &d, p).len() == 1
}

fn zp_powmod(base: &[u64], mut exp: BigUint, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = zp_divrem(base, modulus, p).1;
    let zero = BigUint::zero();
    while exp > zero {
        if exp.bit(0) {
            result = zp_divrem(&zp_mul(&result, &b, p), modulus, p).1;
        }
        b = zp_divrem(&zp_mul(&b, &b, p), modulus, p).1;
        exp >>= 1;
    }
    result
}

/// Monic irreducible factors of a squarefree monic polynomial mod p.
fn factor_mod_p(f: &[u64], p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![];
    let mut rest = f.to_vec();
    // distinct-degree: h = x^{p^d} mod rest
    let mut d = 0usize;
    let mut h = vec![0u64, 1]; // x
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push(rest.clone());
            break;
        }
        h = zp_powmod(&h, BigUint::from(p), &rest, p);
        let hx = zp_sub(&h, &[0, 1], p);
        let g = zp_gcd(&rest, &hx, p);
        if g.len() > 1 {
            for fac in equal_degree_split(&g, d, p) {
                out.push(fac);
            }
            rest = zp_divrem(&rest, &g, p).0;
            h = zp_divrem(&h, &rest, p).1;
        }
    }
    out.sort();
    out
}

/// Cantor-Zassenhaus equal-degree splitting (p odd) with deterministic trials.
fn equal_degree_split(f: &[u64], d: usize, p: u64) -> Vec<Vec<u64>> {
    let r = (f.len() - 1) / d;
    if r == 1 {
        return vec![f.to_vec()];
    }
    let exp = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    let mut seed = 0x9e3779b97f4a7c15u64 ^ (p.wrapping_mul(31).wrapping_add(d as u64));
    loop {
        // pseudo-random polynomial of degree < deg f
        let mut a = vec![0u64; f.len() - 1];
        for c in a.iter_mut() {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            *c = seed % p;
        }
        let a = zp_normalize(a);
        if a.len() <= 1 {
            continue;
        }
        let b = zp_powmod(&a, exp.clone(), f, p);
        let b1 = zp_sub(&b, &[1], p);
        let g = zp_gcd(f, &b1, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = zp_divrem(f, &g, p).0;
            let mut out = equal_degree_split(&g, d, p);
            out.extend(equal_degree_split(&zp_monic(h, p), d, p));
            return out;
        }
    }
}

fn zp_monic(mut f: Vec<u64>, p: u64) -> Vec<u64> {
    if let Some(&l) = f.last() {
        if l != 1 {
            let inv = inv_mod_u64(l, p);
            for c in f.iter_mut() {
                *c = (*c as u128 * inv as u128 % p as u128) as u64;
            }
        }
    }
    f
}

// ---------- Hensel lifting over Z/p^k ----------

fn mod_reduce(f: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = f.iter().map(|c| c.mod_floor(m)).collect();
    while out.last().map_or(false, |c| c.is_zero()) {
        out.pop();
    }
    out
}

fn mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    mod_reduce(&c, m)
}

fn sub_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        c.push((a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).mod_floor(m));
    }
    mod_reduce(&c, m)
}

fn add_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        c.push((a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).mod_floor(m));
    }
    mod_reduce(&c, m)
}

/// Division with remainder by a monic polynomial, coefficients mod m.
fn divrem_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    assert!(b.last().map_or(false, |c| c.is_one()), "divisor must be monic");
    if a.len() < b.len() {
        return (vec![], a.to_vec());
    }
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i].clone();
        if !c.is_zero() {
            for j in 0..db {
                let t = (&c * &b[j]).mod_floor(m);
                rem[i - db + j] = (&rem[i - db + j] - t).mod_floor(m);
            }
        }
        rem[i] = BigInt::zero();
        quot[i - db] = c;
    }
    (mod_reduce(&quot, m), mod_reduce(&rem, m))
}

/// Extended Euclid mod p for u64 polys, returning (s, t) with s*a + t*b = 1.
fn zp_bezout(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = zp_divrem(&r0, &r1, p);
        let ns = zp_sub(&s0, &zp_mul(&q, &s1, p), p);
        let nt = zp_sub(&t0, &zp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    // r0 = gcd (a unit); normalize to 1
    assert!(r0.len() == 1, "factors not coprime");
    let inv = inv_mod_u64(r0[0], p);
    let scale = |f: &[u64]| -> Vec<u64> {
        f.iter()
            .map(|&c| (c as u128 * inv as u128 % p as u128) as u64)
            .collect()
    };
    (zp_normalize(scale(&s0)), zp_normalize(scale(&t0)))
}

fn lift_u64(f: &[u64]) -> Vec<BigInt> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

/// Quadratic two-factor Hensel lift: from f = g*h (mod p) to (mod target), where
/// f, g, h are monic and g, h coprime mod p. Returns (g, h) mod target.
fn hensel_pair_lift(
    f: &[BigInt],
    g0: &[u64],
    h0: &[u64],
    p: u64,
    target: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let (s0, t0) = zp_bezout(g0, h0, p);
    let mut m = BigInt::from(p);
    let mut g = lift_u64(g0);
    let mut h = lift_u64(h0);
    let mut s = lift_u64(&s0);
    let mut t = lift_u64(&t0);
    while &m < target {
        let m2 = &m * &m;
        let fm = mod_reduce(f, &m2);
        let e = sub_mod(&fm, &mul_mod(&g, &h, &m2), &m2);
        let se = mul_mod(&s, &e, &m2);
        let (q, r) = divrem_mod(&se, &h, &m2);
        let g_new = add_mod(&g, &add_mod(&mul_mod(&t, &e, &m2), &mul_mod(&q, &g, &m2), &m2), &m2);
        let h_new = add_mod(&h, &r, &m2);
        // refresh Bezout correction
        let b = sub_mod(
            &add_mod(&mul_mod(&s, &g_new, &m2), &mul_mod(&t, &h_new, &m2), &m2),
            &[BigInt::one()],
            &m2,
        );
        let sb = mul_mod(&s, &b, &m2);
        let (c, d) = divrem_mod(&sb, &h_new, &m2);
        let s_new = sub_mod(&s, &d, &m2);
        let t_new = sub_mod(
            &t,
            &add_mod(&mul_mod(&t, &b, &m2), &mul_mod(&c, &g_new, &m2), &m2),
            &m2,
        );
        g = g_new;
        h = h_new;
        s = s_new;
        t = t_new;
        m = m2;
    }
    (mod_reduce(&g, &m), mod_reduce(&h, &m))
}

/// Lift the full modular factorization of monic f to modulus `target` (a power of p).
fn hensel_tree_lift(
    f: &[BigInt],
    factors: &[Vec<u64>],
    p: u64,
    target: &BigInt,
) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        return vec![mod_reduce(f, target)];
    }
    let half = factors.len() / 2;
    let (left, right) = factors.split_at(half);
    let mut g0 = vec![1u64];
    for fac in left {
        g0 = zp_mul(&g0, fac, p);
    }
    let mut h0 = vec![1u64];
    for fac in right {
        h0 = zp_mul(&h0, fac, p);
    }
    let (g, h) = hensel_pair_lift(f, &g0, &h0, p, target);
    let mut out = hensel_tree_lift(&g, left, p, target);
    out.extend(hensel_tree_lift(&h, right, p, target));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::cyclotomic;

    fn poly(c: &[i64]) -> QPoly {
        QPoly::from_i64(c)
    }

    #[test]
    fn factors_product_of_linears() {
        // (x-1)(x-2)(x-3)
        let p = poly(&[-6, 11, -6, 1]);
        let f = factor(&p);
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].0, poly(&[-3, 1]));
        assert_eq!(f[1].0, poly(&[-2, 1]));
        assert_eq!(f[2].0, poly(&[-1, 1]));
    }

    #[test]
    fn factors_mixed_degrees() {
        // (x^2+1)(x^2-2)(x-5)
        let p = poly(&[1, 0, 1]).mul(&poly(&[-2, 0, 1])).mul(&poly(&[-5, 1]));
        let f = factor(&p);
        assert_eq!(f.len(), 3);
        let polys: Vec<QPoly> = f.into_iter().map(|(q, _)| q).collect();
        assert!(polys.contains(&poly(&[1, 0, 1])));
        assert!(polys.contains(&poly(&[-2, 0, 1])));
        assert!(polys.contains(&poly(&[-5, 1])));
    }

    #[test]
    fn keeps_irreducible_whole() {
        // x^4 + x + 1 is irreducible over Q
        let p = poly(&[1, 1, 0, 0, 1]);
        let f = factor(&p);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0], (p.monic(), 1));
    }

    #[test]
    fn respects_multiplicities() {
        let p = poly(&[1, 1]).mul(&poly(&[1, 1])).mul(&poly(&[-2, 0, 1]));
        let f = factor(&p);
        assert_eq!(f.len(), 2);
        assert!(f.contains(&(poly(&[1, 1]), 2)));
        assert!(f.contains(&(poly(&[-2, 0, 1]), 1)));
    }

    #[test]
    fn factors_non_monic_with_rational_coeffs() {
        // 6x^2 - 5x + 1 = (2x-1)(3x-1); monic factors x-1/2, x-1/3
        let p = poly(&[1, -5, 6]);
        let f = factor(&p);
        assert_eq!(f.len(), 2);
        let roots: Vec<Q> = f.iter().map(|(q, _)| -q.coeff(0)).collect();
        assert!(roots.contains(&Q::new(BigInt::from(1), BigInt::from(2))));
        assert!(roots.contains(&Q::new(BigInt::from(1), BigInt::from(3))));
    }

    #[test]
    fn factors_cyclotomic_product() {
        let p = cyclotomic(12).mul(&cyclotomic(4)).mul(&cyclotomic(1));
        let f = factor(&p);
        let polys: Vec<QPoly> = f.into_iter().map(|(q, _)| q).collect();
        assert_eq!(polys.len(), 3);
        assert!(polys.contains(&cyclotomic(12)));
        assert!(polys.contains(&cyclotomic(4)));
        assert!(polys.contains(&cyclotomic(1)));
    }

    #[test]
    fn swinnerton_dyer_style_recombination() {
        // (x^2-2)(x^2-3): mod small primes this often splits into linears,
        // forcing genuine subset recombination.
        let p = poly(&[-2, 0, 1]).mul(&poly(&[-3, 0, 1]));
        let f = factor(&p);
        assert_eq!(f.len(), 2);
        let polys: Vec<QPoly> = f.into_iter().map(|(q, _)| q).collect();
        assert!(polys.contains(&poly(&[-2, 0, 1])));
        assert!(polys.contains(&poly(&[-3, 0, 1])));
    }
}
