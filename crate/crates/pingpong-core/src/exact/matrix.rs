//! Exact rational matrices and the matrix-level operations the rest of the crate
//! is built on: characteristic/minimal polynomials, wedge powers, torsion tests.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{cyclotomic, QPoly};
use crate::Q;

/// Dense square matrix over Q, row-major. Ordering is entrywise-lexicographic and
/// is used as the canonical key for ball enumeration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SMatrix {
    pub n: usize,
    pub e: Vec<Q>,
}

impl SMatrix {
    pub fn new(n: usize, entries: Vec<Q>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        SMatrix { n, e: entries }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            for &x in *r {
                e.push(Q::from_integer(BigInt::from(x)));
            }
        }
        SMatrix { n, e }
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![Q::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = Q::one();
        }
        SMatrix { n, e }
    }

    pub fn zero(n: usize) -> Self {
        SMatrix {
            n,
            e: vec![Q::zero(); n * n],
        }
    }

    pub fn diagonal(d: &[Q]) -> Self {
        let n = d.len();
        let mut m = SMatrix::zero(n);
        for i in 0..n {
            m.e[i * n + i] = d[i].clone();
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.e[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Q {
        &mut self.e[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == SMatrix::identity(self.n)
    }

    pub fn add(&self, o: &SMatrix) -> SMatrix {
        assert_eq!(self.n, o.n);
        SMatrix {
            n: self.n,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &SMatrix) -> SMatrix {
        assert_eq!(self.n, o.n);
        SMatrix {
            n: self.n,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> SMatrix {
        SMatrix {
            n: self.n,
            e: self.e.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> SMatrix {
        SMatrix {
            n: self.n,
            e: self.e.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, o: &SMatrix) -> SMatrix {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut e = vec![Q::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a * o.at(k, j);
                    e[i * n + j] += t;
                }
            }
        }
        SMatrix { n, e }
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n {
                if !v[j].is_zero() {
                    out[i] += self.at(i, j) * &v[j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SMatrix {
        let n = self.n;
        let mut t = vec![Q::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = self.at(i, j).clone();
            }
        }
        SMatrix { n, e: t }
    }

    pub fn trace(&self) -> Q {
        let mut t = Q::zero();
        for i in 0..self.n {
            t += self.at(i, i);
        }
        t
    }

    /// Exact determinant by fraction-free-ish Gaussian elimination over Q.
    pub fn det(&self) -> Q {
        let n = self.n;
        let mut m = self.e.clone();
        let mut det = Q::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r * n + col].is_zero());
            let pr = match pivot {
                None => return Q::zero(),
                Some(p) => p,
            };
            if pr != col {
                for j in 0..n {
                    m.swap(pr * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = m[col * n + col].clone();
            det *= &pv;
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let factor = &m[r * n + col] / &pv;
                for j in col..n {
                    let t = &factor * &m[col * n + j];
                    m[r * n + j] -= t;
                }
            }
        }
        det
    }

    /// Exact inverse; None when singular.
    pub fn inverse(&self) -> Option<SMatrix> {
        let n = self.n;
        let mut a = self.e.clone();
        let mut b = SMatrix::identity(n).e;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    b.swap(pivot * n + j, col * n + j);
                }
            }
            let inv = Q::one() / a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] *= &inv;
                b[col * n + j] *= &inv;
            }
            for r in 0..n {
                if r != col && !a[r * n + col].is_zero() {
                    let f = a[r * n + col].clone();
                    for j in 0..n {
                        let t = &f * &a[col * n + j];
                        a[r * n + j] -= t;
                        let t = &f * &b[col * n + j];
                        b[r * n + j] -= t;
                    }
                }
            }
        }
        Some(SMatrix { n, e: b })
    }

    /// Nonnegative power.
    pub fn pow(&self, mut k: u64) -> SMatrix {
        let mut result = SMatrix::identity(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// Integer power, using the inverse for negative exponents.
    pub fn pow_i(&self, k: i64) -> SMatrix {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inverse()
                .expect("negative power of singular matrix")
                .pow((-k) as u64)
        }
    }

    pub fn gram(&self) -> SMatrix {
        self.transpose().mul(self)
    }

    /// Largest absolute value of an entry (crude size gauge for search heuristics).
    pub fn max_abs_entry(&self) -> Q {
        let mut m = Q::zero();
        for x in &self.e {
            let a = x.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Characteristic polynomial det(xI - A), monic, by Faddeev-LeVerrier.
    pub fn char_poly(&self) -> QPoly {
        let n = self.n;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = SMatrix::identity(n);
        for k in 1..=n {
            m = self.mul(&m);
            let c = -(m.trace() / Q::from_integer(BigInt::from(k as i64)));
            coeffs[n - k] = c.clone();
            for i in 0..n {
                let idx = i * n + i;
                m.e[idx] = &m.e[idx] + &c;
            }
        }
        QPoly::new(coeffs)
    }

    /// Minimal polynomial: lcm over basis vectors of the Krylov annihilator.
    pub fn min_poly(&self) -> QPoly {
        let n = self.n;
        let mut acc = QPoly::one();
        for i in 0..n {
            let mut v = vec![Q::zero(); n];
            v[i] = Q::one();
            let ann = self.krylov_annihilator(&v);
            // lcm(acc, ann) = acc * ann / gcd
            let g = acc.gcd(&ann);
            acc = acc.mul(&ann.div_exact(&g)).monic();
            if acc.deg() == n {
                break;
            }
        }
        acc
    }

    /// Minimal monic p with p(A) v = 0, via first linear dependence of Krylov vectors.
    fn krylov_annihilator(&self, v: &[Q]) -> QPoly {
        let n = self.n;
        // Columns: v, Av, A^2 v, ...; find first k where A^k v depends on earlier ones.
        let mut basis: Vec<Vec<Q>> = vec![]; // row-echelon processed vectors
        let mut combos: Vec<Vec<Q>> = vec![]; // expression of each basis vector in Krylov terms
        let mut cur = v.to_vec();
        let mut k = 0usize;
        loop {
            // try to reduce cur against basis
            let mut vec_r = cur.clone();
            let mut combo = vec![Q::zero(); n + 1];
            combo[k] = Q::one();
            for (b, c) in basis.iter().zip(combos.iter()) {
                // find pivot of b
                let piv = b.iter().position(|x| !x.is_zero()).unwrap();
                if !vec_r[piv].is_zero() {
                    let f = &vec_r[piv] / &b[piv];
                    for j in 0..n {
                        let t = &f * &b[j];
                        vec_r[j] -= t;
                    }
                    for j in 0..=n {
                        let t = &f * &c[j];
                        combo[j] -= t;
                    }
                }
            }
            if vec_r.iter().all(|x| x.is_zero()) {
                // combo expresses 0 = sum combo[j] * A^j v with combo[k] = 1
                return QPoly::new(combo);
            }
            basis.push(vec_r);
            combos.push(combo);
            cur = self.mul_vec(&cur);
            k += 1;
            assert!(k <= n, "Krylov space exceeded dimension");
        }
    }

    /// Semisimple over Q(bar): minimal polynomial squarefree.
    pub fn is_semisimple(&self) -> bool {
        self.min_poly().is_squarefree()
    }

    /// Finite order: semisimple with minimal polynomial a product of cyclotomics.
    /// Returns the order when torsion.
    pub fn torsion_order(&self) -> Option<u64> {
        let mp = self.min_poly();
        if !mp.is_squarefree() {
            return None;
        }
        let mut rest = mp;
        let mut order = 1u64;
        for k in admissible_cyclotomic_indices(self.n) {
            let phi = cyclotomic(k);
            if phi.deg() > rest.degree().unwrap_or(0) {
                continue;
            }
            let (q, r) = rest.divrem(&phi);
            if r.is_zero() {
                rest = q;
                order = num_integer::lcm(order, k);
            }
            if rest.is_one() {
                return Some(order);
            }
        }
        if rest.is_one() {
            Some(order)
        } else {
            None
        }
    }

    pub fn is_torsion(&self) -> bool {
        self.torsion_order().is_some()
    }

    /// k-th exterior power on the lexicographic basis of k-subsets.
    pub fn wedge_power(&self, k: usize) -> SMatrix {
        let n = self.n;
        assert!(k >= 1 && k <= n);
        let subsets = k_subsets(n, k);
        let m = subsets.len();
        let mut e = Vec::with_capacity(m * m);
        for rows in &subsets {
            for cols in &subsets {
                e.push(self.minor(rows, cols));
            }
        }
        SMatrix { n: m, e }
    }

    /// det of the submatrix on the given rows/cols.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Q {
        let k = rows.len();
        let mut sub = Vec::with_capacity(k * k);
        for &r in rows {
            for &c in cols {
                sub.push(self.at(r, c).clone());
            }
        }
        SMatrix { n: k, e: sub }.det()
    }
}

/// All k-element subsets of {0..n-1} in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k as isize - 1;
        while i >= 0 && cur[i as usize] == n - k + i as usize {
            i -= 1;
        }
        if i < 0 {
            return out;
        }
        let i = i as usize;
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Euler phi.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All k with phi(k) <= d: the cyclotomic indices that can divide a minimal
/// polynomial in dimension d.
pub fn admissible_cyclotomic_indices(d: usize) -> Vec<u64> {
    let mut out = vec![];
    // phi(k) >= sqrt(k/2), so k <= 2 (d+1)^2 is a safe scan bound
    let bound = 2 * ((d as u64) + 1) * ((d as u64) + 1);
    for k in 1..=bound {
        if euler_phi(k) <= d as u64 {
            out.push(k);
        }
    }
    out
}

/// lcm of all admissible torsion orders in dimension d (every torsion element of
/// GL_d(Q) satisfies a^M = 1 for this M).
pub fn torsion_exponent(d: usize) -> u64 {
    admissible_cyclotomic_indices(d)
        .into_iter()
        .fold(1, num_integer::lcm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn det_and_inverse() {
        let m = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det(), q(1, 1));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(inv, SMatrix::from_i64(&[&[1, -1], &[-1, 2]]));
    }

    #[test]
    fn char_poly_of_trace3() {
        // x^2 - 3x + 1
        let m = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.char_poly(), QPoly::from_i64(&[1, -3, 1]));
    }

    #[test]
    fn char_poly_of_rational_diag() {
        // diag(2, 1/2): x^2 - 5/2 x + 1
        let m = SMatrix::diagonal(&[q(2, 1), q(1, 2)]);
        let cp = m.char_poly();
        assert_eq!(cp.coeff(0), q(1, 1));
        assert_eq!(cp.coeff(1), q(-5, 2));
        assert_eq!(cp.coeff(2), q(1, 1));
    }

    #[test]
    fn min_poly_divides_char_poly() {
        let m = SMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 2]]);
        let mp = m.min_poly();
        let cp = m.char_poly();
        let (_, r) = cp.divrem(&mp);
        assert!(r.is_zero());
        // Jordan block forces (x-1)^2 in the minimal polynomial
        assert_eq!(mp.deg(), 3);
    }

    #[test]
    fn min_poly_of_scalar_is_linear() {
        let m = SMatrix::identity(4);
        assert_eq!(m.min_poly(), QPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn semisimplicity() {
        assert!(SMatrix::from_i64(&[&[2, 1], &[1, 1]]).is_semisimple());
        assert!(!SMatrix::from_i64(&[&[1, 1], &[0, 1]]).is_semisimple());
        assert!(SMatrix::identity(3).is_semisimple());
    }

    #[test]
    fn torsion_detection() {
        // rotation by 90 degrees: order 4
        let s = SMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(s.torsion_order(), Some(4));
        // unipotent: not torsion
        assert!(!SMatrix::from_i64(&[&[1, 1], &[0, 1]]).is_torsion());
        // hyperbolic: not torsion (eigenvalues off the unit circle)
        assert!(!SMatrix::from_i64(&[&[2, 1], &[1, 1]]).is_torsion());
        // -I: order 2
        assert_eq!(
            SMatrix::from_i64(&[&[-1, 0], &[0, -1]]).torsion_order(),
            Some(2)
        );
        // order 6 element of SL_2(Z)
        let r6 = SMatrix::from_i64(&[&[1, -1], &[1, 0]]);
        assert_eq!(r6.torsion_order(), Some(6));
    }

    #[test]
    fn torsion_satisfies_exponent() {
        let m = torsion_exponent(2);
        assert_eq!(m % 12, 0);
        for t in [
            SMatrix::from_i64(&[&[0, -1], &[1, 0]]),
            SMatrix::from_i64(&[&[1, -1], &[1, 0]]),
            SMatrix::from_i64(&[&[-1, 0], &[0, -1]]),
        ] {
            assert!(t.pow(m).is_identity());
        }
    }

    #[test]
    fn wedge_of_diagonal() {
        let m = SMatrix::diagonal(&[q(2, 1), q(3, 1), q(5, 1)]);
        let w = m.wedge_power(2);
        // lex 2-subsets of {0,1,2}: {0,1},{0,2},{1,2} -> products 6, 10, 15
        assert_eq!(w, SMatrix::diagonal(&[q(6, 1), q(10, 1), q(15, 1)]));
    }

    #[test]
    fn wedge_functorial() {
        let a = SMatrix::from_i64(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
        let b = SMatrix::from_i64(&[&[2, 1, 1], &[1, 1, 0], &[0, 3, 1]]);
        let lhs = a.mul(&b).wedge_power(2);
        let rhs = a.wedge_power(2).mul(&b.wedge_power(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_det_power() {
        // det(wedge^k A) = det(A)^C(n-1, k-1)
        let a = SMatrix::from_i64(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 3]]);
        let d = a.det();
        let w = a.wedge_power(2);
        // n = 3, k = 2: C(2,1) = 2
        assert_eq!(w.det(), &d * &d);
    }

    #[test]
    fn pow_i_handles_negatives() {
        let m = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(m.pow_i(-3), SMatrix::from_i64(&[&[1, -3], &[0, 1]]));
    }
}
