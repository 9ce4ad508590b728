//! Exact arithmetic in quotient rings of Q[x]: residues modulo an irreducible
//! polynomial, linear algebra over the resulting field, and the two-variable
//! tensor ring Q[x,y]/(f(x), g(y)) used to decide whether an algebraic
//! quantity vanishes under *some* choice of conjugate roots.

use num_traits::{One, Zero};

use crate::exact::{QPoly, SMatrix};
use crate::Q;

/// Residue of `a` modulo monic `f`.
pub(super) fn pmod(a: &QPoly, f: &QPoly) -> QPoly {
    a.divrem(f).1
}

pub(super) fn mul_mod(a: &QPoly, b: &QPoly, f: &QPoly) -> QPoly {
    pmod(&a.mul(b), f)
}

/// Inverse of a nonzero residue modulo irreducible `f`, by extended Euclid.
pub(super) fn inv_mod(u: &QPoly, f: &QPoly) -> QPoly {
    let u = pmod(u, f);
    assert!(!u.is_zero(), "inverting the zero residue");
    let (mut r0, mut s0) = (f.clone(), QPoly::zero());
    let (mut r1, mut s1) = (u, QPoly::one());
    while r1.deg() > 0 {
        let (q, r2) = r0.divrem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        r0 = r1;
        s0 = s1;
        r1 = r2;
        s1 = s2;
        assert!(!r1.is_zero(), "modulus is not irreducible");
    }
    let c = r1.coeff(0);
    pmod(&s1.scale(&(Q::one() / c)), f)
}

/// In-place row reduction over K = Q[x]/(f); returns the pivot columns.
/// Entries must already be residues modulo f.
pub(super) fn echelon_over_k(rows: &mut Vec<Vec<QPoly>>, f: &QPoly) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut next = 0usize;
    for c in 0..ncols {
        if next == rows.len() {
            break;
        }
        let Some(pr) = (next..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(next, pr);
        let inv = inv_mod(&rows[next][c], f);
        for j in c..ncols {
            rows[next][j] = mul_mod(&rows[next][j], &inv, f);
        }
        for r in 0..rows.len() {
            if r != next && !rows[r][c].is_zero() {
                let fac = rows[r][c].clone();
                for j in c..ncols {
                    let t = mul_mod(&fac, &rows[next][j], f);
                    rows[r][j] = pmod(&rows[r][j].sub(&t), f);
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

/// Basis of the solution space of `rows * x = 0` over K = Q[x]/(f).
pub(super) fn kernel_over_k(rows: &[Vec<QPoly>], ncols: usize, f: &QPoly) -> Vec<Vec<QPoly>> {
    let mut m: Vec<Vec<QPoly>> = rows.to_vec();
    let pivots = echelon_over_k(&mut m, f);
    let mut basis = vec![];
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![QPoly::zero(); ncols];
        v[free] = QPoly::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = pmod(&m[r][free].neg(), f);
        }
        basis.push(v);
    }
    basis
}

/// Determinant over K = Q[x]/(f) of a square matrix of residues.
pub(super) fn det_over_k(mat: &[Vec<QPoly>], f: &QPoly) -> QPoly {
    let n = mat.len();
    let mut m: Vec<Vec<QPoly>> = mat.to_vec();
    let mut det = QPoly::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return QPoly::zero();
        };
        if pr != c {
            m.swap(c, pr);
            det = det.neg();
        }
        det = mul_mod(&det, &m[c][c], f);
        let inv = inv_mod(&m[c][c], f);
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let fac = mul_mod(&m[r][c], &inv, f);
            for j in c..n {
                let t = mul_mod(&fac, &m[c][j], f);
                m[r][j] = pmod(&m[r][j].sub(&t), f);
            }
        }
    }
    det
}

/// Solution of `mat * x = rhs` over K for invertible `mat`.
pub(super) fn solve_over_k(mat: &[Vec<QPoly>], rhs: &[QPoly], f: &QPoly) -> Vec<QPoly> {
    let n = mat.len();
    let mut rows: Vec<Vec<QPoly>> = mat
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = echelon_over_k(&mut rows, f);
    assert_eq!(
        pivots,
        (0..n).collect::<Vec<_>>(),
        "linear system is singular"
    );
    (0..n).map(|r| rows[r][n].clone()).collect()
}

/// Field norm N(u) of a residue u in Q[x]/(f): the determinant of
/// multiplication by u on the power basis. Nonzero exactly when u is, and a
/// rational certificate that every conjugate value u(beta) is nonzero.
pub(super) fn field_norm(u: &QPoly, f: &QPoly) -> Q {
    let e = f.deg();
    let mut cur = pmod(u, f);
    let mut cols: Vec<Vec<Q>> = vec![];
    for _ in 0..e {
        cols.push((0..e).map(|i| cur.coeff(i)).collect());
        cur = pmod(&cur.mul(&QPoly::monomial(1)), f);
    }
    let mut entries = Vec::with_capacity(e * e);
    for i in 0..e {
        for col in cols.iter() {
            entries.push(col[i].clone());
        }
    }
    SMatrix::new(e, entries).det()
}

/// The tensor ring Q[x,y]/(f(x), g(y)) for monic irreducible f and g (not
/// necessarily distinct). Its characters are the pairs (beta, gamma) of a
/// root of f and a root of g, so an element is a unit exactly when it
/// vanishes at no pair of conjugates; that is decided by the rational
/// determinant of its multiplication matrix (its norm).
pub(super) struct TensorRing {
    f: QPoly,
    g: QPoly,
}

/// Element: coefficient of x^i is entry i, a residue in Q[y]/(g).
pub(super) type TElem = Vec<QPoly>;

impl TensorRing {
    pub(super) fn new(f: QPoly, g: QPoly) -> Self {
        TensorRing { f, g }
    }

    pub(super) fn dim(&self) -> usize {
        self.f.deg() * self.g.deg()
    }

    pub(super) fn zero(&self) -> TElem {
        vec![QPoly::zero(); self.f.deg()]
    }

    /// Accumulate `c * a(x) * b(y)` into `acc` for rational c.
    pub(super) fn add_scaled_pair(&self, acc: &mut TElem, a: &QPoly, b: &QPoly, c: &Q) {
        let a = pmod(a, &self.f);
        if a.is_zero() || c.is_zero() {
            return;
        }
        let b = pmod(&b.scale(c), &self.g);
        for i in 0..=a.deg() {
            let ai = a.coeff(i);
            if ai.is_zero() {
                continue;
            }
            acc[i] = pmod(&acc[i].add(&b.scale(&ai)), &self.g);
        }
    }

    fn shift_x(&self, u: &TElem) -> TElem {
        let e = self.f.deg();
        let top = u[e - 1].clone();
        let mut out = vec![QPoly::zero(); e];
        for i in (1..e).rev() {
            out[i] = u[i - 1].clone();
        }
        if !top.is_zero() {
            for k in 0..e {
                let fk = self.f.coeff(k);
                if !fk.is_zero() {
                    out[k] = out[k].sub(&top.scale(&fk));
                }
            }
        }
        out
    }

    fn shift_y(&self, u: &TElem) -> TElem {
        let y = QPoly::monomial(1);
        u.iter().map(|c| mul_mod(c, &y, &self.g)).collect()
    }

    fn flatten(&self, u: &TElem) -> Vec<Q> {
        let eg = self.g.deg();
        let mut out = Vec::with_capacity(self.dim());
        for c in u {
            for b in 0..eg {
                out.push(c.coeff(b));
            }
        }
        out
    }

    /// Norm of u: determinant of multiplication by u on the monomial basis.
    pub(super) fn norm(&self, u: &TElem) -> Q {
        let (ef, eg) = (self.f.deg(), self.g.deg());
        let d = self.dim();
        let mut cols: Vec<Vec<Q>> = Vec::with_capacity(d);
        let mut ux = u.clone();
        for _ in 0..ef {
            let mut uxy = ux.clone();
            for _ in 0..eg {
                cols.push(self.flatten(&uxy));
                uxy = self.shift_y(&uxy);
            }
            ux = self.shift_x(&ux);
        }
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for col in cols.iter() {
                entries.push(col[r].clone());
            }
        }
        SMatrix::new(d, entries).det()
    }
}
