//! Exact eigenvectors of a semisimple matrix, one family per irreducible
//! factor of the characteristic polynomial, with coordinates that are
//! polynomials in the eigenvalue and therefore integral over the entry ring.

use num_traits::{Signed, Zero};

use crate::exact::{factor, k_subsets, QPoly, SMatrix};
use crate::places::{max_root_abs_inf, max_root_abs_p, val_q, Ball, Mag, PMag, Place};
use crate::Q;

use super::algebra::{det_over_k, mul_mod, pmod, solve_over_k};
use super::SearchError;

/// An eigenvector with coordinates in Q[x]/(f) for an irreducible factor f of
/// the characteristic polynomial; the class of x is the eigenvalue, and the
/// one symbolic vector stands for all deg(f) conjugate eigenvectors at once.
/// Coordinates are minors of a - x, so their denominators never leave the
/// entry ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicVector {
    factor: QPoly,
    coords: Vec<QPoly>,
}

impl AlgebraicVector {
    /// Minimal polynomial of the eigenvalue (monic, irreducible).
    pub fn factor(&self) -> &QPoly {
        &self.factor
    }

    /// Coordinates as residues modulo the factor.
    pub fn coords(&self) -> &[QPoly] {
        &self.coords
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Certified upper bound on the norm of every conjugate of the vector:
    /// the euclidean norm at the archimedean place (the enclosure's upper
    /// endpoint is the bound), the max entry magnitude at a finite place
    /// (exact). Coarse by design — triangle inequality against a certified
    /// bound on the root magnitudes of the factor.
    pub fn norm_bound(&self, place: Place, prec: u32) -> Mag {
        match place {
            Place::Infinity => {
                let r = max_root_abs_inf(&self.factor, 32)
                    .sup()
                    .round_dir(32, true)
                    .to_q();
                let mut s = Q::zero();
                for c in &self.coords {
                    if c.is_zero() {
                        continue;
                    }
                    let mut e = Q::zero();
                    let mut rp = Q::from_integer(1.into());
                    for i in 0..=c.deg() {
                        e += c.coeff(i).abs() * &rp;
                        rp *= &r;
                    }
                    s += &e * &e;
                }
                Mag::Real(
                    Ball::from_q(&s, prec)
                        .sqrt_nonneg(prec)
                        .expect("sum of squares is nonnegative"),
                )
            }
            Place::Finite(p) => {
                let rp = max_root_abs_p(&self.factor, p);
                let mut best = PMag::zero(p);
                for c in &self.coords {
                    if c.is_zero() {
                        continue;
                    }
                    for i in 0..=c.deg() {
                        let ci = c.coeff(i);
                        let Some(v) = val_q(&ci, p) else { continue };
                        let m = PMag::new(p, Q::from_integer((-v).into()))
                            .mul(&rp.pow_i(i as i64));
                        if m > best {
                            best = m;
                        }
                    }
                }
                Mag::Padic(best)
            }
        }
    }
}

/// Exact eigenvectors of a semisimple matrix. For each irreducible factor f
/// of multiplicity m, picks (lexicographically first) a complementary index
/// set C with the principal block of a - x invertible over Q[x]/(f) — it
/// exists because a - x has index one at every eigenvalue — and emits one
/// vector per excluded index: the excluded coordinate carries the block
/// determinant, the C coordinates the matching cofactor solve, and the other
/// excluded coordinates are zero. Every output is re-checked to satisfy
/// (a - x) v = 0 exactly.
pub fn integral_eigenvectors(a: &SMatrix) -> Result<Vec<AlgebraicVector>, SearchError> {
    if !a.is_semisimple() {
        return Err(SearchError::NotSemisimple);
    }
    let n = a.n;
    let entry = |i: usize, j: usize| -> QPoly {
        let c = QPoly::constant(a.at(i, j).clone());
        if i == j {
            c.sub(&QPoly::monomial(1))
        } else {
            c
        }
    };
    let mut out = vec![];
    for (f, mult) in factor(&a.char_poly()) {
        let block = |rows: &[usize], cols: &[usize]| -> Vec<Vec<QPoly>> {
            rows.iter()
                .map(|&r| cols.iter().map(|&c| pmod(&entry(r, c), &f)).collect())
                .collect()
        };
        let c_set: Vec<usize> = if mult == n {
            vec![]
        } else {
            k_subsets(n, n - mult)
                .into_iter()
                .find(|c| !det_over_k(&block(c, c), &f).is_zero())
                .expect("semisimple matrix has an invertible principal block of corank the multiplicity")
        };
        let j_set: Vec<usize> = (0..n).filter(|i| !c_set.contains(i)).collect();
        let det_c = if c_set.is_empty() {
            QPoly::one()
        } else {
            det_over_k(&block(&c_set, &c_set), &f)
        };
        for &j0 in &j_set {
            let mut v = vec![QPoly::zero(); n];
            v[j0] = det_c.clone();
            if !c_set.is_empty() {
                let rhs: Vec<QPoly> = c_set.iter().map(|&r| pmod(&entry(r, j0), &f)).collect();
                let z = solve_over_k(&block(&c_set, &c_set), &rhs, &f);
                for (idx, &ci) in c_set.iter().enumerate() {
                    v[ci] = pmod(&mul_mod(&det_c, &z[idx], &f).neg(), &f);
                }
            }
            for r in 0..n {
                let mut acc = QPoly::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc = acc.add(&entry(r, j).mul(vj));
                }
                assert!(
                    pmod(&acc, &f).is_zero(),
                    "eigenvector residual must vanish exactly"
                );
            }
            out.push(AlgebraicVector {
                factor: f.clone(),
                coords: v,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_spectrum_gives_scaled_standard_basis() {
        let a = SMatrix::new(2, vec![q(2, 1), Q::zero(), Q::zero(), q(1, 2)]);
        let vs = integral_eigenvectors(&a).unwrap();
        assert_eq!(vs.len(), 2);
        for v in &vs {
            assert_eq!(v.factor().deg(), 1);
            let nonzero: Vec<usize> = (0..2).filter(|&i| !v.coords()[i].is_zero()).collect();
            assert_eq!(nonzero.len(), 1);
        }
        // the two vectors sit on different axes
        assert!(vs[0].coords()[0].is_zero() != vs[1].coords()[0].is_zero());
    }

    #[test]
    fn quadratic_factor_matches_the_closed_form() {
        // [[2,1],[1,1]]: eigenvector proportional to (1, alpha - 2)
        let a = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let vs = integral_eigenvectors(&a).unwrap();
        assert_eq!(vs.len(), 1);
        let v = &vs[0];
        assert_eq!(*v.factor(), QPoly::from_i64(&[1, -3, 1]));
        // cross-multiplied proportionality: v0 * (x - 2) = v1 * 1 in K
        let lhs = mul_mod(&v.coords()[0], &QPoly::from_i64(&[-2, 1]), v.factor());
        assert_eq!(lhs, pmod(&v.coords()[1], v.factor()));
    }

    #[test]
    fn identity_exercises_full_multiplicity() {
        let a = SMatrix::identity(3);
        let vs = integral_eigenvectors(&a).unwrap();
        assert_eq!(vs.len(), 3);
        for (i, v) in vs.iter().enumerate() {
            for j in 0..3 {
                assert_eq!(v.coords()[j].is_zero(), i != j);
            }
        }
    }

    #[test]
    fn repeated_quadratic_factor_yields_independent_vectors() {
        // block diagonal with two copies of [[2,1],[1,1]]: x^2-3x+1 squared
        let a = SMatrix::from_i64(&[
            &[2, 1, 0, 0],
            &[1, 1, 0, 0],
            &[0, 0, 2, 1],
            &[0, 0, 1, 1],
        ]);
        let vs = integral_eigenvectors(&a).unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0].factor(), vs[1].factor());
        // supported on disjoint blocks
        assert!(vs[0].coords()[2].is_zero() && vs[0].coords()[3].is_zero());
        assert!(vs[1].coords()[0].is_zero() && vs[1].coords()[1].is_zero());
    }

    #[test]
    fn non_semisimple_is_rejected() {
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            integral_eigenvectors(&t).unwrap_err(),
            SearchError::NotSemisimple
        );
    }

    #[test]
    fn norm_bounds_dominate_obvious_values() {
        let a = SMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let v = integral_eigenvectors(&a).unwrap().remove(0);
        // archimedean: the bound's upper endpoint must exceed |v| at the
        // dominant root, which is at least 1 in each coordinate scheme
        let Mag::Real(b) = v.norm_bound(Place::Infinity, 64) else {
            panic!("expected a real bound")
        };
        assert!(b.sup().to_q() >= q(1, 1));
        // 2-adic: coordinates are 2-integral and the eigenvalue is a unit,
        // so the bound stays at most 1... and exactly 1 here
        let Mag::Padic(m) = v.norm_bound(Place::Finite(2), 64) else {
            panic!("expected a p-adic bound")
        };
        assert_eq!(m.exp().map(|e| e.clone()), Some(Q::zero()));
    }
}
