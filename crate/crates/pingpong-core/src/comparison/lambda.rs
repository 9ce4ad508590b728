//! Eigenvalue growth of product sets: Λ_v(Q^i) as a certified enclosure,
//! with an exact rational value for the square whenever the spectrum allows
//! it, plus the exact nilpotency test for the spanned algebra.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::exact::SMatrix;
use crate::Q;
use crate::places::{lambda_p, lambda_sq_inf, Ball, Mag, Place};

use super::{CompError, CompactSet, ProductBudget};

/// Certified bound on a spectral radius.  `value` is always a valid
/// enclosure; `sq_exact` is the exact rational square of the radius whenever
/// that square is rational — root isolation on the pairwise root-product
/// polynomial recognizes every such case, including complex eigenvalue pairs.
#[derive(Clone, Debug)]
pub struct LambdaBound {
    value: Mag,
    sq_exact: Option<Q>,
}

impl LambdaBound {
    pub fn value(&self) -> &Mag {
        &self.value
    }

    /// Exact rational square of the radius, when known.
    pub fn sq_exact(&self) -> Option<&Q> {
        self.sq_exact.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Mag::Padic(m) => m.is_zero(),
            Mag::Real(_) => self.sq_exact.as_ref().is_some_and(|q| q.is_zero()),
        }
    }
}

/// All products of exactly `i` factors from the set, deduplicated level by
/// level through exact entry comparison.  The budget counts every product
/// formed, so free growth fails fast instead of filling memory.
pub(super) fn power_products(
    set: &CompactSet,
    i: usize,
    budget: &ProductBudget,
) -> Result<Vec<SMatrix>, CompError> {
    assert!(i >= 1, "power sets start at exponent 1");
    let mut level: Vec<SMatrix> = vec![];
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    for a in set.elements() {
        if seen.insert(a.e.clone()) {
            level.push(a.clone());
        }
    }
    let mut formed = level.len();
    for _ in 1..i {
        let mut next: Vec<SMatrix> = vec![];
        let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
        for m in &level {
            for a in set.elements() {
                formed += 1;
                if formed > budget.max_products {
                    return Err(CompError::BudgetExceeded);
                }
                let prod = m.mul(a);
                if seen.insert(prod.e.clone()) {
                    next.push(prod);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Λ_v(Q^i): the largest spectral radius over all products of exactly `i`
/// elements of the set, at the set's place.  Exact at finite places; at the
/// archimedean place a certified enclosure, with the exact square attached
/// whenever every product's squared radius is rational.
pub fn lambda_of_power_set(
    set: &CompactSet,
    i: usize,
    budget: &ProductBudget,
    prec: u32,
) -> Result<LambdaBound, CompError> {
    let prods = power_products(set, i, budget)?;
    match set.place() {
        Place::Finite(p) => {
            let top = prods
                .iter()
                .map(|m| lambda_p(m, p))
                .max()
                .expect("power set is nonempty");
            Ok(LambdaBound {
                value: Mag::Padic(top),
                sq_exact: None,
            })
        }
        Place::Infinity => {
            let mut sq_enc: Option<Ball> = None;
            let mut sq_exact: Option<Q> = Some(Q::zero());
            for m in &prods {
                let root = lambda_sq_inf(m, prec + 8);
                match (&root.exact, &mut sq_exact) {
                    (Some(sq), Some(cur)) => {
                        if *sq > *cur {
                            *cur = sq.clone();
                        }
                    }
                    _ => sq_exact = None,
                }
                sq_enc = Some(match &sq_enc {
                    None => root.enc,
                    Some(b) => b.max(&root.enc),
                });
            }
            let sq_ball = match &sq_exact {
                Some(sq) => Ball::from_q(sq, prec + 8),
                None => sq_enc.expect("power set is nonempty"),
            };
            let ball = sq_ball
                .sqrt_nonneg(prec)
                .expect("squared radius is nonnegative");
            Ok(LambdaBound {
                value: Mag::Real(ball),
                sq_exact,
            })
        }
    }
}

fn pivot(v: &[Q]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Reduce `v` against an echelonized row set (rows normalized to leading
/// coefficient one, sorted by pivot column) and insert it if independent.
/// Returns whether the span grew.
fn reduce_insert(rows: &mut Vec<(usize, Vec<Q>)>, mut v: Vec<Q>) -> bool {
    for (pc, row) in rows.iter() {
        if !v[*pc].is_zero() {
            let f = v[*pc].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x - &f * r;
            }
        }
    }
    match pivot(&v) {
        None => false,
        Some(j) => {
            let lead = v[j].clone();
            for x in v.iter_mut() {
                *x = &*x / &lead;
            }
            let at = rows.partition_point(|(pc, _)| *pc < j);
            rows.insert(at, (j, v));
            true
        }
    }
}

/// Whether the (non-unital) algebra generated by the set is nilpotent.
/// Entirely exact: saturate the linear span of all words under right
/// multiplication by generators — it stabilizes within dim^2 steps — then
/// form successive products of the span with itself.  A nilpotent subalgebra
/// of d-by-d matrices is simultaneously strictly triangularizable, so it
/// dies by the d-th power; if the d-th power is nonzero the algebra cannot
/// be nilpotent.
pub fn nilpotency_test(set: &CompactSet) -> bool {
    let n = set.dim();
    let mut ech: Vec<(usize, Vec<Q>)> = vec![];
    let mut basis: Vec<SMatrix> = vec![];
    let mut frontier: Vec<SMatrix> = vec![];
    for a in set.elements() {
        if reduce_insert(&mut ech, a.e.clone()) {
            basis.push(a.clone());
            frontier.push(a.clone());
        }
    }
    while !frontier.is_empty() {
        let mut next: Vec<SMatrix> = vec![];
        for m in &frontier {
            for a in set.elements() {
                let prod = m.mul(a);
                if reduce_insert(&mut ech, prod.e.clone()) {
                    basis.push(prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }

    let mut cur = basis.clone();
    for _ in 1..n {
        if cur.is_empty() {
            return true;
        }
        let mut ech_k: Vec<(usize, Vec<Q>)> = vec![];
        let mut next: Vec<SMatrix> = vec![];
        for x in &cur {
            for b in &basis {
                let prod = x.mul(b);
                if reduce_insert(&mut ech_k, prod.e.clone()) {
                    next.push(prod);
                }
            }
        }
        cur = next;
    }
    cur.is_empty() || cur.iter().all(|m| m.e.iter().all(|x| x.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn qi(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    fn set_inf(mats: Vec<SMatrix>) -> CompactSet {
        CompactSet::new(Place::Infinity, mats).unwrap()
    }

    #[test]
    fn identity_set_has_unit_lambda() {
        let set = set_inf(vec![SMatrix::identity(2)]);
        for i in 1..=4 {
            let lb = lambda_of_power_set(&set, i, &ProductBudget::default(), 64).unwrap();
            assert_eq!(lb.sq_exact(), Some(&qi(1)));
            assert!(lb.value().to_ball(64).contains_q(&qi(1)));
        }
    }

    #[test]
    fn unipotent_pair_square_reaches_golden_ratio_growth() {
        let u = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let l = SMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        let set = set_inf(vec![u, l]);
        let lb1 = lambda_of_power_set(&set, 1, &ProductBudget::default(), 64).unwrap();
        assert_eq!(lb1.sq_exact(), Some(&qi(1)));
        let lb2 = lambda_of_power_set(&set, 2, &ProductBudget::default(), 64).unwrap();
        // the product of the two shears has trace 3 and determinant 1, so the
        // top eigenvalue is (3 + sqrt 5)/2; irrational, hence no exact square
        assert!(lb2.sq_exact().is_none());
        let got = lb2.value().to_ball(64).to_f64();
        assert!((got - (3.0 + 5.0_f64.sqrt()) / 2.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn nilpotent_singleton_has_zero_lambda() {
        let n = SMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let set = set_inf(vec![n]);
        for i in 1..=4 {
            let lb = lambda_of_power_set(&set, i, &ProductBudget::default(), 64).unwrap();
            assert!(lb.is_zero());
            assert_eq!(lb.sq_exact(), Some(&Q::zero()));
        }
    }

    #[test]
    fn symmetric_involution_exposes_exact_square_two() {
        // eigenvalues are +-sqrt(2): irreducible factor x^2 - 2
        let s = SMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        let set = set_inf(vec![s]);
        let lb = lambda_of_power_set(&set, 1, &ProductBudget::default(), 64).unwrap();
        assert_eq!(lb.sq_exact(), Some(&qi(2)));
    }

    #[test]
    fn rotation_exposes_exact_unit_modulus() {
        // char poly x^2 - x + 1 has complex roots of modulus 1
        let r = SMatrix::from_i64(&[&[1, -1], &[1, 0]]);
        let set = set_inf(vec![r]);
        let lb = lambda_of_power_set(&set, 1, &ProductBudget::default(), 64).unwrap();
        assert_eq!(lb.sq_exact(), Some(&qi(1)));
    }

    #[test]
    fn free_growth_exhausts_a_tiny_budget() {
        let a = SMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        let b = SMatrix::from_i64(&[&[1, 0], &[2, 1]]);
        let set = set_inf(vec![a, b]);
        let budget = ProductBudget { max_products: 5 };
        assert_eq!(
            lambda_of_power_set(&set, 3, &budget, 64).unwrap_err(),
            CompError::BudgetExceeded
        );
    }

    #[test]
    fn duplicate_listings_collapse_before_budgeting() {
        let m = SMatrix::diagonal(&[qi(2), Q::new(BigInt::from(1), BigInt::from(2))]);
        let set = set_inf(vec![m.clone(), m]);
        // one distinct matrix per level: 2 + 2 + 2 products at i = 4 stays
        // within a budget that plain 2^4 enumeration would blow through
        let budget = ProductBudget { max_products: 8 };
        let lb = lambda_of_power_set(&set, 4, &budget, 64).unwrap();
        assert_eq!(lb.sq_exact(), Some(&qi(256)));
    }

    #[test]
    fn padic_diagonal_lambda_is_exact() {
        let m = SMatrix::diagonal(&[qi(4), Q::new(BigInt::from(1), BigInt::from(4))]);
        let set = CompactSet::new(Place::Finite(2), vec![m]).unwrap();
        for i in 1..=4i64 {
            let lb = lambda_of_power_set(&set, i as usize, &ProductBudget::default(), 64).unwrap();
            match lb.value() {
                Mag::Padic(pm) => assert_eq!(pm.exp(), Some(&qi(2 * i))),
                Mag::Real(_) => panic!("expected a finite-place magnitude"),
            }
        }
    }

    #[test]
    fn strictly_upper_pair_is_nilpotent_and_matches_lambda() {
        let a = SMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let b = SMatrix::from_i64(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]);
        let set = set_inf(vec![a, b]);
        assert!(nilpotency_test(&set));
        for i in 1..=9 {
            let lb = lambda_of_power_set(&set, i, &ProductBudget::default(), 64).unwrap();
            assert!(lb.is_zero(), "lambda nonzero at power {i}");
        }
    }

    #[test]
    fn identity_is_not_nilpotent() {
        let set = set_inf(vec![SMatrix::identity(2)]);
        assert!(!nilpotency_test(&set));
        let lb = lambda_of_power_set(&set, 1, &ProductBudget::default(), 64).unwrap();
        assert!(!lb.is_zero());
    }

    #[test]
    fn opposite_nilpotents_generate_a_non_nilpotent_algebra() {
        // e12 and e21 are each nilpotent but their product is idempotent
        let a = SMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let b = SMatrix::from_i64(&[&[0, 0], &[1, 0]]);
        let set = set_inf(vec![a, b]);
        assert!(!nilpotency_test(&set));
        let lb = lambda_of_power_set(&set, 2, &ProductBudget::default(), 64).unwrap();
        assert!(!lb.is_zero());
        assert_eq!(lb.sq_exact(), Some(&qi(1)));
    }
}
