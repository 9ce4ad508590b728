//! Formal words over a generating set, symmetric generating sets with prime-support
//! validation, and exact ball enumeration with canonical deduplication.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::SMatrix;
use crate::Q;

/// The primes allowed in denominators: entries live in Z[1/p1...1/pk].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSupport {
    primes: Vec<u64>,
}

impl PrimeSupport {
    pub fn new(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        for &p in &primes {
            assert!(is_prime_u64(p), "{p} is not prime");
        }
        PrimeSupport { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// True when the denominator of q factors entirely over the support.
    pub fn supports(&self, q: &Q) -> bool {
        let mut den = q.denom().abs();
        for &p in &self.primes {
            let pb = BigInt::from(p);
            while (&den % &pb).is_zero() {
                den /= &pb;
            }
        }
        den.is_one()
    }

    pub fn supports_matrix(&self, m: &SMatrix) -> bool {
        m.e.iter().all(|q| self.supports(q))
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Formal word over generator indices: a sequence of (generator, exponent) with
/// nonzero exponents. `len` counts letters with multiplicity (word length in the
/// generating alphabet); concatenation does not auto-reduce.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: vec![] }
    }

    pub fn gen(i: usize) -> Self {
        Word {
            letters: vec![(i, 1)],
        }
    }

    pub fn gen_pow(i: usize, e: i64) -> Self {
        if e == 0 {
            Word::empty()
        } else {
            Word {
                letters: vec![(i, e)],
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total letter count (sum of |exponent|).
    pub fn len(&self) -> u64 {
        self.letters.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|&(i, e)| (i, -e))
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        if k == 0 {
            return Word::empty();
        }
        let base = if k > 0 { self.clone() } else { self.inverse() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Free reduction over the formal alphabet: merge adjacent powers of the same
    /// generator, dropping zero exponents.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<(usize, i64)> = vec![];
        for &(i, e) in &self.letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((j, f)) if *j == i => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((i, e)),
            }
        }
        Word { letters: out }
    }

    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    format!("g{i}")
                } else {
                    format!("g{i}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenSetError {
    #[error("generator {index} has determinant {det}, expected 1")]
    BadDeterminant { index: usize, det: String },
    #[error("generator {index} has an entry with denominator outside the prime support")]
    UnsupportedDenominator { index: usize },
    #[error("generator {index} is {got}x{got}, expected {want}x{want}")]
    DimensionMismatch { index: usize, got: usize, want: usize },
    #[error("ball enumeration exceeded budget of {budget} elements")]
    BudgetExceeded { budget: usize },
}

/// Symmetric generating set of a subgroup of SL_d(Z[1/p1..1/pk]).
/// Stored generators exclude the identity and are closed under inverse;
/// the identity is always considered part of the set for ball growth.
#[derive(Clone, Debug)]
pub struct GenSet {
    pub dim: usize,
    pub support: PrimeSupport,
    gens: Vec<SMatrix>,
    inv_index: Vec<usize>,
}

impl GenSet {
    /// Validates dimension, determinant 1, and denominator support; drops identity
    /// elements and duplicates; adds missing inverses when `symmetric_closure`.
    pub fn new(
        dim: usize,
        support: PrimeSupport,
        gens: Vec<SMatrix>,
        symmetric_closure: bool,
    ) -> Result<Self, GenSetError> {
        let mut list: Vec<SMatrix> = vec![];
        for (index, g) in gens.into_iter().enumerate() {
            if g.n != dim {
                return Err(GenSetError::DimensionMismatch {
                    index,
                    got: g.n,
                    want: dim,
                });
            }
            let det = g.det();
            if !det.is_one() {
                return Err(GenSetError::BadDeterminant {
                    index,
                    det: det.to_string(),
                });
            }
            if !support.supports_matrix(&g) {
                return Err(GenSetError::UnsupportedDenominator { index });
            }
            if g.is_identity() || list.contains(&g) {
                continue;
            }
            list.push(g);
        }
        if symmetric_closure {
            let mut inverses = vec![];
            for g in &list {
                let inv = g.inverse().expect("det-1 matrix is invertible");
                if !list.contains(&inv) && !inverses.contains(&inv) {
                    inverses.push(inv);
                }
            }
            list.extend(inverses);
        }
        let inv_index = list
            .iter()
            .map(|g| {
                let inv = g.inverse().unwrap();
                list.iter()
                    .position(|h| *h == inv)
                    .expect("generating set is not symmetric")
            })
            .collect();
        Ok(GenSet {
            dim,
            support,
            gens: list,
            inv_index,
        })
    }

    pub fn gens(&self) -> &[SMatrix] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inv_index[i]
    }

    /// Evaluate a formal word into the group.
    pub fn eval(&self, w: &Word) -> SMatrix {
        let mut acc = SMatrix::identity(self.dim);
        for &(i, e) in &w.letters {
            acc = acc.mul(&self.gens[i].pow_i(e));
        }
        acc
    }

    /// The ball of radius `n`: all products of at most n generators (the identity
    /// included). Returns the cumulative element sets B_0 ⊆ B_1 ⊆ ... ⊆ B_n.
    /// Errors out when the total element count would exceed `budget`.
    pub fn enumerate_ball(
        &self,
        n: usize,
        budget: usize,
    ) -> Result<Vec<BTreeSet<SMatrix>>, GenSetError> {
        let mut seen: BTreeSet<SMatrix> = BTreeSet::new();
        seen.insert(SMatrix::identity(self.dim));
        let mut frontier: Vec<SMatrix> = seen.iter().cloned().collect();
        let mut balls = vec![seen.clone()];
        for _ in 1..=n {
            let mut next_frontier = vec![];
            for m in &frontier {
                for g in &self.gens {
                    let prod = m.mul(g);
                    if seen.insert(prod.clone()) {
                        if seen.len() > budget {
                            return Err(GenSetError::BudgetExceeded { budget });
                        }
                        next_frontier.push(prod);
                    }
                }
            }
            frontier = next_frontier;
            balls.push(seen.clone());
        }
        Ok(balls)
    }

    /// Ball cardinalities |B_0|, ..., |B_n|.
    pub fn ball_sizes(&self, n: usize, budget: usize) -> Result<Vec<usize>, GenSetError> {
        Ok(self
            .enumerate_ball(n, budget)?
            .iter()
            .map(|b| b.len())
            .collect())
    }

    /// All reduced nonempty words of length <= max_len over the formal alphabet,
    /// in breadth-first lexicographic order. "Reduced" here: no letter directly
    /// followed by its formal inverse generator (index-level cancellation).
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![];
        let mut frontier: Vec<Word> = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = vec![];
            for w in &frontier {
                for i in 0..self.gens.len() {
                    if let Some(&(last, _)) = w.letters.last() {
                        if self.inv_index[last] == i {
                            continue;
                        }
                    }
                    let w2 = w.concat(&Word::gen(i));
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2z_st() -> GenSet {
        // S = [[0,-1],[1,0]], T = [[1,1],[0,1]]
        let s = SMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        GenSet::new(2, PrimeSupport::new(vec![]), vec![s, t], true).unwrap()
    }

    #[test]
    fn prime_support_checks_denominators() {
        let s = PrimeSupport::new(vec![2, 5]);
        let q = |n: i64, d: i64| Q::new(BigInt::from(n), BigInt::from(d));
        assert!(s.supports(&q(3, 40))); // 40 = 2^3 * 5
        assert!(!s.supports(&q(1, 3)));
        assert!(s.supports(&q(7, 1)));
        assert!(PrimeSupport::new(vec![]).supports(&q(5, 1)));
        assert!(!PrimeSupport::new(vec![]).supports(&q(1, 2)));
    }

    #[test]
    fn genset_rejects_bad_matrices() {
        let bad = SMatrix::from_i64(&[&[2, 0], &[0, 1]]); // det 2
        let err = GenSet::new(2, PrimeSupport::new(vec![]), vec![bad], true).unwrap_err();
        assert!(matches!(err, GenSetError::BadDeterminant { .. }));

        let unsupported = SMatrix::new(
            2,
            vec![
                Q::new(BigInt::from(1), BigInt::from(3)),
                Q::zero(),
                Q::zero(),
                Q::new(BigInt::from(3), BigInt::from(1)),
            ],
        );
        let err = GenSet::new(2, PrimeSupport::new(vec![2]), vec![unsupported], true).unwrap_err();
        assert!(matches!(err, GenSetError::UnsupportedDenominator { .. }));
    }

    #[test]
    fn symmetric_closure_adds_inverses() {
        let t = SMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let gs = GenSet::new(2, PrimeSupport::new(vec![]), vec![t.clone()], true).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs.inverse_index(0), 1);
        assert_eq!(gs.gens()[1], t.inverse().unwrap());
    }

    #[test]
    fn word_eval_is_a_homomorphism() {
        let gs = sl2z_st();
        let w1 = Word {
            letters: vec![(0, 1), (1, 2)],
        };
        let w2 = Word {
            letters: vec![(1, -1), (0, 3)],
        };
        let lhs = gs.eval(&w1.concat(&w2));
        let rhs = gs.eval(&w1).mul(&gs.eval(&w2));
        assert_eq!(lhs, rhs);
        assert_eq!(gs.eval(&w1.inverse()), gs.eval(&w1).inverse().unwrap());
    }

    #[test]
    fn reduction_cancels_formal_inverses() {
        let w = Word {
            letters: vec![(0, 2), (0, -2), (1, 1), (1, 1), (0, 1)],
        };
        let r = w.reduced();
        assert_eq!(r.letters, vec![(1, 2), (0, 1)]);
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn ball_growth_in_sl2z() {
        let gs = sl2z_st();
        let sizes = gs.ball_sizes(4, 1_000_000).unwrap();
        assert_eq!(sizes[0], 1);
        // S, S^-1 = S^3, T, T^-1 are distinct: |B_1| = 5
        assert_eq!(sizes[1], 5);
        // strict growth
        for i in 1..sizes.len() {
            assert!(sizes[i] > sizes[i - 1]);
        }
        // submultiplicativity |B_{m+n}| <= |B_m| * |B_n|
        assert!(sizes[4] <= sizes[2] * sizes[2]);
        assert!(sizes[3] <= sizes[1] * sizes[2]);
    }

    #[test]
    fn ball_budget_is_enforced() {
        let gs = sl2z_st();
        let err = gs.enumerate_ball(6, 10).unwrap_err();
        assert!(matches!(err, GenSetError::BudgetExceeded { budget: 10 }));
    }

    #[test]
    fn free_pair_ball_matches_closed_form() {
        // Sanov generators: free of rank 2; |B_n| = 2 * 3^n - 1
        let x = SMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        let y = SMatrix::from_i64(&[&[1, 0], &[2, 1]]);
        let gs = GenSet::new(2, PrimeSupport::new(vec![]), vec![x, y], true).unwrap();
        let sizes = gs.ball_sizes(5, 1_000_000).unwrap();
        for (n, &size) in sizes.iter().enumerate() {
            assert_eq!(size, 2 * 3usize.pow(n as u32) - 1);
        }
    }

    #[test]
    fn words_up_to_counts_reduced_words() {
        let gs = sl2z_st();
        // 4 generators, reduced words: 4 * 3^(L-1) of each length L
        let words = gs.words_up_to(3);
        assert_eq!(words.len(), 4 + 12 + 36);
        assert!(words.iter().all(|w| !w.is_empty()));
    }
}
