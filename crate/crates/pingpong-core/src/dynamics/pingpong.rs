//! Proximal and ping-pong certificates, and the exhaustive freeness oracle.
//!
//! A contraction certificate upgrades to an (r, eps)-proximal one when
//! r > 2*eps and the attracting point stays r-away from the repelling
//! hyperplane; an element is very proximal when it and its inverse both are.
//! Two very proximal elements with common (r, eps) play ping-pong when each
//! attracting point keeps distance at least r from both repelling
//! hyperplanes of the other element — eight separation checks, all exact
//! rational comparisons since the stored axes are rational.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{SMatrix, Word};
use crate::places::{Mag, Place};
use crate::projgeom::{dist_to_hyperplane, dist_to_hyperplane_sq_inf, ProjHyperplane, ProjPoint};
use crate::Q;

use super::contraction::{Comparison, ContractionCert, DynError};
use crate::places::Verdict;

/// d([v], [H]) >= r, decided exactly: squared rational comparison at the
/// archimedean place, magnitude comparison at a finite one.
fn separated(att: &ProjPoint, rep: &ProjHyperplane, r: &Q) -> bool {
    assert_eq!(att.place(), rep.place());
    match att.place() {
        Place::Infinity => dist_to_hyperplane_sq_inf(att, rep) >= r * r,
        Place::Finite(_) => match dist_to_hyperplane(att, rep, 32) {
            Mag::Padic(m) => m.cmp_q(r) != Ordering::Less,
            Mag::Real(_) => unreachable!("finite place"),
        },
    }
}

/// An (r, eps)-proximal certificate: eps-contracting, with r > 2*eps and the
/// attracting point r-separated from the repelling hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximalCert {
    contraction: ContractionCert,
    r: Q,
}

impl ProximalCert {
    pub fn new(contraction: ContractionCert, r: Q) -> Result<Self, DynError> {
        let two_eps = contraction.epsilon() + contraction.epsilon();
        if r <= two_eps {
            return Err(DynError::RadiusTooSmall);
        }
        if !separated(contraction.attracting(), contraction.repelling(), &r) {
            return Err(DynError::SeparationFails(vec![
                "d(attracting, repelling) < r".to_string(),
            ]));
        }
        Ok(ProximalCert { contraction, r })
    }

    pub fn contraction(&self) -> &ContractionCert {
        &self.contraction
    }

    pub fn r(&self) -> &Q {
        &self.r
    }

    pub fn epsilon(&self) -> &Q {
        self.contraction.epsilon()
    }

    pub fn attracting(&self) -> &ProjPoint {
        self.contraction.attracting()
    }

    pub fn repelling(&self) -> &ProjHyperplane {
        self.contraction.repelling()
    }

    pub fn place(&self) -> Place {
        self.contraction.place()
    }
}

/// Very proximal: proximal certificates for the element and its inverse,
/// with matching place, radius, and contraction scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeryProximalCert {
    forward: ProximalCert,
    backward: ProximalCert,
}

impl VeryProximalCert {
    pub fn new(forward: ProximalCert, backward: ProximalCert) -> Result<Self, DynError> {
        if forward.place() != backward.place() {
            return Err(DynError::PlaceMismatch);
        }
        if forward.epsilon() != backward.epsilon() || forward.r() != backward.r() {
            return Err(DynError::IncompatibleCerts(
                "forward and backward certificates disagree on (r, eps)".to_string(),
            ));
        }
        Ok(VeryProximalCert { forward, backward })
    }

    pub fn forward(&self) -> &ProximalCert {
        &self.forward
    }

    pub fn backward(&self) -> &ProximalCert {
        &self.backward
    }

    pub fn place(&self) -> Place {
        self.forward.place()
    }

    pub fn epsilon(&self) -> &Q {
        self.forward.epsilon()
    }

    pub fn r(&self) -> &Q {
        self.forward.r()
    }

    /// The certificate for the inverse element: swap the two directions.
    pub fn inverse(&self) -> VeryProximalCert {
        VeryProximalCert {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }
}

/// A ping-pong certificate for a pair of words: both very proximal at a
/// common place with common (r, eps), plus the eight cross-separations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PingPongCert {
    word_x: Word,
    word_y: Word,
    cert_x: VeryProximalCert,
    cert_y: VeryProximalCert,
    separations: Vec<Comparison>,
}

impl PingPongCert {
    pub fn word_x(&self) -> &Word {
        &self.word_x
    }

    pub fn word_y(&self) -> &Word {
        &self.word_y
    }

    pub fn cert_x(&self) -> &VeryProximalCert {
        &self.cert_x
    }

    pub fn cert_y(&self) -> &VeryProximalCert {
        &self.cert_y
    }

    pub fn separations(&self) -> &[Comparison] {
        &self.separations
    }

    pub fn place(&self) -> Place {
        self.cert_x.place()
    }

    pub fn epsilon(&self) -> &Q {
        self.cert_x.epsilon()
    }

    pub fn r(&self) -> &Q {
        self.cert_x.r()
    }
}

/// Check the ping-pong position of two very proximal elements: the
/// attracting points of x^{+-1} against the repelling hyperplanes of
/// y^{+-1} and vice versa, all at distance >= r.
pub fn verify_ping_pong(
    word_x: &Word,
    word_y: &Word,
    cert_x: &VeryProximalCert,
    cert_y: &VeryProximalCert,
) -> Result<PingPongCert, DynError> {
    if cert_x.place() != cert_y.place() {
        return Err(DynError::PlaceMismatch);
    }
    if cert_x.epsilon() != cert_y.epsilon() || cert_x.r() != cert_y.r() {
        return Err(DynError::IncompatibleCerts(
            "the two generators disagree on (r, eps)".to_string(),
        ));
    }
    let r = cert_x.r();
    let two_eps = cert_x.epsilon() + cert_x.epsilon();
    if *r <= two_eps {
        return Err(DynError::RadiusTooSmall);
    }
    let x_atts = [
        ("x+", cert_x.forward().attracting()),
        ("x-", cert_x.backward().attracting()),
    ];
    let x_reps = [
        ("x+", cert_x.forward().repelling()),
        ("x-", cert_x.backward().repelling()),
    ];
    let y_atts = [
        ("y+", cert_y.forward().attracting()),
        ("y-", cert_y.backward().attracting()),
    ];
    let y_reps = [
        ("y+", cert_y.forward().repelling()),
        ("y-", cert_y.backward().repelling()),
    ];
    let mut separations = Vec::with_capacity(8);
    let mut failures = Vec::new();
    let mut check = |atts: &[(&str, &ProjPoint); 2], reps: &[(&str, &ProjHyperplane); 2]| {
        for (an, att) in atts {
            for (rn, rep) in reps {
                let ok = separated(att, rep, r);
                let what = format!("d(att({an}), rep({rn})) >= {r}");
                if !ok {
                    failures.push(what.clone());
                }
                separations.push(Comparison {
                    what,
                    verdict: Verdict::from_bool(ok),
                });
            }
        }
    };
    check(&x_atts, &y_reps);
    check(&y_atts, &x_reps);
    if !failures.is_empty() {
        return Err(DynError::SeparationFails(failures));
    }
    Ok(PingPongCert {
        word_x: word_x.clone(),
        word_y: word_y.clone(),
        cert_x: cert_x.clone(),
        cert_y: cert_y.clone(),
        separations,
    })
}

/// A rational matrix with denominators cleared: scale * m is integral.
/// Products of these avoid the gcd work of rational arithmetic, which
/// dominates an exhaustive word enumeration.
struct Cleared {
    entries: Vec<BigInt>,
    scale: BigInt,
}

fn clear_denominators(m: &SMatrix) -> Cleared {
    let scale = m
        .e
        .iter()
        .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let entries = m
        .e
        .iter()
        .map(|x| x.numer() * (&scale / x.denom()))
        .collect();
    Cleared { entries, scale }
}

fn int_mat_mul(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * &b[k * n + j];
            }
        }
    }
    out
}

fn is_scaled_identity(n: usize, a: &[BigInt], s: &BigInt) -> bool {
    for i in 0..n {
        for j in 0..n {
            let ok = if i == j { &a[i * n + j] == s } else { a[i * n + j].is_zero() };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Exhaustive freeness check to a depth: enumerate all reduced words in x, y
/// of length <= max_len, shortest first, and return the first one that
/// evaluates to the identity (None means no relation up to that length).
///
/// This is the ground truth that ping-pong certificates are tested against;
/// it is exponential in max_len and meant for modest depths.
pub fn free_word_oracle(x: &SMatrix, y: &SMatrix, max_len: u64) -> Option<Word> {
    assert_eq!(x.n, y.n);
    let n = x.n;
    let letters: Vec<Cleared> = [
        x.clone(),
        x.inverse().expect("generator must be invertible"),
        y.clone(),
        y.inverse().expect("generator must be invertible"),
    ]
    .iter()
    .map(clear_denominators)
    .collect();
    let inverse_of = [1usize, 0, 3, 2];

    struct Dfs<'a> {
        n: usize,
        letters: &'a [Cleared],
        inverse_of: [usize; 4],
    }

    impl Dfs<'_> {
        fn run(
            &self,
            prod: &[BigInt],
            scale: &BigInt,
            last: Option<usize>,
            depth_left: u64,
            path: &mut Vec<usize>,
        ) -> bool {
            if depth_left == 0 {
                return is_scaled_identity(self.n, prod, scale);
            }
            for l in 0..4 {
                if last == Some(self.inverse_of[l]) {
                    continue;
                }
                path.push(l);
                let next = int_mat_mul(self.n, prod, &self.letters[l].entries);
                let next_scale = scale * &self.letters[l].scale;
                if self.run(&next, &next_scale, Some(l), depth_left - 1, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
    }

    let dfs = Dfs {
        n,
        letters: &letters,
        inverse_of,
    };
    let mut id = vec![BigInt::zero(); n * n];
    for i in 0..n {
        id[i * n + i] = BigInt::one();
    }

    // iterative deepening: report the shortest relation
    for len in 1..=max_len {
        let mut path = Vec::with_capacity(len as usize);
        if dfs.run(&id, &BigInt::one(), None, len, &mut path) {
            let letters_as_word: Vec<(usize, i64)> = path
                .iter()
                .map(|&l| match l {
                    0 => (0, 1),
                    1 => (0, -1),
                    2 => (1, 1),
                    _ => (1, -1),
                })
                .collect();
            return Some(Word { letters: letters_as_word }.reduced());
        }
    }
    None
}
