//! Projective points, hyperplanes, and the standard metric over a place.
//!
//! Representatives are exact rational vectors in a canonical normalization:
//! p-adically the first entry of minimal valuation is scaled to 1 (so the
//! max-norm is exactly 1 and equality of points is equality of
//! representatives); at the archimedean place the vector is scaled by a
//! dyadic approximation of its Euclidean norm, leaving the squared norm a
//! rational certified within 2^-40 of 1, with the first nonzero coordinate
//! positive.
//!
//! Distances follow the scale-invariant formulas d([v],[w]) = ‖v∧w‖/(‖v‖‖w‖)
//! and d([v],[ker f]) = |f(v)|/(‖f‖‖v‖), evaluated on the *squared* level at
//! the archimedean place, where they are exact rationals; enclosures only
//! enter when a square root is finally demanded.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::SMatrix;
use crate::places::{val_q, Ball, Mag, PMag, Place};
use crate::Q;

/// Bits in the dyadic scale that brings archimedean representatives to
/// (approximately) unit norm.
const NORM_SNAP_BITS: u32 = 48;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("zero vector does not represent a projective point")]
    ZeroVector,
    #[error("operands live at different places")]
    PlaceMismatch,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("working precision exhausted")]
    PrecisionExhausted,
}

/// A point of P^{d-1} over the completion at `place`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    rep: Vec<Q>,
    place: Place,
}

/// A projective hyperplane ker f, stored through the coefficient vector of
/// the linear form f in the same canonical normalization as points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjHyperplane {
    form: Vec<Q>,
    place: Place,
}

/// Scale a nonzero rational vector into the canonical normalization for
/// `place`; see the module docs.
fn normalize(mut v: Vec<Q>, place: Place) -> Result<Vec<Q>, GeomError> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(GeomError::ZeroVector);
    }
    match place {
        Place::Finite(p) => {
            let mut pivot: Option<(usize, i64)> = None;
            for (i, x) in v.iter().enumerate() {
                if let Some(val) = val_q(x, p) {
                    if pivot.map_or(true, |(_, m)| val < m) {
                        pivot = Some((i, val));
                    }
                }
            }
            let (i, _) = pivot.unwrap();
            let c = v[i].clone();
            for x in v.iter_mut() {
                *x /= &c;
            }
        }
        Place::Infinity => {
            let lead = v.iter().find(|x| !x.is_zero()).unwrap();
            if lead.is_negative() {
                for x in v.iter_mut() {
                    *x = -x.clone();
                }
            }
            let n2 = vec_norm_sq_q(&v);
            let c = Ball::from_q(&n2, NORM_SNAP_BITS)
                .sqrt_nonneg(NORM_SNAP_BITS)
                .unwrap()
                .mid()
                .to_q();
            for x in v.iter_mut() {
                *x /= &c;
            }
        }
    }
    Ok(v)
}

impl ProjPoint {
    pub fn new(rep: Vec<Q>, place: Place) -> Result<Self, GeomError> {
        let rep = normalize(rep, place)?;
        Ok(ProjPoint { rep, place })
    }

    /// The point [e_i].
    pub fn standard(i: usize, dim: usize, place: Place) -> Self {
        assert!(i < dim);
        let mut rep = vec![Q::zero(); dim];
        rep[i] = Q::one();
        ProjPoint { rep, place }
    }

    pub fn rep(&self) -> &[Q] {
        &self.rep
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// The image point [g v].
    pub fn apply(&self, g: &SMatrix) -> Result<ProjPoint, GeomError> {
        if g.n != self.dim() {
            return Err(GeomError::DimensionMismatch);
        }
        ProjPoint::new(g.mul_vec(&self.rep), self.place)
    }
}

impl ProjHyperplane {
    pub fn new(form: Vec<Q>, place: Place) -> Result<Self, GeomError> {
        let form = normalize(form, place)?;
        Ok(ProjHyperplane { form, place })
    }

    /// The hyperplane ker e_i* = {x : x_i = 0}.
    pub fn coordinate(i: usize, dim: usize, place: Place) -> Self {
        assert!(i < dim);
        let mut form = vec![Q::zero(); dim];
        form[i] = Q::one();
        ProjHyperplane { form, place }
    }

    pub fn form(&self) -> &[Q] {
        &self.form
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn dim(&self) -> usize {
        self.form.len()
    }

    pub fn eval(&self, v: &[Q]) -> Q {
        assert_eq!(v.len(), self.form.len());
        self.form
            .iter()
            .zip(v)
            .fold(Q::zero(), |acc, (f, x)| acc + f * x)
    }

    pub fn contains(&self, x: &ProjPoint) -> bool {
        self.place == x.place && self.eval(x.rep()).is_zero()
    }

    /// The image hyperplane g·(ker f) = ker(f ∘ g^{-1}).
    pub fn apply(&self, g: &SMatrix) -> Result<ProjHyperplane, GeomError> {
        if g.n != self.dim() {
            return Err(GeomError::DimensionMismatch);
        }
        let ginv = g.inverse().expect("projective transformation is invertible");
        ProjHyperplane::new(ginv.transpose().mul_vec(&self.form), self.place)
    }
}

pub fn vec_norm_sq_q(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |acc, x| acc + x * x)
}

/// Squared Euclidean norm of v ∧ w: the sum of squared 2x2 minors.
fn wedge_norm_sq_q(v: &[Q], w: &[Q]) -> Q {
    let n = v.len();
    let mut out = Q::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = &v[i] * &w[j] - &v[j] * &w[i];
            out += &m * &m;
        }
    }
    out
}

/// d([v],[w])^2 at the archimedean place, as an exact rational.
pub fn proj_dist_sq_inf(x: &ProjPoint, y: &ProjPoint) -> Q {
    assert_eq!(x.place, Place::Infinity);
    assert_eq!(y.place, Place::Infinity);
    proj_dist_sq_raw_inf(&x.rep, &y.rep)
}

/// The same squared distance on raw (not necessarily normalized)
/// representatives; the formula is scale invariant.
pub fn proj_dist_sq_raw_inf(v: &[Q], w: &[Q]) -> Q {
    assert_eq!(v.len(), w.len());
    wedge_norm_sq_q(v, w) / (vec_norm_sq_q(v) * vec_norm_sq_q(w))
}

/// d([v],[w]) at a finite place: max p-adic Plücker coordinate over the
/// product of max-norms. Exact.
fn proj_dist_p(v: &[Q], w: &[Q], p: u64) -> PMag {
    let n = v.len();
    let mut num = PMag::zero(p);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = &v[i] * &w[j] - &v[j] * &w[i];
            num = num.max(PMag::from_q(&m, p));
        }
    }
    let den = crate::places::vec_norm_p(v, p).mul(&crate::places::vec_norm_p(w, p));
    num.mul(&den.recip())
}

/// The standard projective metric d([v],[w]) = ‖v∧w‖ / (‖v‖·‖w‖).
pub fn proj_dist(x: &ProjPoint, y: &ProjPoint, prec: u32) -> Mag {
    assert_eq!(x.place, y.place, "distance across places");
    match x.place {
        Place::Infinity => {
            let sq = proj_dist_sq_inf(x, y);
            Mag::Real(Ball::from_q(&sq, prec).sqrt_nonneg(prec).unwrap())
        }
        Place::Finite(p) => Mag::Padic(proj_dist_p(&x.rep, &y.rep, p)),
    }
}

/// d([v], [ker f])^2 = f(v)^2 / (‖f‖^2 ‖v‖^2) at the archimedean place.
pub fn dist_to_hyperplane_sq_inf(x: &ProjPoint, h: &ProjHyperplane) -> Q {
    assert_eq!(x.place, Place::Infinity);
    assert_eq!(h.place, Place::Infinity);
    dist_to_hyperplane_sq_raw_inf(&h.form, &x.rep)
}

/// The same squared distance on raw representatives (scale invariant).
pub fn dist_to_hyperplane_sq_raw_inf(f: &[Q], v: &[Q]) -> Q {
    assert_eq!(f.len(), v.len());
    let fv: Q = f.iter().zip(v).map(|(a, b)| a * b).sum();
    (&fv * &fv) / (vec_norm_sq_q(f) * vec_norm_sq_q(v))
}

/// Distance from a point to a hyperplane, |f(v)| / (‖f‖·‖v‖).
pub fn dist_to_hyperplane(x: &ProjPoint, h: &ProjHyperplane, prec: u32) -> Mag {
    assert_eq!(x.place, h.place, "distance across places");
    match x.place {
        Place::Infinity => {
            let sq = dist_to_hyperplane_sq_inf(x, h);
            Mag::Real(Ball::from_q(&sq, prec).sqrt_nonneg(prec).unwrap())
        }
        Place::Finite(p) => {
            let num = PMag::from_q(&h.eval(x.rep()), p);
            let den = crate::places::vec_norm_p(&h.form, p)
                .mul(&crate::places::vec_norm_p(x.rep(), p));
            Mag::Padic(num.mul(&den.recip()))
        }
    }
}

/// Enclosure of d^2 between interval vectors at the archimedean place, for
/// grid verification: None when a norm cannot be bounded away from zero.
pub fn proj_dist_sq_balls(v: &[Ball], w: &[Ball], prec: u32) -> Option<Ball> {
    assert_eq!(v.len(), w.len());
    let n = v.len();
    let mut wedge = Ball::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = v[i].mul(&w[j], prec).sub(&v[j].mul(&w[i], prec), prec);
            wedge = wedge.add(&m.mul(&m, prec), prec);
        }
    }
    let den = ball_norm_sq(v, prec).mul(&ball_norm_sq(w, prec), prec);
    wedge.div(&den, prec)
}

/// Enclosure of d(·, ker f)^2 on an interval vector, f exact rational.
pub fn dist_to_hyperplane_sq_balls(f: &[Q], v: &[Ball], prec: u32) -> Option<Ball> {
    assert_eq!(f.len(), v.len());
    let mut fv = Ball::zero();
    for (c, x) in f.iter().zip(v) {
        fv = fv.add(&x.mul(&Ball::from_q(c, prec), prec), prec);
    }
    let fn2 = Ball::from_q(&vec_norm_sq_q(f), prec);
    let den = fn2.mul(&ball_norm_sq(v, prec), prec);
    fv.mul(&fv, prec).div(&den, prec)
}

pub fn ball_norm_sq(v: &[Ball], prec: u32) -> Ball {
    v.iter()
        .fold(Ball::zero(), |acc, x| acc.add(&x.mul(x, prec), prec))
}
