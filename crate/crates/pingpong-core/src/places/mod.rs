//! Certified scalar arithmetic at the places of Q.
//!
//! The archimedean place gets midpoint-radius interval arithmetic over dyadic
//! rationals ([`Ball`]); finite places get exact magnitudes as rational powers
//! of p ([`PMag`]). Comparisons return three-valued [`Verdict`]s: a `True` or
//! `False` is a proof, `Undecided` tells the caller to retry at higher
//! precision or give up.

pub mod ball;
pub mod dyadic;
pub mod padic;
pub mod spectral;

pub use ball::{ln2_ball, Ball};
pub use dyadic::Dyadic;
pub use padic::{op_norm_p, val_bigint, val_q, vec_norm_p, PMag};
pub use spectral::{
    lambda_at, lambda_inf, lambda_p, lambda_sq_inf, max_root_abs_inf, max_root_abs_p, op_norm_at,
    op_norm_inf, real_roots_desc, root_valuations_p, singular_values_inf, RealRoot, SingularValue,
};

/// A place of Q: the archimedean absolute value or a p-adic one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undecided,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    /// Three-valued conjunction: False dominates, then Undecided.
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::Undecided, _) | (_, Verdict::Undecided) => Verdict::Undecided,
            _ => Verdict::True,
        }
    }
}

/// A certified magnitude at some place: a real enclosure or an exact p-power.
#[derive(Clone, Debug)]
pub enum Mag {
    Real(Ball),
    Padic(PMag),
}

impl Mag {
    pub fn place(&self) -> Place {
        match self {
            Mag::Real(_) => Place::Infinity,
            Mag::Padic(m) => Place::Finite(m.place()),
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Mag::Real(b) => b.clone(),
            Mag::Padic(m) => m.to_ball(prec),
        }
    }

    /// Certified comparison; exact when both sides live at the same finite place.
    pub fn le(&self, o: &Mag, prec: u32) -> Verdict {
        match (self, o) {
            (Mag::Padic(a), Mag::Padic(b)) if a.place() == b.place() => {
                Verdict::from_bool(a <= b)
            }
            _ => self.to_ball(prec).le(&o.to_ball(prec)),
        }
    }

    pub fn lt(&self, o: &Mag, prec: u32) -> Verdict {
        match (self, o) {
            (Mag::Padic(a), Mag::Padic(b)) if a.place() == b.place() => {
                Verdict::from_bool(a < b)
            }
            _ => self.to_ball(prec).lt(&o.to_ball(prec)),
        }
    }

    pub fn gt(&self, o: &Mag, prec: u32) -> Verdict {
        o.lt(self, prec)
    }
}

impl std::fmt::Display for Mag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mag::Real(b) => write!(f, "{b}"),
            Mag::Padic(m) => write!(f, "{m}"),
        }
    }
}
