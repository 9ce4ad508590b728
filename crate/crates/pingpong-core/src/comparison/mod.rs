//! Spectral-versus-metric comparison experiments over a finite set of
//! rational matrices at a fixed place: eigenvalue growth of product sets,
//! certified upper bounds on the minimal conjugate norm, nilpotency of the
//! spanned algebra, and symmetric-space displacement.
//!
//! Everything reported as *certified* is backed by exact rational arithmetic
//! or directed interval enclosures.  The conjugator search itself is
//! heuristic (floating point at the archimedean place, integer exponent
//! moves at finite places), but its output is always re-certified exactly
//! before it is reported, and the search is deterministic under a fixed
//! seed.  The minimal conjugate norm is only ever bounded from above; no
//! routine here claims to compute it.

mod delta;
mod geometry;
mod lambda;

use thiserror::Error;

use crate::exact::SMatrix;
use crate::places::Place;

pub use delta::{certify_conjugator, delta_upper, ConjugatorSearchState, DeltaBudget};
pub use geometry::{
    comparison_experiment, displacement, displacement_norm_sandwich, geometric_comparison,
    ComparisonReport, ExperimentOptions, GeometricReport,
};
pub use lambda::{lambda_of_power_set, nilpotency_test, LambdaBound};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompError {
    #[error("the matrix set is empty")]
    EmptySet,
    #[error("the matrix set mixes dimensions")]
    DimensionMismatch,
    #[error("product enumeration budget exceeded")]
    BudgetExceeded,
    #[error("operation requires invertible matrices")]
    NotInvertible,
    #[error("could not certify lambda of the {power}-fold product set against the conjugate norm bound")]
    InvariantUnverified { power: usize },
    #[error("working precision exhausted")]
    PrecisionExhausted,
}

/// A finite set of square rational matrices pinned to one place.  Order is
/// preserved from construction but duplicates are harmless: every consumer
/// deduplicates products by exact entry comparison.
#[derive(Clone, Debug)]
pub struct CompactSet {
    place: Place,
    elements: Vec<SMatrix>,
}

impl CompactSet {
    pub fn new(place: Place, elements: Vec<SMatrix>) -> Result<Self, CompError> {
        let first = match elements.first() {
            None => return Err(CompError::EmptySet),
            Some(m) => m.n,
        };
        if first == 0 || elements.iter().any(|m| m.n != first) {
            return Err(CompError::DimensionMismatch);
        }
        Ok(CompactSet { place, elements })
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn elements(&self) -> &[SMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].n
    }
}

/// Cap on the number of matrix products formed while enumerating a power
/// set.  Free growth hits this quickly; structured sets stay far below it.
#[derive(Clone, Copy, Debug)]
pub struct ProductBudget {
    pub max_products: usize,
}

impl Default for ProductBudget {
    fn default() -> Self {
        ProductBudget {
            max_products: 1 << 16,
        }
    }
}
