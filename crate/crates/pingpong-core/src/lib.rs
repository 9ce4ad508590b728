//! Certified freeness for finitely generated linear groups over Q.
//!
//! The crate is layered bottom-up:
//! - [`exact`]: rational matrices, polynomials, factorization, words, generating
//!   sets, ball enumeration.
//! - [`places`]: certified scalars at the archimedean and p-adic places — interval
//!   balls with outward rounding, p-adic valuations, operator norms, and spectral
//!   radii with certified enclosures.
//! - [`projgeom`]: projective space over each completion, the standard metric,
//!   and Cartan decompositions with exact attracting/repelling data.
//! - [`dynamics`]: contraction certificates, proximality verification on grids,
//!   and the ping-pong criterion for freeness.
//! - [`comparison`]: norm-vs-spectral-radius comparison of compact sets,
//!   conjugation-minimal norms, nilpotency detection, displacement bounds.
//! - [`search`]: locating semisimple non-torsion elements and witnesses in
//!   general position, with exact algebraic-number arithmetic in Q[x]/(f).
//! - [`construct`]: the end-to-end pipeline producing two short words that
//!   generate a free subgroup, with a replayable certificate.

pub mod comparison;
pub mod dynamics;
pub mod exact;
pub mod places;
pub mod projgeom;

/// Exact rational scalar used everywhere in the exact layer.
pub type Q = num_rational::BigRational;
