//! Contracting, proximal, and ping-pong certificates on projective space.
//!
//! The definitional layer of the freeness pipeline. An element is
//! eps-contracting for a stored point [v] and hyperplane [H] when every
//! projective point at distance at least eps from [H] is mapped within eps
//! of [v]; (r, eps)-proximal when additionally r > 2*eps and d([v],[H]) >= r;
//! very proximal when the element and its inverse both are; and a ping-pong
//! pair is two very proximal elements each of whose attracting points keeps
//! distance r from the other's repelling hyperplanes — the classical
//! condition under which the pair generates a free group.
//!
//! Axes stored in a certificate are data rather than claims of canonicity:
//! contracting or proximal elements never have unique axes, and every check
//! here is performed against exactly the stored rational representatives,
//! either through the exact spectral criterion or by rigorous grid cover.
//! The [`free_word_oracle`] provides the exponential-cost ground truth that
//! certificates are cross-examined against in tests.

mod contraction;
mod pingpong;

pub use contraction::{
    contraction_from_cartan, verify_contracting, CertMethod, Comparison, ContractionCert,
    DynError, GridParams,
};
pub use pingpong::{
    free_word_oracle, verify_ping_pong, PingPongCert, ProximalCert, VeryProximalCert,
};
