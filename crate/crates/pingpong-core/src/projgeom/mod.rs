//! Projective geometry over the completions of Q: the standard metric,
//! distances to hyperplanes, Cartan decompositions, and Lipschitz bounds.

pub mod cartan;
pub mod space;

pub use cartan::{
    cartan, lipschitz_bound, lipschitz_bound_sq_exact, snf_local, CartanData, LocalSnf,
};
pub use space::{
    ball_norm_sq, dist_to_hyperplane, dist_to_hyperplane_sq_balls, dist_to_hyperplane_sq_inf,
    dist_to_hyperplane_sq_raw_inf, proj_dist, proj_dist_sq_balls, proj_dist_sq_inf,
    proj_dist_sq_raw_inf, vec_norm_sq_q, GeomError, ProjHyperplane, ProjPoint,
};
