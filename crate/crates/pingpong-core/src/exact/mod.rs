//! Exact rational linear algebra: matrices over Q, characteristic and minimal
//! polynomials, real root isolation, factorization over Q, formal words and
//! generating sets, and ball enumeration.

pub mod factor;
pub mod matrix;
pub mod poly;
pub mod word;

pub use factor::factor;
pub use matrix::{admissible_cyclotomic_indices, torsion_exponent, SMatrix};
pub use poly::{cyclotomic, isolate_real_roots, refine_root, root_product_poly, QPoly, SturmChain};
pub use word::{GenSet, GenSetError, PrimeSupport, Word};
