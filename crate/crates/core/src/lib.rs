//! Exact invariants of lattice polytopes tied to the Castelnuovo–Mumford
//! regularity of projective toric embeddings: k-normality thresholds, the
//! invariants `d_P` and `nu_P`, Ehrhart `h*`-vectors and degree, normalized
//! volume and very-ampleness, together with the bound checks that relate them.
//!
//! All arithmetic is exact. Lattice coordinates are `i64` with checked
//! arithmetic; determinants, normal forms and linear solves go through
//! arbitrary-precision integers in [`linalg`].

mod cache;
pub mod certificates;
pub mod ehrhart;
pub mod error;
pub mod families;
pub mod linalg;
pub mod polytope;
pub mod report;
pub mod semigroup;

pub use cache::CACHE_POINTS_ENV;
pub use error::{Error, Result};
pub use polytope::{Facet, HalfspaceRep, LatticePolytope, Point, PointSet, PolytopeJson};
