//! Computational weighted Brunn–Minkowski geometry for convex polytopes in
//! dimensions 2 and 3.
//!
//! Bodies are H-polytopes with the origin in their interior. Measures have
//! Lebesgue, Gaussian or power-homogeneous density. On top of exact polytope
//! geometry and facet quadrature the crate provides weighted surface area and
//! mixed measures, a solver for the weighted (and `L^q`) Minkowski problem,
//! projection and Blaschke bodies, and checkers for Minkowski, Shephard and
//! stability inequalities.

pub mod bodies;
pub mod corpus;
pub mod error;
pub mod geom;
pub mod hull;
pub mod io;
pub mod measures;
pub mod minkowski;
pub mod projection;
pub mod quad;
pub mod suites;
pub mod surfmeas;

pub use bodies::{HPolytope, Zonotope};
pub use error::{Error, Result};
pub use geom::Vec3;
pub use measures::{DensitySpec, FSpec, QuadConfig};
pub use surfmeas::SphericalAtomMeasure;
