//! Numerical verification engine for Kähler 4-manifold geometry.
//!
//! The crate evaluates closed-form tensor fields on coordinate charts with
//! exact jet derivatives, computes exterior calculus (wedge, Hodge star,
//! exterior derivative), Levi forms of hypersurfaces, full curvature packs
//! with the self-dual Weyl split, and verifies integration-by-parts energy
//! identities on explicit geometries: flat C², the product of two round
//! spheres, and the Taub-NUT family with its conformally Kähler partners.

pub mod chart;
pub mod complex;
pub mod error;
pub mod fields;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scalar;

pub use error::{GeomError, Result};
