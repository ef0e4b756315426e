//! Extremal deformations of planar annuli and rectangles.
//!
//! Radial minimizers of the Dirichlet energy between annuli, weighted
//! mean-distortion problems between rectangles, a grid engine that
//! evaluates energies and certifies minimality by seeded perturbations, and
//! the exponential cover relating the two settings.

pub mod annulus;
pub mod error;
pub mod field;
pub mod grotzsch;
pub mod quadrature;
pub mod radial;
pub mod roots;
pub mod transform;

pub use error::{Error, Result};
