//! Shared fixtures for the criterion benches.

use extremal_core::annulus::Annulus;
use extremal_core::field::{GridMap, PolarGridMap};
use extremal_core::grotzsch::{DistortionGauge, GrotzschProblem, WeightFunction};
use extremal_core::radial::{harmonic_radial, RadialProfile};

/// Harmonic radial map `A(1,2) → A(1,3)`.
pub fn expanding_profile() -> RadialProfile {
    harmonic_radial(&Annulus::new(1.0, 2.0).unwrap(), &Annulus::new(1.0, 3.0).unwrap()).unwrap()
}

/// The expanding profile sampled on an `n × n` polar grid.
pub fn expanding_map(n: usize) -> GridMap {
    PolarGridMap::sample_radial(&expanding_profile(), n, n).unwrap().into()
}

/// Nitsche weight on `[0, ℓ]` with the given gauge.
pub fn nitsche_problem(ell: f64, big_l: f64, gauge: DistortionGauge) -> GrotzschProblem {
    GrotzschProblem::new(ell, big_l, gauge, WeightFunction::nitsche(ell).unwrap()).unwrap()
}
