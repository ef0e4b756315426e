//! Weighted mean-distortion problems between rectangles `[0,ℓ]×[0,1]` and
//! `[0,L]×[0,1]` among shear maps `f(x + iy) = u(x) + iy`.
//!
//! The Euler-Lagrange equation reduces to `λ(x) G(u_x) = α`; the constant
//! `α` is shot until `u(ℓ) = L`. When `φ'` is bounded, `α` cannot exceed
//! `α_max = λ₀ lim φ'` and lengths past the critical length `L₀` have no
//! minimizer.

pub mod critical;
pub mod degenerate;
pub mod gap;
pub mod gauge;
pub mod solver;
pub mod sublinear;
pub mod weight;

pub use critical::{classify_phenomenon, critical_length, CriticalLength, Phenomenon, PhenomenonRecord};
pub use degenerate::{degenerate_sequence, DegenerateSequence, SequenceMember};
pub use gap::{minimality_gap_bound, rect_functional, sample_shear, GapReport};
pub use gauge::{gauge_response, gauge_response_sup, CustomGauge, DistortionGauge, GaugeFamily};
pub use solver::{
    length, profile_from_alpha, profile_from_shot, solve_boundary, solve_pointwise_slope, GrotzschSolution,
    ProfileSample, Shot, Verdict,
};
pub use sublinear::{sublinear_infimum, CollarMember, CollarSequence};
pub use weight::{WeightFunction, WeightSpec};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GrotzschProblem {
    pub ell: f64,
    pub big_l: f64,
    pub gauge: DistortionGauge,
    pub weight: WeightFunction,
}

impl GrotzschProblem {
    pub fn new(ell: f64, big_l: f64, gauge: DistortionGauge, weight: WeightFunction) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0 && big_l.is_finite() && big_l > 0.0) {
            return Err(Error::InvalidInput(format!("need ℓ, L > 0, got ℓ = {ell}, L = {big_l}")));
        }
        if (weight.ell() - ell).abs() > 1e-14 * ell {
            return Err(Error::InvalidInput(format!("weight is defined on [0, {}], not [0, {ell}]", weight.ell())));
        }
        Ok(Self { ell, big_l, gauge, weight })
    }

    /// `λ₀ · lim φ'`, `+∞` for unbounded `φ'`.
    pub fn alpha_max(&self) -> f64 {
        self.weight.lambda0() * gauge_response_sup(&self.gauge)
    }

    pub fn with_length(&self, big_l: f64) -> Result<Self> {
        Self::new(self.ell, big_l, self.gauge.clone(), self.weight.clone())
    }
}
