//! The critical length `L₀ = ∫ u_x` at `α = α_max` and the existence verdict.

use serde::{Deserialize, Serialize};

use super::solver::{slope, Shot};
use super::{DistortionGauge, GrotzschProblem, WeightFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_endpoint, EndpointKind, EndpointOutcome, ShellConfig, Tolerance};

/// Partial sums beyond `DIVERGENCE_CAP · ℓ` count as divergent.
pub const DIVERGENCE_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    /// `+1` for `[x₀, ℓ]`, `-1` for `[0, x₀]`.
    pub side: i8,
    pub converged: bool,
    pub value: f64,
    pub shells: usize,
    /// Last ratio of consecutive dyadic shell integrals.
    pub ratio: f64,
    /// `β` with `u_x ≍ d^-β`, read off as `1 + log₂ ratio`.
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalLength {
    /// `+∞` when the improper integral diverges.
    pub value: f64,
    /// `λ₀ · lim φ'`.
    pub alpha_max: f64,
    /// `lim φ'`, the normalization applied to the gauge.
    pub derivative_limit: f64,
    pub sides: Vec<SideReport>,
    /// `2s/κ` from the weight's regularity hint and the gauge's deficit exponent.
    pub predicted_exponent: Option<f64>,
    /// Whether the shell evidence agrees with the predicted exponent; `None`
    /// when no prediction is available or it sits on the borderline.
    pub prediction_agrees: Option<bool>,
    /// `(d, u_x(x₀ + d))` samples approaching the weight minimum.
    pub near_samples: Vec<(f64, f64)>,
}

/// `L₀` for the problem's gauge and weight; `+∞` right away for gauges with
/// unbounded derivative.
pub fn critical_length(problem: &GrotzschProblem) -> Result<CriticalLength> {
    let g = &problem.gauge;
    let w = &problem.weight;
    let Some(m) = g.derivative_limit() else {
        return Ok(CriticalLength {
            value: f64::INFINITY,
            alpha_max: f64::INFINITY,
            derivative_limit: f64::INFINITY,
            sides: Vec::new(),
            predicted_exponent: None,
            prediction_agrees: None,
            near_samples: Vec::new(),
        });
    };
    let shot = Shot::NearCritical { deficit: 0.0 };
    let x0 = w.x0();
    let ell = problem.ell;
    let cfg = ShellConfig { cap: DIVERGENCE_CAP * ell, ..ShellConfig::default() };
    let f = |x: f64, d: f64| slope(problem, shot, x, d).unwrap_or(f64::NAN);
    let mut sides = Vec::new();
    let mut total = 0.0;
    let mut diverged = false;
    for (side, end) in [(1i8, ell), (-1i8, 0.0)] {
        if end == x0 {
            continue;
        }
        let report = match integrate_endpoint(f, x0, end, EndpointKind::Improper, Tolerance::new(1e-15, 1e-13), cfg)? {
            EndpointOutcome::Converged { value, shells, ratio } => {
                total += value.abs();
                SideReport { side, converged: true, value: value.abs(), shells, ratio, exponent: 1.0 + ratio.log2() }
            }
            EndpointOutcome::Diverged { partial, shells, ratio } => {
                diverged = true;
                SideReport { side, converged: false, value: partial.abs(), shells, ratio, exponent: 1.0 + ratio.log2() }
            }
            EndpointOutcome::Inconclusive { partial, shells, ratio } => {
                return Err(Error::InconclusiveConvergence { shells, ratio, partial });
            }
        };
        sides.push(report);
    }
    let predicted_exponent = match (w.regularity_hint(), g.deficit_exponent()) {
        (Some(s), Some(kappa)) => Some(2.0 * s / kappa),
        _ => None,
    };
    let prediction_agrees = predicted_exponent.and_then(|beta| {
        if (beta - 1.0).abs() < 0.05 && beta < 1.0 {
            None
        } else {
            Some((beta >= 1.0) == diverged)
        }
    });
    let near_samples = (1..=20)
        .filter_map(|k| {
            let d = ell * 0.5f64.powi(k);
            let dir = if x0 + d <= ell { 1.0 } else { -1.0 };
            let x = x0 + dir * d;
            slope(problem, shot, x, dir * d).ok().map(|u| (dir * d, u))
        })
        .collect();
    Ok(CriticalLength {
        value: if diverged { f64::INFINITY } else { total },
        alpha_max: w.lambda0() * m,
        derivative_limit: m,
        sides,
        predicted_exponent,
        prediction_agrees,
        near_samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Phenomenon {
    AlwaysSolvable,
    NitschePhenomenon { critical_length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhenomenonRecord {
    pub verdict: Phenomenon,
    pub critical: CriticalLength,
}

/// Decides whether the problem family `(φ, λ, ℓ)` has minimizers for every
/// target length.
pub fn classify_phenomenon(gauge: &DistortionGauge, weight: &WeightFunction, ell: f64) -> Result<PhenomenonRecord> {
    let problem = GrotzschProblem::new(ell, ell, gauge.clone(), weight.clone())?;
    let critical = critical_length(&problem)?;
    let verdict = if critical.value.is_finite() {
        Phenomenon::NitschePhenomenon { critical_length: critical.value }
    } else {
        Phenomenon::AlwaysSolvable
    };
    Ok(PhenomenonRecord { verdict, critical })
}
