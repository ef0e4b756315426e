//! Energy gap between a rectangle map and the shear minimizer.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::solver::{GrotzschSolution, Verdict};
use crate::annulus::Rectangle;
use crate::error::{Error, Result};
use crate::field::{discretization_budget, DistortionNorm, Functional, GridMap, RectGridMap};
use crate::quadrature::simpson_weights;

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub candidate_energy: f64,
    /// Energy of the sampled minimizer on the candidate's grid.
    pub minimizer_energy: f64,
    /// Energy of the minimizer by one-dimensional quadrature.
    pub minimizer_energy_exact: f64,
    pub gap: f64,
    pub budget: f64,
    /// `∫ λ (ω - 1/ω) φ'(𝕂₀) (Im f_y - 1)`, zero for every admissible `f`.
    pub vertical_identity: f64,
    /// `∫ Re(f_x - (f₀)_x)`, likewise zero.
    pub horizontal_identity: f64,
    pub passed: bool,
}

/// `u(x) + iy` on an `n_x × n_y` cell grid.
pub fn sample_shear(solution: &GrotzschSolution, n_x: usize, n_y: usize) -> Result<RectGridMap> {
    let p = &solution.problem;
    let q1 = Rectangle::new(p.ell)?;
    let q2 = Rectangle::new(solution.l_achieved)?;
    let xs: Vec<f64> = (0..=n_x).map(|i| RectGridMap::x_at(&q1, n_x, i)).collect();
    let mut us = solution.u_at(&xs)?;
    us[n_x] = solution.l_achieved;
    let mut values = Vec::with_capacity((n_x + 1) * (n_y + 1));
    for u in us {
        for j in 0..=n_y {
            values.push(Complex64::new(u, RectGridMap::y_at(n_y, j)));
        }
    }
    RectGridMap::from_values(q1, q2, n_x, n_y, false, values)
}

pub fn rect_functional(solution: &GrotzschSolution) -> Functional {
    let w = solution.problem.weight.clone();
    Functional::PhiDistortion {
        gauge: solution.problem.gauge.clone(),
        weight: Arc::new(move |x, _| w.value(x)),
        norm: DistortionNorm::HilbertSchmidt,
    }
}

/// Compares `candidate` with the minimizer on the same grid.
pub fn minimality_gap_bound(candidate: &RectGridMap, solution: &GrotzschSolution) -> Result<GapReport> {
    if !matches!(solution.verdict, Some(Verdict::MinimizerExists) | Some(Verdict::IdentityCase)) {
        return Err(Error::InvalidInput("gap bound needs a solved minimizer".into()));
    }
    let p = &solution.problem;
    let tol = 1e-9 * p.big_l.max(1.0);
    if (candidate.q1().length() - p.ell).abs() > tol || (candidate.q2().length() - solution.l_achieved).abs() > tol {
        return Err(Error::InvalidInput("candidate rectangles differ from the problem".into()));
    }
    let (n_x, n_y) = (candidate.n_x(), candidate.n_y());
    let f0 = GridMap::Rect(sample_shear(solution, n_x, n_y)?);
    let cand = GridMap::Rect(candidate.clone());
    let functional = rect_functional(solution);
    let candidate_energy = functional.evaluate(&cand)?;
    let minimizer_energy = functional.evaluate(&f0)?;
    let budget = discretization_budget(&cand, &functional)? + discretization_budget(&f0, &functional)?;

    let wx = simpson_weights(n_x, p.ell / n_x as f64);
    let wy = simpson_weights(n_y, 1.0 / n_y as f64);
    let (mut vertical, mut horizontal) = (0.0, 0.0);
    for i in 0..=n_x {
        let x = RectGridMap::x_at(candidate.q1(), n_x, i);
        let s = solution.slope_at(x)?;
        let k0 = s + 1.0 / s;
        let factor = p.weight.value(x) * (1.0 / s - s) * p.gauge.dphi(k0);
        for j in 0..=n_y {
            let (fx, fy) = candidate.derivatives(i, j);
            let (gx, _) = f0.derivatives(i, j);
            let w = wx[i] * wy[j];
            vertical += w * factor * (fy.im - 1.0);
            horizontal += w * (fx.re - gx.re);
        }
    }
    let gap = candidate_energy - minimizer_energy;
    Ok(GapReport {
        candidate_energy,
        minimizer_energy,
        minimizer_energy_exact: solution.energy()?,
        gap,
        budget,
        vertical_identity: vertical,
        horizontal_identity: horizontal,
        passed: gap >= -budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::perturb_map;
    use crate::grotzsch::{solve_boundary, DistortionGauge, GrotzschProblem, WeightFunction};

    fn solved() -> GrotzschSolution {
        let w = WeightFunction::nitsche(0.25).unwrap();
        let p = GrotzschProblem::new(0.25, 0.3, DistortionGauge::linear_log(), w).unwrap();
        solve_boundary(&p).unwrap()
    }

    #[test]
    fn minimizer_has_zero_gap() {
        let s = solved();
        let f0 = sample_shear(&s, 64, 16).unwrap();
        let r = minimality_gap_bound(&f0, &s).unwrap();
        assert!(r.gap.abs() <= r.budget + 1e-15);
        assert!((r.minimizer_energy - r.minimizer_energy_exact).abs() < 1e-4 * r.minimizer_energy_exact);
    }

    #[test]
    fn perturbations_and_linear_map_cost_more() {
        let s = solved();
        let f0: GridMap = sample_shear(&s, 64, 16).unwrap().into();
        for seed in 0..10 {
            let c = perturb_map(&f0, 0.05, seed).unwrap();
            let r = minimality_gap_bound(c.as_rect().unwrap(), &s).unwrap();
            assert!(r.passed && r.gap > 0.0, "{r:?}");
            assert!(r.vertical_identity.abs() < 1e-8 && r.horizontal_identity.abs() < 1e-8, "{r:?}");
        }
        let q1 = Rectangle::new(0.25).unwrap();
        let q2 = Rectangle::new(s.l_achieved).unwrap();
        let k = s.l_achieved / 0.25;
        let lin = RectGridMap::sample_fn(q1, q2, 64, 16, |x, y| Complex64::new(k * x, y)).unwrap();
        assert!(minimality_gap_bound(&lin, &s).unwrap().gap > 0.0);
    }
}
