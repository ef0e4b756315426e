//! Minimizing sequences past the critical length.
//!
//! For `L > L₀` the inverse `v = u⁻¹` of the limit map stays at `x₀` on an
//! interval of length `P = L - L₀`. The `j`-th member replaces `v_a` by
//! `c max(v_a, 1/j)` with `c` fixed by `v(L) = ℓ`. In the source variable
//! this caps the critical slope at `j`: the member is the critical profile
//! rescaled by `c` wherever `u₀_x ≤ j`, and has constant slope `j/c` on one
//! collar that absorbs both the capped region and the plateau.

use num_complex::Complex64;
use serde::Serialize;

use super::solver::{profile_from_shot, slope, GrotzschSolution, Shot};
use super::GrotzschProblem;
use crate::annulus::Rectangle;
use crate::error::{Error, Result};
use crate::field::RectGridMap;
use crate::quadrature::{integrate, Tolerance};

const ENERGY_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceMember {
    pub j: u32,
    /// Rescaling `c` of the source variable outside the collar.
    pub scale: f64,
    /// Region of the critical profile where `u₀_x > j`.
    pub capped: (f64, f64),
    /// Image of the capped region and the plateau in the source of `f^j`.
    pub collar: (f64, f64),
    /// `∫ φ(𝕂) λ` with `𝕂 = u_x + 1/u_x`.
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateSequence {
    #[serde(skip)]
    pub problem: GrotzschProblem,
    #[serde(skip)]
    pub critical: GrotzschSolution,
    pub critical_length: f64,
    pub plateau_length: f64,
    /// `∫ φ(𝕂(z, f₀)) λ` of the critical profile over `Q₁`.
    pub critical_energy: f64,
    /// `critical_energy + α_max P`: the squeezed plateau keeps contributing
    /// `lim φ' · λ₀` per unit of length.
    pub limit_energy: f64,
    pub members: Vec<SequenceMember>,
}

impl DegenerateSequence {
    pub fn new(problem: &GrotzschProblem) -> Result<Self> {
        if !problem.gauge.derivative_bounded() {
            return Err(Error::PlateauPlacement("gauge has unbounded derivative; no critical length".into()));
        }
        let critical = profile_from_shot(problem, Shot::NearCritical { deficit: 0.0 })?;
        let l0 = critical.l_achieved;
        if !l0.is_finite() {
            return Err(Error::PlateauPlacement("critical length is infinite".into()));
        }
        let plateau = problem.big_l - l0;
        if plateau < -1e-12 * l0 {
            return Err(Error::PlateauPlacement(format!(
                "L = {} is below the critical length {l0}",
                problem.big_l
            )));
        }
        let plateau = plateau.max(0.0);
        let critical_energy = critical.energy()?;
        Ok(Self {
            problem: problem.clone(),
            critical,
            critical_length: l0,
            plateau_length: plateau,
            critical_energy,
            limit_energy: critical_energy + problem.alpha_max() * plateau,
            members: Vec::new(),
        })
    }

    fn slope0(&self, x: f64) -> f64 {
        let x0 = self.problem.weight.x0();
        slope(&self.problem, Shot::NearCritical { deficit: 0.0 }, x, x - x0).unwrap_or(f64::NAN)
    }

    /// Point on one side of `x₀` where the critical slope falls to `j`.
    fn cap_edge(&self, j: f64, side: f64) -> f64 {
        let x0 = self.problem.weight.x0();
        let room = if side > 0.0 { self.problem.ell - x0 } else { x0 };
        if room <= 0.0 {
            return x0;
        }
        let end = x0 + side * room;
        if self.slope0(end) >= j {
            return end;
        }
        // Bisection in ln d; the slope decreases away from x₀.
        let (mut lo, mut hi) = ((room * 1e-300).max(f64::MIN_POSITIVE).ln(), room.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.slope0(x0 + side * mid.exp()) > j {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        x0 + side * hi.exp()
    }

    pub fn member(&self, j: u32) -> Result<SequenceMember> {
        if j == 0 {
            return Err(Error::InvalidInput("sequence index starts at 1".into()));
        }
        let p = &self.problem;
        let ell = p.ell;
        let jf = j as f64;
        let (xa, xb) = (self.cap_edge(jf, -1.0), self.cap_edge(jf, 1.0));
        for s in &self.critical.samples {
            if (s.x < xa || s.x > xb) && s.u_x > jf * (1.0 + 1e-9) {
                return Err(Error::PlateauPlacement(format!(
                    "slope {} exceeds {j} at x = {} outside the collar; the weight is not unimodal",
                    s.u_x, s.x
                )));
            }
        }
        let u = self.critical.u_at(&[xa, xb])?;
        let lifted = self.plateau_length + (u[1] - u[0]);
        let c = ell / (ell - (xb - xa) + lifted / jf);
        let collar = (c * xa, c * xa + c * lifted / jf);
        let phi = |k: f64| p.gauge.phi(k);
        let lam = |x: f64| p.weight.value(x.clamp(0.0, ell));
        let mut energy = phi(jf / c + c / jf) * integrate(lam, collar.0, collar.1, ENERGY_TOL)?.value;
        if xa > 0.0 {
            let left = |x: f64| {
                let s = self.slope0(x) / c;
                phi(s + 1.0 / s) * lam(c * x) * c
            };
            energy += integrate(left, 0.0, xa, ENERGY_TOL)?.value;
        }
        if xb < ell {
            let right = |x: f64| {
                let s = self.slope0(x) / c;
                phi(s + 1.0 / s) * lam(collar.1 + c * (x - xb)) * c
            };
            energy += integrate(right, xb, ell, ENERGY_TOL)?.value;
        }
        Ok(SequenceMember { j, scale: c, capped: (xa, xb), collar, energy })
    }

    /// `u^j` at sorted source points.
    pub fn profile(&self, m: &SequenceMember, xis: &[f64]) -> Result<Vec<f64>> {
        let ell = self.problem.ell;
        let (c, (xa, xb), (ca, cb)) = (m.scale, m.capped, m.collar);
        let pre: Vec<f64> = xis
            .iter()
            .map(|&xi| {
                if xi < ca {
                    (xi / c).min(xa)
                } else if xi > cb {
                    (xb + (xi - cb) / c).min(ell)
                } else {
                    xa
                }
            })
            .collect();
        let mut sorted = pre.clone();
        sorted.push(xa);
        sorted.push(xb);
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let us = self.critical.u_at(&sorted)?;
        let lookup = |x: f64| us[sorted.partition_point(|&v| v < x)];
        let (ua, ub) = (lookup(xa), lookup(xb));
        Ok(xis
            .iter()
            .zip(&pre)
            .map(|(&xi, &x)| {
                if xi < ca {
                    lookup(x)
                } else if xi > cb {
                    lookup(x) + self.plateau_length
                } else {
                    (ua + m.j as f64 / c * (xi - ca)).min(ub + self.plateau_length)
                }
            })
            .collect())
    }

    /// `f^j(x + iy) = u^j(x) + iy` on an `n_x × n_y` cell grid.
    pub fn sample(&self, m: &SequenceMember, n_x: usize, n_y: usize) -> Result<RectGridMap> {
        let q1 = Rectangle::new(self.problem.ell)?;
        let q2 = Rectangle::new(self.problem.big_l)?;
        let xs: Vec<f64> = (0..=n_x).map(|i| RectGridMap::x_at(&q1, n_x, i)).collect();
        let mut us = self.profile(m, &xs)?;
        // Pin the far edge; the two pieces carry independent rounding.
        us[n_x] = self.problem.big_l;
        let mut values = Vec::with_capacity((n_x + 1) * (n_y + 1));
        for u in &us {
            for j in 0..=n_y {
                values.push(Complex64::new(*u, RectGridMap::y_at(n_y, j)));
            }
        }
        RectGridMap::from_values(q1, q2, n_x, n_y, false, values)
    }
}

/// The sequence for each `j` in `js`.
pub fn degenerate_sequence(problem: &GrotzschProblem, js: &[u32]) -> Result<DegenerateSequence> {
    let mut seq = DegenerateSequence::new(problem)?;
    seq.members = js.iter().map(|&j| seq.member(j)).collect::<Result<_>>()?;
    Ok(seq)
}
