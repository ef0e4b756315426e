//! Shear profiles `u` solving `λ(x) G(u_x) = α` and the shooting on `α`.

use serde::{Deserialize, Serialize};

use super::critical::critical_length;
use super::{DistortionGauge, GrotzschProblem, WeightFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_endpoint, EndpointKind, EndpointOutcome, ShellConfig, Tolerance};
use crate::roots::brent;

/// Smallest deficit `1 - α/α_max` the near-critical shooting will try.
pub const MIN_DEFICIT: f64 = 1e-300;

/// Number of uniformly spaced profile samples.
pub const UNIFORM_SAMPLES: usize = 1001;

/// Bound on `|λ G(u_x) - α|`, relative to `α`.
pub const RESIDUAL_TOL: f64 = 1e-10;

const LENGTH_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-13 };

/// The free constant of the Euler-Lagrange equation. Near the critical value
/// `α_max = λ₀ m` the profile is parametrized by the deficit
/// `δ = 1 - α/α_max`, which keeps slopes of size `δ^{-1/2}` resolvable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shot {
    Alpha(f64),
    NearCritical { deficit: f64 },
}

impl Shot {
    pub fn alpha(&self, problem: &GrotzschProblem) -> f64 {
        match *self {
            Shot::Alpha(a) => a,
            Shot::NearCritical { deficit } => problem.alpha_max() * (1.0 - deficit),
        }
    }

    fn positive(&self) -> bool {
        match *self {
            Shot::Alpha(a) => a > 0.0,
            Shot::NearCritical { deficit } => deficit < 1.0,
        }
    }

    fn critical(&self) -> bool {
        matches!(*self, Shot::NearCritical { deficit } if deficit == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    MinimizerExists,
    NitschePhenomenon { critical_length: f64 },
    IdentityCase,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::MinimizerExists => "MinimizerExists",
            Verdict::NitschePhenomenon { .. } => "NitschePhenomenon",
            Verdict::IdentityCase => "IdentityCase",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub u: f64,
    /// `+∞` at the weight minimum of a critical profile.
    pub u_x: f64,
}

#[derive(Debug, Clone)]
pub struct GrotzschSolution {
    pub problem: GrotzschProblem,
    pub shot: Shot,
    pub alpha: f64,
    pub samples: Vec<ProfileSample>,
    pub l_achieved: f64,
    /// Largest relative residual of the slope equation over the samples.
    pub residual: f64,
    pub verdict: Option<Verdict>,
}

/// `t > 0` with `G(t) = α/λ(x)`.
pub fn solve_pointwise_slope(gauge: &DistortionGauge, weight: &WeightFunction, alpha: f64, x: f64) -> Result<f64> {
    gauge.solve_slope(alpha / weight.value(x))
}

/// `u_x` at `x`, with `d = x - x₀` supplied separately for precision.
pub(crate) fn slope(problem: &GrotzschProblem, shot: Shot, x: f64, d: f64) -> Result<f64> {
    let w = &problem.weight;
    match shot {
        Shot::Alpha(a) => problem.gauge.solve_slope(a / w.value(x)),
        Shot::NearCritical { deficit } => {
            let m = problem.gauge.derivative_limit().ok_or_else(|| Error::InvalidInput("near-critical shot needs a bounded gauge".into()))?;
            let lam = w.value(x);
            let dd = m * (w.excess(x, d) + deficit * w.lambda0()) / lam;
            if dd <= 0.0 {
                return Ok(f64::INFINITY);
            }
            if dd > 0.5 * m {
                // Away from saturation `m - dd` cancels; solve `G = α/λ` instead.
                return problem.gauge.solve_slope(shot.alpha(problem) / lam);
            }
            problem.gauge.solve_slope_deficit(dd)
        }
    }
}

fn check_shot(problem: &GrotzschProblem, shot: Shot) -> Result<()> {
    match shot {
        Shot::Alpha(a) => {
            let amax = problem.alpha_max();
            if !a.is_finite() || a >= amax {
                return Err(Error::SlopeSaturated { target: a / problem.weight.lambda0(), sup: amax / problem.weight.lambda0() });
            }
        }
        Shot::NearCritical { deficit } => {
            if !problem.gauge.derivative_bounded() || !(0.0..=1.0).contains(&deficit) {
                return Err(Error::InvalidInput(format!("deficit {deficit} outside [0, 1] or unbounded gauge")));
            }
        }
    }
    Ok(())
}

/// Integrates `g(x, u_x)` over `[a, b]`. If one end is the weight minimum
/// and the shot is positive, the shell integrator handles the peak there.
pub(crate) fn segment_with<G>(problem: &GrotzschProblem, shot: Shot, a: f64, b: f64, g: G) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    let x0 = problem.weight.x0();
    let f = |x: f64, d: f64| slope(problem, shot, x, d).map_or(f64::NAN, |s| g(x, s));
    let peaked = shot.positive() && problem.gauge.derivative_bounded();
    if peaked && (a == x0 || b == x0) {
        let (from, to, sign) = if a == x0 { (a, b, 1.0) } else { (b, a, -1.0) };
        let kind = if shot.critical() { EndpointKind::Improper } else { EndpointKind::Bounded };
        // Only the critical profile can diverge; subcritical lengths may be
        // huge but are finite.
        let cap = if shot.critical() { super::critical::DIVERGENCE_CAP * problem.ell } else { f64::INFINITY };
        let cfg = ShellConfig { cap, ..ShellConfig::default() };
        return match integrate_endpoint(f, from, to, kind, LENGTH_TOL, cfg)? {
            EndpointOutcome::Converged { value, .. } => Ok(sign * value),
            EndpointOutcome::Diverged { .. } => Err(Error::DivergentProfile),
            EndpointOutcome::Inconclusive { partial, shells, ratio } => {
                Err(Error::InconclusiveConvergence { shells, ratio, partial })
            }
        };
    }
    Ok(integrate(|x| f(x, x - x0), a, b, LENGTH_TOL)?.value)
}

fn segment(problem: &GrotzschProblem, shot: Shot, a: f64, b: f64) -> Result<f64> {
    segment_with(problem, shot, a, b, |_, s| s)
}

/// `∫₀^ℓ g(x, u_x) dx`, split at the weight minimum.
pub(crate) fn integrate_profile<G>(problem: &GrotzschProblem, shot: Shot, g: G) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    let x0 = problem.weight.x0();
    let ell = problem.ell;
    let mut total = 0.0;
    if x0 > 0.0 {
        total += segment_with(problem, shot, 0.0, x0, &g)?;
    }
    if x0 < ell {
        total += segment_with(problem, shot, x0, ell, &g)?;
    }
    Ok(total)
}

/// `u` at each of the sorted points `xs ⊂ [0, ℓ]`, with `u(0) = 0`.
pub(crate) fn cumulative(problem: &GrotzschProblem, shot: Shot, xs: &[f64]) -> Result<Vec<f64>> {
    let x0 = problem.weight.x0();
    let mut out = Vec::with_capacity(xs.len());
    let mut pos = 0.0;
    let mut acc = 0.0;
    for &x in xs {
        if x < pos {
            return Err(Error::InvalidInput("sample points must be sorted".into()));
        }
        if pos < x0 && x0 < x {
            acc += segment(problem, shot, pos, x0)?;
            pos = x0;
        }
        if x > pos {
            acc += segment(problem, shot, pos, x)?;
            pos = x;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `L(α) = u(ℓ)`.
pub fn length(problem: &GrotzschProblem, shot: Shot) -> Result<f64> {
    check_shot(problem, shot)?;
    if shot == Shot::Alpha(0.0) {
        return Ok(problem.ell);
    }
    Ok(*cumulative(problem, shot, &[problem.ell])?.last().unwrap())
}

fn sample_points(problem: &GrotzschProblem, shot: Shot) -> Vec<f64> {
    let ell = problem.ell;
    let mut xs: Vec<f64> = (0..UNIFORM_SAMPLES).map(|k| ell * k as f64 / (UNIFORM_SAMPLES - 1) as f64).collect();
    xs[UNIFORM_SAMPLES - 1] = ell;
    if shot.positive() && problem.gauge.derivative_bounded() {
        let x0 = problem.weight.x0();
        xs.push(x0);
        for k in 1..=40 {
            let d = ell * 0.5f64.powi(k);
            for x in [x0 - d, x0 + d] {
                if x > 0.0 && x < ell {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Integrates the profile for a given shot. No verdict is attached.
pub fn profile_from_shot(problem: &GrotzschProblem, shot: Shot) -> Result<GrotzschSolution> {
    check_shot(problem, shot)?;
    let alpha = shot.alpha(problem);
    let xs = sample_points(problem, shot);
    let x0 = problem.weight.x0();
    let us = if shot == Shot::Alpha(0.0) { xs.clone() } else { cumulative(problem, shot, &xs)? };
    let mut samples = Vec::with_capacity(xs.len());
    let mut residual: f64 = 0.0;
    for (&x, &u) in xs.iter().zip(&us) {
        let u_x = slope(problem, shot, x, x - x0)?;
        if u_x.is_finite() {
            let lam = problem.weight.value(x);
            let scale = alpha.abs().max(1e-6 * lam);
            residual = residual.max((lam * problem.gauge.response(u_x) - alpha).abs() / scale);
        }
        samples.push(ProfileSample { x, u, u_x });
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::Residual(residual));
    }
    let l_achieved = samples.last().map_or(0.0, |s| s.u);
    Ok(GrotzschSolution { problem: problem.clone(), shot, alpha, samples, l_achieved, residual, verdict: None })
}

/// [`profile_from_shot`] with `Shot::Alpha`. At `α = α_max` the critical
/// profile is integrated as an improper integral.
pub fn profile_from_alpha(problem: &GrotzschProblem, alpha: f64) -> Result<GrotzschSolution> {
    if problem.gauge.derivative_bounded() && alpha == problem.alpha_max() {
        return profile_from_shot(problem, Shot::NearCritical { deficit: 0.0 });
    }
    profile_from_shot(problem, Shot::Alpha(alpha))
}

/// Finds `α` with `u(ℓ) = L`, or reports the Nitsche phenomenon.
pub fn solve_boundary(problem: &GrotzschProblem) -> Result<GrotzschSolution> {
    let (ell, target) = (problem.ell, problem.big_l);
    if (target - ell).abs() <= 1e-12 * ell {
        let mut s = profile_from_shot(problem, Shot::Alpha(0.0))?;
        s.verdict = Some(Verdict::IdentityCase);
        return Ok(s);
    }
    let ftol = 1e-14 * target;
    let shot = if target < ell {
        // α < 0; L(α) decreases to 0 as α → -∞ for reasonable weights, which
        // is checked here rather than assumed.
        let mut lo = -1.0;
        while length(problem, Shot::Alpha(lo))? >= target {
            lo *= 4.0;
            if lo < -1e250 {
                return Err(Error::Bracket(format!("L(α) stays above {target} as α → -∞")));
            }
        }
        let a = brent(|a| Ok(length(problem, Shot::Alpha(a))? - target), lo, 0.0, 1e-16, ftol, 400)?;
        Shot::Alpha(a)
    } else if !problem.gauge.derivative_bounded() {
        let mut hi = 1.0;
        while length(problem, Shot::Alpha(hi))? <= target {
            hi *= 4.0;
            if hi > 1e250 {
                return Err(Error::Bracket(format!("L(α) stays below {target} as α → ∞")));
            }
        }
        let a = brent(|a| Ok(length(problem, Shot::Alpha(a))? - target), 0.0, hi, 1e-16, ftol, 400)?;
        Shot::Alpha(a)
    } else {
        let crit = critical_length(problem)?;
        let l0 = crit.value;
        if l0.is_finite() && target > l0 * (1.0 + 1e-12) {
            let mut s = profile_from_shot(problem, Shot::NearCritical { deficit: 0.0 })?;
            s.verdict = Some(Verdict::NitschePhenomenon { critical_length: l0 });
            return Ok(s);
        }
        if l0.is_finite() && target >= l0 * (1.0 - 1e-12) {
            Shot::NearCritical { deficit: 0.0 }
        } else {
            let len = |ln_d: f64| length(problem, Shot::NearCritical { deficit: ln_d.exp() });
            // Walk the deficit down until the length overshoots the target.
            let ln_min = MIN_DEFICIT.ln();
            let mut hi = 0.0;
            let mut lo = (0.5f64).ln();
            loop {
                let reach = len(lo)?;
                if reach >= target {
                    break;
                }
                if lo <= ln_min {
                    return Err(Error::Bracket(format!(
                        "L = {target} exceeds the length {reach} reachable at deficit {MIN_DEFICIT:e}"
                    )));
                }
                hi = lo;
                lo = (lo * 4.0).max(ln_min);
            }
            let ln_d = brent(|v| Ok(len(v)? - target), lo, hi, 1e-16, ftol, 400)?;
            Shot::NearCritical { deficit: ln_d.exp() }
        }
    };
    let mut s = profile_from_shot(problem, shot)?;
    if (s.l_achieved - target).abs() > 1e-9 * target {
        return Err(Error::Bracket(format!("shooting stalled at L = {} for target {target}", s.l_achieved)));
    }
    s.verdict = Some(Verdict::MinimizerExists);
    Ok(s)
}

impl GrotzschSolution {
    /// `∫ φ(𝕂) λ` of the shear map `u(x) + iy`, with `𝕂 = u_x + 1/u_x`.
    pub fn energy(&self) -> Result<f64> {
        let p = &self.problem;
        if self.shot == Shot::Alpha(0.0) {
            return Ok(p.gauge.phi(2.0) * p.weight.integral()?);
        }
        integrate_profile(p, self.shot, |x, s| p.gauge.phi(s + 1.0 / s) * p.weight.value(x))
    }

    /// `u_x(x)`.
    pub fn slope_at(&self, x: f64) -> Result<f64> {
        slope(&self.problem, self.shot, x, x - self.problem.weight.x0())
    }

    /// `u` at sorted points in `[0, ℓ]`.
    pub fn u_at(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if self.shot == Shot::Alpha(0.0) {
            return Ok(xs.to_vec());
        }
        cumulative(&self.problem, self.shot, xs)
    }
}
