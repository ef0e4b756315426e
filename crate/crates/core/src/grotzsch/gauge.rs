//! Distortion gauges `φ` and the slope response `G(t) = (1 - t⁻²) φ'(t + 1/t)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots::newton_bisect;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied gauge. `derivative_limit` is `lim φ'(s)` as `s → ∞` when
/// finite.
#[derive(Clone)]
pub struct CustomGauge {
    pub name: String,
    pub phi: ScalarFn,
    pub dphi: ScalarFn,
    pub ddphi: ScalarFn,
    pub derivative_limit: Option<f64>,
    pub sublinear: bool,
}

#[derive(Clone)]
pub enum GaugeFamily {
    /// `φ(t) = t`.
    Identity,
    /// `φ(t) = t^p`, `p > 1`.
    Power { p: f64 },
    /// `φ(t) = t - ln t`.
    LinearLog,
    /// `φ(t) = t + t^(1-p)/(p-1)`, `p > 0`, `p ≠ 1`.
    ShiftedPower { p: f64 },
    /// `Ψ(t) = t^p`, `0 < p < 1`.
    SublinearPower { p: f64 },
    /// `Ψ(t) = ln(1 + t)`.
    Log1p,
    Custom(CustomGauge),
}

#[derive(Clone)]
pub struct DistortionGauge {
    family: GaugeFamily,
}

impl fmt::Debug for DistortionGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistortionGauge({})", self.spec())
    }
}

impl DistortionGauge {
    pub fn new(family: GaugeFamily) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match &family {
            GaugeFamily::Power { p } if !(p.is_finite() && *p > 1.0) => return bad(format!("power gauge needs p > 1, got {p}")),
            GaugeFamily::ShiftedPower { p } if !(p.is_finite() && *p > 0.0 && *p != 1.0) => {
                return bad(format!("shifted-power gauge needs p > 0 and p != 1, got {p}"))
            }
            GaugeFamily::SublinearPower { p } if !(p.is_finite() && *p > 0.0 && *p < 1.0) => {
                return bad(format!("sublinear-power gauge needs 0 < p < 1, got {p}"))
            }
            _ => {}
        }
        Ok(Self { family })
    }

    pub fn identity() -> Self {
        Self { family: GaugeFamily::Identity }
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(GaugeFamily::Power { p })
    }

    pub fn linear_log() -> Self {
        Self { family: GaugeFamily::LinearLog }
    }

    pub fn shifted_power(p: f64) -> Result<Self> {
        Self::new(GaugeFamily::ShiftedPower { p })
    }

    pub fn sqrt() -> Self {
        Self { family: GaugeFamily::SublinearPower { p: 0.5 } }
    }

    pub fn log1p() -> Self {
        Self { family: GaugeFamily::Log1p }
    }

    pub fn custom(g: CustomGauge) -> Self {
        Self { family: GaugeFamily::Custom(g) }
    }

    pub fn family(&self) -> &GaugeFamily {
        &self.family
    }

    /// The `family[:param]` string accepted by [`FromStr`].
    pub fn spec(&self) -> String {
        match &self.family {
            GaugeFamily::Identity => "identity".into(),
            GaugeFamily::Power { p } => format!("power:{p}"),
            GaugeFamily::LinearLog => "linear-log".into(),
            GaugeFamily::ShiftedPower { p } => format!("shifted-power:{p}"),
            GaugeFamily::SublinearPower { p } => format!("sublinear-power:{p}"),
            GaugeFamily::Log1p => "log1p".into(),
            GaugeFamily::Custom(c) => format!("custom:{}", c.name),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match &self.family {
            GaugeFamily::Identity => t,
            GaugeFamily::Power { p } => t.powf(*p),
            GaugeFamily::LinearLog => t - t.ln(),
            GaugeFamily::ShiftedPower { p } => t + t.powf(1.0 - p) / (p - 1.0),
            GaugeFamily::SublinearPower { p } => t.powf(*p),
            GaugeFamily::Log1p => t.ln_1p(),
            GaugeFamily::Custom(c) => (c.phi)(t),
        }
    }

    pub fn dphi(&self, t: f64) -> f64 {
        match &self.family {
            GaugeFamily::Identity => 1.0,
            GaugeFamily::Power { p } => p * t.powf(p - 1.0),
            GaugeFamily::LinearLog => 1.0 - 1.0 / t,
            GaugeFamily::ShiftedPower { p } => 1.0 - t.powf(-p),
            GaugeFamily::SublinearPower { p } => p * t.powf(p - 1.0),
            GaugeFamily::Log1p => 1.0 / (1.0 + t),
            GaugeFamily::Custom(c) => (c.dphi)(t),
        }
    }

    pub fn ddphi(&self, t: f64) -> f64 {
        match &self.family {
            GaugeFamily::Identity => 0.0,
            GaugeFamily::Power { p } => p * (p - 1.0) * t.powf(p - 2.0),
            GaugeFamily::LinearLog => 1.0 / (t * t),
            GaugeFamily::ShiftedPower { p } => p * t.powf(-p - 1.0),
            GaugeFamily::SublinearPower { p } => p * (p - 1.0) * t.powf(p - 2.0),
            GaugeFamily::Log1p => -1.0 / ((1.0 + t) * (1.0 + t)),
            GaugeFamily::Custom(c) => (c.ddphi)(t),
        }
    }

    /// `lim φ'(s)` as `s → ∞`, or `None` when `φ'` is unbounded.
    pub fn derivative_limit(&self) -> Option<f64> {
        match &self.family {
            GaugeFamily::Identity | GaugeFamily::LinearLog | GaugeFamily::ShiftedPower { .. } => Some(1.0),
            GaugeFamily::Power { .. } => None,
            GaugeFamily::SublinearPower { .. } | GaugeFamily::Log1p => Some(0.0),
            GaugeFamily::Custom(c) => c.derivative_limit,
        }
    }

    pub fn derivative_bounded(&self) -> bool {
        self.derivative_limit().is_some()
    }

    pub fn sublinear(&self) -> bool {
        match &self.family {
            GaugeFamily::SublinearPower { .. } | GaugeFamily::Log1p => true,
            GaugeFamily::Custom(c) => c.sublinear,
            _ => false,
        }
    }

    /// `m - φ'(s)` with `m` the derivative limit, written to avoid the
    /// cancellation of the naive difference for large `s`.
    pub fn dphi_deficit(&self, s: f64) -> f64 {
        match &self.family {
            GaugeFamily::Identity => 0.0,
            GaugeFamily::LinearLog => 1.0 / s,
            GaugeFamily::ShiftedPower { p } => s.powf(-p),
            GaugeFamily::Power { .. } => f64::NEG_INFINITY,
            _ => self.derivative_limit().map_or(f64::NEG_INFINITY, |m| m - self.dphi(s)),
        }
    }

    /// Exponent `κ` with `m - G(t) ≍ t^-κ` as `t → ∞`, when known.
    pub fn deficit_exponent(&self) -> Option<f64> {
        match &self.family {
            GaugeFamily::Identity => Some(2.0),
            GaugeFamily::LinearLog => Some(1.0),
            GaugeFamily::ShiftedPower { p } => Some(p.min(2.0)),
            _ => None,
        }
    }

    /// `G(t) = (1 - t⁻²) φ'(t + 1/t)`.
    pub fn response(&self, t: f64) -> f64 {
        gauge_response(self, t)
    }

    /// `G'(t) = (2/t³) φ'(s) + (1 - t⁻²)² φ''(s)` with `s = t + 1/t`.
    pub fn response_derivative(&self, t: f64) -> f64 {
        let s = t + 1.0 / t;
        let w = one_minus_inv_sq(t);
        2.0 / t / t / t * self.dphi(s) + w * w * self.ddphi(s)
    }

    /// `m - G(t) = m t⁻² + (m - φ'(s))(1 - t⁻²)` for bounded gauges.
    pub fn response_deficit(&self, t: f64) -> f64 {
        let m = self.derivative_limit().unwrap_or(f64::INFINITY);
        let s = t + 1.0 / t;
        let w = one_minus_inv_sq(t);
        m / t / t + self.dphi_deficit(s) * w
    }

    /// Unique `t > 0` with `G(t) = target`.
    pub fn solve_slope(&self, target: f64) -> Result<f64> {
        if target == 0.0 {
            return Ok(1.0);
        }
        let sup = gauge_response_sup(self);
        if !target.is_finite() || target >= sup {
            return Err(Error::SlopeSaturated { target, sup });
        }
        let f = |u: f64| {
            let t = u.exp();
            (self.response(t) - target, self.response_derivative(t) * t)
        };
        let (lo, hi) = bracket_log(|u| f(u).0, target > 0.0)?;
        Ok(newton_bisect(f, lo, hi, 1e-16, 400)?.exp())
    }

    /// Unique `t` with `m - G(t) = deficit`, for bounded gauges. Near
    /// saturation this resolves `t` from the deficit itself rather than from
    /// `m - deficit`, which would round to `m`.
    pub fn solve_slope_deficit(&self, deficit: f64) -> Result<f64> {
        let Some(m) = self.derivative_limit() else {
            return Err(Error::InvalidInput("deficit form needs a bounded gauge".into()));
        };
        if !(deficit > 0.0) {
            return Err(Error::SlopeSaturated { target: m - deficit, sup: m });
        }
        if deficit == m {
            return Ok(1.0);
        }
        let ln_target = deficit.ln();
        let f = |u: f64| {
            let t = u.exp();
            let d = self.response_deficit(t);
            (d.ln() - ln_target, -self.response_derivative(t) * t / d)
        };
        let (lo, hi) = bracket_log(|u| -f(u).0, deficit < m)?;
        Ok(newton_bisect(f, lo, hi, 1e-16, 400)?.exp())
    }
}

/// `1 - t⁻²` without overflow for huge `t` or cancellation near `t = 1`.
fn one_minus_inv_sq(t: f64) -> f64 {
    if t > 2.0 {
        let v = 1.0 / t;
        (1.0 - v) * (1.0 + v)
    } else {
        (t - 1.0) * (t + 1.0) / (t * t)
    }
}

/// Brackets the sign change of an increasing function of `u = ln t` on the
/// positive (`upward`) or negative half-line, starting from `[0, ±16]`.
fn bracket_log<F: Fn(f64) -> f64>(g: F, upward: bool) -> Result<(f64, f64)> {
    let dir = if upward { 1.0 } else { -1.0 };
    let mut far = 16.0;
    loop {
        let v = g(dir * far);
        if (upward && v > 0.0) || (!upward && v < 0.0) {
            return Ok(if upward { (0.0, far) } else { (-far, 0.0) });
        }
        far *= 2.0;
        if far > 700.0 {
            return Err(Error::Bracket(format!("slope equation has no root with |ln t| < {}", far / 2.0)));
        }
    }
}

/// `G(t) = (1 - t⁻²) φ'(t + 1/t)`, strictly increasing with `G(1) = 0`.
pub fn gauge_response(g: &DistortionGauge, t: f64) -> f64 {
    let w = one_minus_inv_sq(t);
    w * g.dphi(t + 1.0 / t)
}

/// `sup G = lim φ'`, or `+∞` for gauges with unbounded derivative.
pub fn gauge_response_sup(g: &DistortionGauge) -> f64 {
    g.derivative_limit().unwrap_or(f64::INFINITY)
}

impl FromStr for DistortionGauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.trim().split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let num = |p: Option<&str>| -> Result<f64> {
            p.ok_or_else(|| Error::Parse(format!("gauge `{name}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("gauge parameter: {e}")))
        };
        match name {
            "identity" => Ok(Self::identity()),
            "power" => Self::power(num(param)?),
            "linear-log" => Ok(Self::linear_log()),
            "shifted-power" => Self::shifted_power(num(param)?),
            "sublinear-power" => Self::new(GaugeFamily::SublinearPower { p: num(param)? }),
            "sqrt" => Ok(Self::sqrt()),
            "log1p" => Ok(Self::log1p()),
            other => Err(Error::Parse(format!("unknown gauge family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<DistortionGauge> {
        vec![
            DistortionGauge::identity(),
            DistortionGauge::power(2.0).unwrap(),
            DistortionGauge::power(1.5).unwrap(),
            DistortionGauge::linear_log(),
            DistortionGauge::shifted_power(0.5).unwrap(),
            DistortionGauge::shifted_power(1.5).unwrap(),
            DistortionGauge::shifted_power(3.0).unwrap(),
        ]
    }

    #[test]
    fn response_examples() {
        for g in builtins() {
            assert_eq!(g.response(1.0), 0.0);
        }
        let id = DistortionGauge::identity();
        assert!((id.response(3.0) - (1.0 - 1.0 / 9.0)).abs() < 1e-15);
        assert!((DistortionGauge::linear_log().response(2.0) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn sup_examples() {
        assert_eq!(gauge_response_sup(&DistortionGauge::power(2.0).unwrap()), f64::INFINITY);
        assert_eq!(gauge_response_sup(&DistortionGauge::linear_log()), 1.0);
        assert_eq!(gauge_response_sup(&DistortionGauge::shifted_power(3.0).unwrap()), 1.0);
    }

    #[test]
    fn bounded_flags() {
        assert!(DistortionGauge::identity().derivative_bounded());
        assert!(DistortionGauge::linear_log().derivative_bounded());
        assert!(DistortionGauge::shifted_power(0.5).unwrap().derivative_bounded());
        assert!(!DistortionGauge::power(2.0).unwrap().derivative_bounded());
        assert!(DistortionGauge::sqrt().sublinear());
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistortionGauge::power(1.0).is_err());
        assert!(DistortionGauge::shifted_power(1.0).is_err());
        assert!(DistortionGauge::shifted_power(-1.0).is_err());
        assert!("bogus".parse::<DistortionGauge>().is_err());
        assert!("power".parse::<DistortionGauge>().is_err());
    }

    #[test]
    fn parse_round_trip() {
        for g in builtins() {
            let back: DistortionGauge = g.spec().parse().unwrap();
            assert_eq!(back.spec(), g.spec());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for g in builtins() {
            for &t in &[1.3, 2.0, 7.5] {
                let h = 1e-5 * t;
                let fd1 = (g.phi(t + h) - g.phi(t - h)) / (2.0 * h);
                let fd2 = (g.dphi(t + h) - g.dphi(t - h)) / (2.0 * h);
                assert!((fd1 - g.dphi(t)).abs() < 1e-7 * (1.0 + fd1.abs()), "{g:?} φ' at {t}");
                assert!((fd2 - g.ddphi(t)).abs() < 1e-6 * (1.0 + fd2.abs()), "{g:?} φ'' at {t}");
                let fdg = (g.response(t + h) - g.response(t - h)) / (2.0 * h);
                assert!((fdg - g.response_derivative(t)).abs() < 1e-7 * (1.0 + fdg.abs()), "{g:?} G' at {t}");
            }
        }
    }

    #[test]
    fn deficit_matches_naive_form() {
        for g in builtins().into_iter().filter(|g| g.derivative_bounded()) {
            for &t in &[0.3, 1.0, 2.0, 10.0] {
                let naive = 1.0 - g.response(t);
                assert!((g.response_deficit(t) - naive).abs() < 1e-13 * (1.0 + naive.abs()));
            }
        }
    }

    #[test]
    fn slope_examples() {
        let id = DistortionGauge::identity();
        assert_eq!(id.solve_slope(0.0).unwrap(), 1.0);
        assert!((id.solve_slope(0.75).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(id.solve_slope(1.0), Err(Error::SlopeSaturated { .. })));
        let t = id.solve_slope(-3.0).unwrap();
        assert!((t - 0.5).abs() < 1e-14);
    }

    #[test]
    fn deficit_solve_resolves_huge_slopes() {
        let id = DistortionGauge::identity();
        // m - G(t) = t⁻² for the identity gauge.
        let t = id.solve_slope_deficit(1e-40).unwrap();
        assert!((t - 1e20).abs() < 1e6);
        let g = DistortionGauge::shifted_power(1.5).unwrap();
        let t = g.solve_slope_deficit(1e-12).unwrap();
        assert!((g.response_deficit(t) / 1e-12 - 1.0).abs() < 1e-12);
    }
}
