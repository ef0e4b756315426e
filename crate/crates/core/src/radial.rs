//! Radial stretchings `h(t e^{iθ}) = H(t) e^{iθ}` between round annuli.
//!
//! Harmonic profiles `H(t) = a t + b/t` solve the Euler equation of the
//! Dirichlet energy among radial maps and satisfy `H² - t²Ḣ² = 4ab`. Beyond the
//! Nitsche bound the minimizer squeezes `[r, ρ]` onto the inner circle and is
//! harmonic on `[ρ, R]`. The power stretch `t ↦ r*(t/r)^α` is the extremal
//! map for the supremum of the distortion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::annulus::{classify_regime, Annulus, Regime};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Grid size used when verifying the characteristic identity by sampling.
pub const CHARACTERISTIC_SAMPLES: usize = 1000;

/// Relative slack allowed when checking `t` against `[r, R]`.
const DOMAIN_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ProfileKind {
    Harmonic { a: f64, b: f64 },
    BeyondNitsche { r_star: f64, rho: f64, r_outer: f64 },
    PowerStretch { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub dom: Annulus,
    pub tgt: Annulus,
}

fn harmonic_value(a: f64, b: f64, t: f64) -> f64 {
    a * t + b / t
}

fn harmonic_slope(a: f64, b: f64, t: f64) -> f64 {
    a - b / (t * t)
}

impl RadialProfile {
    /// Harmonic coefficients of the rising piece of a beyond-Nitsche profile.
    fn rising_coefficients(r_star: f64, rho: f64) -> (f64, f64) {
        (0.5 * r_star / rho, 0.5 * r_star * rho)
    }

    /// `H(t)`; formulas are evaluated as written even outside `[r, R]`.
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Harmonic { a, b } => harmonic_value(a, b, t),
            ProfileKind::BeyondNitsche { r_star, rho, .. } => {
                if t <= rho {
                    r_star
                } else {
                    let (a, b) = Self::rising_coefficients(r_star, rho);
                    harmonic_value(a, b, t)
                }
            }
            ProfileKind::PowerStretch { alpha } => {
                self.tgt.r_inner() * (t / self.dom.r_inner()).powf(alpha)
            }
        }
    }

    /// `Ḣ(t)`.
    pub fn slope(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Harmonic { a, b } => harmonic_slope(a, b, t),
            ProfileKind::BeyondNitsche { r_star, rho, .. } => {
                if t <= rho {
                    0.0
                } else {
                    let (a, b) = Self::rising_coefficients(r_star, rho);
                    harmonic_slope(a, b, t)
                }
            }
            ProfileKind::PowerStretch { alpha } => alpha * self.value(t) / t,
        }
    }

    /// `Ḧ(t)`, needed by the pointwise perturbation generator.
    pub fn curvature(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Harmonic { b, .. } => 2.0 * b / (t * t * t),
            ProfileKind::BeyondNitsche { r_star, rho, .. } => {
                if t <= rho {
                    0.0
                } else {
                    let (_, b) = Self::rising_coefficients(r_star, rho);
                    2.0 * b / (t * t * t)
                }
            }
            ProfileKind::PowerStretch { alpha } => alpha * (alpha - 1.0) * self.value(t) / (t * t),
        }
    }

    pub fn regime(&self) -> Regime {
        classify_regime(&self.dom, &self.tgt)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = (self.dom.r_inner(), self.dom.r_outer());
        if t.is_finite() && t >= lo * (1.0 - DOMAIN_SLACK) && t <= hi * (1.0 + DOMAIN_SLACK) {
            Ok(())
        } else {
            Err(Error::Domain { value: t, lo, hi })
        }
    }

    /// Elasticity `η_H(t) = t Ḣ(t) / H(t)`.
    pub fn elasticity(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match self.kind {
            ProfileKind::PowerStretch { alpha } => alpha,
            _ => t * self.slope(t) / self.value(t),
        })
    }

    /// `H⁻¹(τ)` for `τ ∈ [r*, R*]`.
    pub fn inverse(&self, tau: f64) -> Result<f64> {
        let (lo, hi) = (self.tgt.r_inner(), self.tgt.r_outer());
        if !(tau.is_finite() && tau >= lo * (1.0 - DOMAIN_SLACK) && tau <= hi * (1.0 + DOMAIN_SLACK)) {
            return Err(Error::Domain { value: tau, lo, hi });
        }
        match self.kind {
            ProfileKind::PowerStretch { alpha } => {
                Ok(self.dom.r_inner() * (tau / self.tgt.r_inner()).powf(1.0 / alpha))
            }
            ProfileKind::BeyondNitsche { r_star, .. } if tau <= r_star * (1.0 + DOMAIN_SLACK) => {
                Err(Error::NotInvertible(format!("τ = {tau} is the image of the whole plateau")))
            }
            _ => Ok(inverse_profile(self)?.value(tau)),
        }
    }

    /// Points where `H` is only `C^{1,1}`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ProfileKind::BeyondNitsche { rho, .. } => vec![rho],
            _ => Vec::new(),
        }
    }
}

/// Radial harmonic profile matching both boundary circles.
pub fn harmonic_radial(dom: &Annulus, tgt: &Annulus) -> Result<RadialProfile> {
    let regime = classify_regime(dom, tgt);
    if regime == Regime::BeyondNitsche {
        return Err(Error::Regime(format!(
            "R*/r* = {} is below the Nitsche bound {}; the harmonic profile is not monotone",
            tgt.ratio(),
            crate::annulus::nitsche_threshold(dom)
        )));
    }
    let (r, big_r) = (dom.r_inner(), dom.r_outer());
    let (rs, big_rs) = (tgt.r_inner(), tgt.r_outer());
    let den = big_r * big_r - r * r;
    let mut a = (big_r * big_rs - r * rs) / den;
    let mut b = (big_r * big_r * r * rs - r * r * big_r * big_rs) / den;
    if regime == Regime::Conformal {
        // Equal ratios within tolerance: snap to the similarity.
        a = rs / r;
        b = 0.0;
    }
    Ok(RadialProfile { kind: ProfileKind::Harmonic { a, b }, dom: *dom, tgt: *tgt })
}

/// Plateau-plus-harmonic profile for pairs beyond the Nitsche bound.
pub fn beyond_nitsche_profile(dom: &Annulus, tgt: &Annulus) -> Result<RadialProfile> {
    if classify_regime(dom, tgt) != Regime::BeyondNitsche {
        return Err(Error::Regime(format!(
            "R*/r* = {} is within the Nitsche range; the plateau radius would not exceed r",
            tgt.ratio()
        )));
    }
    let k = tgt.ratio();
    let big_r = dom.r_outer();
    // R(k - sqrt(k² - 1)) written without cancellation.
    let rho = big_r / (k + (k * k - 1.0).sqrt());
    Ok(RadialProfile {
        kind: ProfileKind::BeyondNitsche { r_star: tgt.r_inner(), rho, r_outer: big_r },
        dom: *dom,
        tgt: *tgt,
    })
}

/// The Dirichlet-energy minimizer among radial maps, whichever regime applies.
pub fn radial_minimizer(dom: &Annulus, tgt: &Annulus) -> Result<RadialProfile> {
    match classify_regime(dom, tgt) {
        Regime::BeyondNitsche => beyond_nitsche_profile(dom, tgt),
        _ => harmonic_radial(dom, tgt),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicConstant {
    pub c: f64,
    /// `max |H² - t²Ḣ² - c| / (1 + |c|)` over the verification grid.
    pub deviation: f64,
}

/// The constant `c = H² - t²Ḣ²`, algebraic where possible and verified on a
/// uniform grid.
pub fn characteristic_constant(p: &RadialProfile) -> Result<CharacteristicConstant> {
    let c = match p.kind {
        ProfileKind::Harmonic { a, b } => 4.0 * a * b,
        ProfileKind::BeyondNitsche { r_star, .. } => r_star * r_star,
        ProfileKind::PowerStretch { .. } => {
            let r = p.dom.r_inner();
            p.value(r).powi(2) - (r * p.slope(r)).powi(2)
        }
    };
    let (r, big_r) = (p.dom.r_inner(), p.dom.r_outer());
    let n = CHARACTERISTIC_SAMPLES;
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        let t = r + (big_r - r) * i as f64 / (n - 1) as f64;
        let h = p.value(t);
        let th = t * p.slope(t);
        let residual = (h - th) * (h + th) - c;
        deviation = deviation.max(residual.abs() / (1.0 + c.abs()));
    }
    if deviation > 1e-9 {
        return Err(Error::NonConstant { c, deviation });
    }
    Ok(CharacteristicConstant { c, deviation })
}

/// `F = H⁻¹` for a profile obeying the characteristic equation, written
/// through the coefficient `a` and constant `c` of its rising harmonic piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseProfile {
    pub profile: RadialProfile,
    a: f64,
    b: f64,
    c: f64,
    tau_lo: f64,
    tau_hi: f64,
}

impl InverseProfile {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `[r*, R*]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.tau_lo, self.tau_hi)
    }

    fn root(&self, tau: f64) -> f64 {
        (tau * tau - self.c).max(0.0).sqrt()
    }

    /// `F(τ) = (τ + √(τ² - c)) / 2a`.
    pub fn value(&self, tau: f64) -> f64 {
        (tau + self.root(tau)) / (2.0 * self.a)
    }

    /// `Ḟ(τ) = (1 + τ/√(τ² - c)) / 2a`; infinite where the bound saturates.
    pub fn slope(&self, tau: f64) -> f64 {
        let s = self.root(tau);
        if s == 0.0 {
            return f64::INFINITY;
        }
        (1.0 + tau / s) / (2.0 * self.a)
    }

    /// `H(t)` of the harmonic piece the inverse was built from.
    fn forward(&self, t: f64) -> (f64, f64) {
        (harmonic_value(self.a, self.b, t), harmonic_slope(self.a, self.b, t))
    }
}

/// The closed-form inverse of a strictly increasing profile. For beyond-Nitsche
/// profiles this inverts the rising piece on `[ρ, R]`.
pub fn inverse_profile(p: &RadialProfile) -> Result<InverseProfile> {
    let (a, b) = match p.kind {
        ProfileKind::Harmonic { a, b } => (a, b),
        ProfileKind::BeyondNitsche { r_star, rho, .. } => RadialProfile::rising_coefficients(r_star, rho),
        ProfileKind::PowerStretch { alpha } if alpha == 1.0 => (p.tgt.r_inner() / p.dom.r_inner(), 0.0),
        ProfileKind::PowerStretch { alpha } => {
            return Err(Error::NotInvertible(format!(
                "power stretch with α = {alpha} has no characteristic constant"
            )))
        }
    };
    let r = p.dom.r_inner();
    let big_r = p.dom.r_outer();
    let rising_from = match p.kind {
        ProfileKind::BeyondNitsche { rho, .. } => rho,
        _ => r,
    };
    if !(a > 0.0) || harmonic_slope(a, b, big_r) <= 0.0 || harmonic_slope(a, b, rising_from) < -1e-12 * a {
        return Err(Error::NotInvertible("profile is not strictly increasing".into()));
    }
    Ok(InverseProfile { profile: *p, a, b, c: 4.0 * a * b, tau_lo: p.tgt.r_inner(), tau_hi: p.tgt.r_outer() })
}

/// Tolerance under which `c` counts as zero in the sign tests below.
fn c_tol(ip: &InverseProfile) -> f64 {
    1e-12 * ip.tau_hi * ip.tau_hi
}

/// `p(τ) = τḞ/F` and `A(t, τ) = F(τ) / (t Ḟ(τ))` for expanding pairs.
pub fn expanding_coefficients(ip: &InverseProfile, t: f64, tau: f64) -> Result<(f64, f64)> {
    if ip.c >= -c_tol(ip) {
        return Err(Error::Regime(format!("expanding coefficients need c < 0, got {}", ip.c)));
    }
    let f = ip.value(tau);
    let df = ip.slope(tau);
    Ok((tau * df / f, f / (t * df)))
}

/// Closed form `(τ√(τ²-c) + τ²) / (τ√(τ²-c) + τ² - c)` for `p(τ)`.
pub fn expanding_p_closed_form(c: f64, tau: f64) -> f64 {
    let s = (tau * tau - c).sqrt();
    (tau * s + tau * tau) / (tau * s + tau * tau - c)
}

/// `q(τ) = F/(τḞ)` and `B(t, τ) = (H²/t - tḢ²) / (τ(1 - q²))` for
/// contracting pairs.
pub fn contracting_coefficients(ip: &InverseProfile, t: f64, tau: f64) -> Result<(f64, f64)> {
    if ip.c <= c_tol(ip) {
        return Err(Error::Regime(format!("contracting coefficients need c > 0, got {}", ip.c)));
    }
    let q = ip.value(tau) / (tau * ip.slope(tau));
    let (h, dh) = ip.forward(t);
    let b = (h * h / t - t * dh * dh) / (tau * (1.0 - q * q));
    Ok((q, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialEnergy {
    pub quadrature: f64,
    pub closed_form: f64,
}

/// `2π ∫ (Ḣ² + H²/t²) t dt` for `H = at + b/t`: the integrand is
/// `2a²t + 2b²/t³`, so the cross terms cancel.
fn harmonic_energy(a: f64, b: f64, r: f64, big_r: f64) -> f64 {
    2.0 * PI * (a * a * (big_r * big_r - r * r) + b * b * (1.0 / (r * r) - 1.0 / (big_r * big_r)))
}

/// Dirichlet energy of the radial map, by adaptive quadrature and by the
/// antiderivative of `Ḣ² + H²/t²`. The two must agree to `1e-10` relative.
pub fn radial_dirichlet_energy(p: &RadialProfile, dom: &Annulus) -> Result<RadialEnergy> {
    if dom != &p.dom {
        return Err(Error::InvalidInput("profile was built on a different domain".into()));
    }
    let (r, big_r) = (dom.r_inner(), dom.r_outer());
    let density = |t: f64| {
        let h = p.value(t);
        let dh = p.slope(t);
        (dh * dh + h * h / (t * t)) * t
    };
    let mut nodes = vec![r];
    nodes.extend(p.breakpoints());
    nodes.push(big_r);
    let mut quad = 0.0;
    for w in nodes.windows(2) {
        quad += integrate(density, w[0], w[1], Tolerance::new(1e-13, 1e-13))?.value;
    }
    let quadrature = 2.0 * PI * quad;
    let closed_form = match p.kind {
        ProfileKind::Harmonic { a, b } => harmonic_energy(a, b, r, big_r),
        ProfileKind::BeyondNitsche { r_star, rho, .. } => {
            let (a, b) = RadialProfile::rising_coefficients(r_star, rho);
            2.0 * PI * r_star * r_star * (rho / r).ln() + harmonic_energy(a, b, rho, big_r)
        }
        ProfileKind::PowerStretch { alpha } => {
            let rs = p.tgt.r_inner();
            2.0 * PI * (alpha * alpha + 1.0) * rs * rs * ((big_r / r).powf(2.0 * alpha) - 1.0) / (2.0 * alpha)
        }
    };
    if (quadrature - closed_form).abs() > 1e-10 * closed_form.abs() {
        return Err(Error::Quadrature { estimate: quadrature, error: (quadrature - closed_form).abs() });
    }
    Ok(RadialEnergy { quadrature, closed_form })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerStretch {
    pub profile: RadialProfile,
    pub alpha: f64,
    /// `max(α, 1/α)`, the ratio of singular values.
    pub k_linear: f64,
    /// `(α² + 1) / 2α`, the mean distortion `½(K + 1/K)`.
    pub k_distortion: f64,
}

/// The radial map `t ↦ r*(t/r)^α` with `α = Mod(tgt)/Mod(dom)`.
pub fn power_stretch_extremal(dom: &Annulus, tgt: &Annulus) -> PowerStretch {
    let alpha = tgt.modulus() / dom.modulus();
    let profile = RadialProfile { kind: ProfileKind::PowerStretch { alpha }, dom: *dom, tgt: *tgt };
    PowerStretch { profile, alpha, k_linear: alpha.max(1.0 / alpha), k_distortion: (alpha * alpha + 1.0) / (2.0 * alpha) }
}
