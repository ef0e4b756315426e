//! Gauges of sublinear growth: the infimum `Ψ(1) ∫λ` is never attained
//! when `L ≠ ℓ`.
//!
//! The demonstration sequence stretches a collar `[0, w]` with slope `j`
//! and keeps slope 1 elsewhere; `w = (L - ℓ)/(j - 1)` fixes `u(ℓ) = L`.
//! The mean distortion `½(s + 1/s)` is used here, so conformal maps have
//! `𝕂 = 1`.

use serde::Serialize;

use super::{DistortionGauge, WeightFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// `Ψ(1) ∫₀^ℓ λ` over the rectangle of height one.
pub fn sublinear_infimum(gauge: &DistortionGauge, weight: &WeightFunction) -> Result<f64> {
    if !gauge.sublinear() {
        return Err(Error::InvalidInput(format!("gauge {} is not sublinear", gauge.spec())));
    }
    Ok(gauge.phi(1.0) * weight.integral()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarMember {
    pub j: u32,
    pub width: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollarSequence {
    pub ell: f64,
    pub big_l: f64,
    pub infimum: f64,
    pub members: Vec<CollarMember>,
}

impl CollarSequence {
    /// First admissible index: the collar must fit inside `[0, ℓ]`.
    pub fn first_index(ell: f64, big_l: f64) -> u32 {
        (big_l / ell).ceil() as u32 + 1
    }

    /// Members `j = first, 2·first, 4·first, …` (`count` of them).
    pub fn build(gauge: &DistortionGauge, weight: &WeightFunction, big_l: f64, count: usize) -> Result<Self> {
        let ell = weight.ell();
        if !(big_l.is_finite() && big_l >= ell) {
            return Err(Error::InvalidInput(format!(
                "collar sequence needs L ≥ ℓ, got L = {big_l}, ℓ = {ell}"
            )));
        }
        let infimum = sublinear_infimum(gauge, weight)?;
        let tol = Tolerance { abs: 1e-13, rel: 1e-11 };
        let mut members = Vec::with_capacity(count);
        let mut j = Self::first_index(ell, big_l);
        for _ in 0..count {
            let jf = j as f64;
            let width = (big_l - ell) / (jf - 1.0);
            let energy = if width == 0.0 {
                infimum
            } else {
                let collar = integrate(|x| weight.value(x), 0.0, width, tol)?.value;
                let rest = integrate(|x| weight.value(x), width, ell, tol)?.value;
                gauge.phi(0.5 * (jf + 1.0 / jf)) * collar + gauge.phi(1.0) * rest
            };
            members.push(CollarMember { j, width, energy });
            j = j.saturating_mul(2);
        }
        Ok(Self { ell, big_l, infimum, members })
    }
}
