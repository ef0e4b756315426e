//! Round annuli, unit-height rectangles and the regime of an annulus pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the ratio comparisons in [`classify_regime`].
pub const RATIO_TOL: f64 = 1e-12;

/// The closed ring `r_inner <= |z| <= r_outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    r_inner: f64,
    r_outer: f64,
}

impl Annulus {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        let ok = r_inner.is_finite() && r_outer.is_finite() && 0.0 < r_inner && r_inner < r_outer;
        if !ok {
            return Err(Error::InvalidAnnulus { r_inner, r_outer });
        }
        Ok(Self { r_inner, r_outer })
    }

    /// `A(1, R)`.
    pub fn unit(r_outer: f64) -> Result<Self> {
        Self::new(1.0, r_outer)
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    /// `R / r`, the only scale-free datum of the ring.
    pub fn ratio(&self) -> f64 {
        self.r_outer / self.r_inner
    }

    pub fn modulus(&self) -> f64 {
        modulus(self)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r_outer * self.r_outer - self.r_inner * self.r_inner)
    }

    /// The same ring rescaled to inner radius 1.
    pub fn normalized(&self) -> Self {
        Self { r_inner: 1.0, r_outer: self.ratio() }
    }

    pub fn contains_radius(&self, t: f64) -> bool {
        t >= self.r_inner && t <= self.r_outer
    }
}

/// `[0, length] x [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    length: f64,
}

impl Rectangle {
    pub fn new(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidRectangle(length));
        }
        Ok(Self { length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn height(&self) -> f64 {
        1.0
    }

    pub fn area(&self) -> f64 {
        self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Conformal,
    Expanding,
    ContractingWithinNitsche,
    BeyondNitsche,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Conformal => "Conformal",
            Regime::Expanding => "Expanding",
            Regime::ContractingWithinNitsche => "ContractingWithinNitsche",
            Regime::BeyondNitsche => "BeyondNitsche",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `ln(R / r)`.
pub fn modulus(a: &Annulus) -> f64 {
    a.ratio().ln()
}

/// `½(R/r + r/R)`, the smallest target ratio reachable by an injective
/// radial harmonic map from `dom`.
pub fn nitsche_threshold(dom: &Annulus) -> f64 {
    let k = dom.ratio();
    0.5 * (k + 1.0 / k)
}

fn cmp_ratio(x: f64, y: f64) -> std::cmp::Ordering {
    if (x - y).abs() <= RATIO_TOL * x.abs().max(y.abs()) {
        std::cmp::Ordering::Equal
    } else if x < y {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// `½(R/r + r/R) <= R*/r*`, with saturation counted as holding.
pub fn nitsche_bound_holds(dom: &Annulus, tgt: &Annulus) -> bool {
    cmp_ratio(nitsche_threshold(dom), tgt.ratio()) != std::cmp::Ordering::Greater
}

pub fn classify_regime(dom: &Annulus, tgt: &Annulus) -> Regime {
    use std::cmp::Ordering::*;
    match cmp_ratio(tgt.ratio(), dom.ratio()) {
        Equal => Regime::Conformal,
        Greater => Regime::Expanding,
        Less if nitsche_bound_holds(dom, tgt) => Regime::ContractingWithinNitsche,
        Less => Regime::BeyondNitsche,
    }
}
