//! Quadratures of energy densities over sampled maps.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{GridMap, NodeClass, PolarGridMap};
use crate::error::{Error, Result};
use crate::grotzsch::DistortionGauge;
use crate::quadrature::{integrate, Tolerance};

/// Normalisation of the distortion function.
///
/// `Mean` is `|Df|² / (2J)`, equal to `½(K + 1/K)` and to 1 for conformal
/// maps. `HilbertSchmidt` is `|Df|² / J`, twice as large; it is the
/// convention under which `∫ 𝕂(·, h⁻¹) = ∫ |Dh|²` and the one used by the
/// rectangle problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistortionNorm {
    #[default]
    Mean,
    HilbertSchmidt,
}

impl DistortionNorm {
    fn factor(self) -> f64 {
        match self {
            DistortionNorm::Mean => 0.5,
            DistortionNorm::HilbertSchmidt => 1.0,
        }
    }
}

fn degenerate(m: &GridMap, i: usize, j: usize) -> Error {
    Error::DegenerateCell { i, j, jacobian: m.jacobian(i, j) }
}

/// Mean distortion `|Df|² / (2J)` at a node.
pub fn distortion_at(m: &GridMap, i: usize, j: usize) -> Result<f64> {
    distortion_at_with(m, i, j, DistortionNorm::Mean)
}

pub fn distortion_at_with(m: &GridMap, i: usize, j: usize, norm: DistortionNorm) -> Result<f64> {
    if m.class(i, j) != NodeClass::Regular {
        return Err(degenerate(m, i, j));
    }
    let n = m.nodes();
    Ok(norm.factor() * n.frobenius_sq(i, j) / n.jacobian(i, j))
}

/// `½(K + 1/K)` with `K = σ_max / σ_min` of a real 2×2 matrix, using the
/// closed-form singular values.
pub fn singular_value_distortion(a: [[f64; 2]; 2]) -> f64 {
    let [[p, q], [r, s]] = a;
    let fro = p * p + q * q + r * r + s * s;
    let det = (p * s - q * r).abs();
    let disc = ((fro - 2.0 * det) * (fro + 2.0 * det)).max(0.0).sqrt();
    let smax = (0.5 * (fro + disc)).sqrt();
    let smin = det / smax;
    let k = smax / smin;
    0.5 * (k + 1.0 / k)
}

/// `∫ |Df|²` over the source.
pub fn dirichlet_energy(m: &GridMap) -> Result<f64> {
    let n = m.nodes();
    Ok((0..n.values.len())
        .map(|k| {
            let [a, b] = n.partials[k];
            n.weights[k] * (a.norm_sqr() + b.norm_sqr())
        })
        .sum())
}

/// `∫ J` over the source, the area of the image for a homeomorphism.
pub fn jacobian_integral(m: &GridMap) -> f64 {
    let n = m.nodes();
    (0..n.values.len())
        .map(|k| {
            let [a, b] = n.partials[k];
            n.weights[k] * (a.conj() * b).im
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiEnergy {
    pub value: f64,
    /// Squeezed nodes left out of the integral.
    pub skipped: usize,
}

/// `∫ φ(𝕂) w` with the mean distortion.
pub fn phi_distortion_energy<W>(m: &GridMap, gauge: &DistortionGauge, weight: W) -> Result<f64>
where
    W: Fn(f64, f64) -> f64,
{
    phi_distortion_energy_with(m, gauge, weight, DistortionNorm::Mean).map(|e| e.value)
}

/// `∫ φ(𝕂) w` over the non-degenerate nodes. The weight receives source
/// coordinates `(t, θ)` or `(x, y)`. A folded node anywhere is an error.
pub fn phi_distortion_energy_with<W>(
    m: &GridMap,
    gauge: &DistortionGauge,
    weight: W,
    norm: DistortionNorm,
) -> Result<PhiEnergy>
where
    W: Fn(f64, f64) -> f64,
{
    let n = m.nodes();
    let mut value = 0.0;
    let mut skipped = 0;
    for i in 0..n.rows {
        for j in 0..n.cols {
            let k = n.idx(i, j);
            match n.class(i, j) {
                NodeClass::Folded => return Err(degenerate(m, i, j)),
                NodeClass::Degenerate => skipped += 1,
                NodeClass::Regular => {
                    if n.weights[k] == 0.0 {
                        continue;
                    }
                    let kk = norm.factor() * n.frobenius_sq(i, j) / n.jacobian(i, j);
                    let (a, b) = m.coords(i, j);
                    value += n.weights[k] * gauge.phi(kk) * weight(a, b);
                }
            }
        }
    }
    Ok(PhiEnergy { value, skipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeLagrangianKind {
    /// `∫ M(|x|) dx`
    F1,
    /// `∫ N(|h|) J dx`
    F2,
    /// `∫ A(|h|) |h|_N / |x| dx`
    F3,
    /// `∫ B(|x|) Im(h_T / h) dx`
    F4,
}

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct FreeLagrangianSpec {
    pub which: FreeLagrangianKind,
    pub name: String,
    pub density: Density,
}

impl fmt::Debug for FreeLagrangianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeLagrangianSpec({:?}, {})", self.which, self.name)
    }
}

impl FreeLagrangianSpec {
    pub fn new<F>(which: FreeLagrangianKind, name: &str, density: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { which, name: name.to_string(), density: Arc::new(density) }
    }

    /// `M ≡ 1`, `N ≡ 1`, `A(s) = 1/s`, `B(t) = 1/t`.
    pub fn canonical(which: FreeLagrangianKind) -> Self {
        match which {
            FreeLagrangianKind::F1 => Self::new(which, "1", |_| 1.0),
            FreeLagrangianKind::F2 => Self::new(which, "1", |_| 1.0),
            FreeLagrangianKind::F3 => Self::new(which, "1/s", |s| 1.0 / s),
            FreeLagrangianKind::F4 => Self::new(which, "1/t", |t| 1.0 / t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeLagrangianValue {
    pub value: f64,
    /// Value forced by the homotopy class alone.
    pub predicted: f64,
}

impl FreeLagrangianValue {
    /// Both numbers divided by `2π`; the canonical `F3` and `F4` then read as
    /// the moduli of target and source.
    pub fn normalized(&self) -> (f64, f64) {
        (self.value / (2.0 * PI), self.predicted / (2.0 * PI))
    }

    pub fn relative_error(&self) -> f64 {
        (self.value - self.predicted).abs() / self.predicted.abs()
    }
}

pub fn free_lagrangian(m: &PolarGridMap, spec: &FreeLagrangianSpec) -> Result<FreeLagrangianValue> {
    if let super::grid::Admissibility::Folded { i, j, jacobian } = m.admissibility() {
        return Err(Error::DegenerateCell { i, j, jacobian });
    }
    let n = m.nodes();
    let f = &spec.density;
    let mut value = 0.0;
    for i in 0..n.rows {
        let t = m.radii()[i];
        for j in 0..n.cols {
            let k = n.idx(i, j);
            let h = n.values[k];
            let [hn, ht] = n.partials[k];
            let density = match spec.which {
                FreeLagrangianKind::F1 => f(t),
                FreeLagrangianKind::F2 => f(h.norm()) * (hn.conj() * ht).im,
                FreeLagrangianKind::F3 => f(h.norm()) * (h.conj() * hn).re / h.norm() / t,
                FreeLagrangianKind::F4 => f(t) * (ht / h).im,
            };
            value += n.weights[k] * density;
        }
    }
    let (r, big_r) = (m.dom().r_inner(), m.dom().r_outer());
    let (rs, big_rs) = (m.tgt().r_inner(), m.tgt().r_outer());
    let tol = Tolerance { abs: 1e-13, rel: 1e-12 };
    let integral = match spec.which {
        FreeLagrangianKind::F1 => integrate(|t| f(t) * t, r, big_r, tol)?,
        FreeLagrangianKind::F2 => integrate(|s| f(s) * s, rs, big_rs, tol)?,
        FreeLagrangianKind::F3 => integrate(|s| f(s), rs, big_rs, tol)?,
        FreeLagrangianKind::F4 => integrate(|t| f(t), r, big_r, tol)?,
    };
    Ok(FreeLagrangianValue { value, predicted: 2.0 * PI * integral.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::Annulus;
    use crate::radial::{harmonic_radial, power_stretch_extremal};
    use num_complex::Complex64;

    fn identity(r: f64, n: usize) -> GridMap {
        let a = Annulus::new(1.0, r).unwrap();
        PolarGridMap::sample_fn(a, a, n, n, Complex64::from_polar).unwrap().into()
    }

    #[test]
    fn identity_energy_and_area() {
        let m = identity(2.0, 64);
        assert!((dirichlet_energy(&m).unwrap() / (6.0 * PI) - 1.0).abs() < 1e-6);
        let area = phi_distortion_energy(&m, &DistortionGauge::identity(), |_, _| 1.0).unwrap();
        assert!((area / (3.0 * PI) - 1.0).abs() < 1e-6);
        assert!((distortion_at(&m, 10, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_stretch_distortion() {
        let dom = Annulus::new(1.0, 2.0).unwrap();
        let tgt = Annulus::new(1.0, 4.0).unwrap();
        let ps = power_stretch_extremal(&dom, &tgt);
        let m: GridMap = PolarGridMap::sample_radial(&ps.profile, 32, 16).unwrap().into();
        for i in 0..=32 {
            assert!((distortion_at(&m, i, 5).unwrap() - 1.25).abs() < 1e-9);
        }
        let e = phi_distortion_energy(&m, &DistortionGauge::power(2.0).unwrap(), |_, _| 1.0).unwrap();
        assert!((e / (1.5625 * PI * 3.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn singular_values_match() {
        let a = [[1.3, -0.2], [0.4, 0.9]];
        let fro: f64 = a.iter().flatten().map(|x| x * x).sum();
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        assert!((singular_value_distortion(a) - fro / (2.0 * det)).abs() < 1e-14);
    }

    #[test]
    fn free_lagrangians_on_harmonic_map() {
        let dom = Annulus::new(1.0, 2.0).unwrap();
        let tgt = Annulus::new(1.0, 3.0).unwrap();
        let p = harmonic_radial(&dom, &tgt).unwrap();
        let m = PolarGridMap::sample_radial(&p, 128, 32).unwrap();
        for which in [FreeLagrangianKind::F1, FreeLagrangianKind::F2, FreeLagrangianKind::F3, FreeLagrangianKind::F4] {
            let v = free_lagrangian(&m, &FreeLagrangianSpec::canonical(which)).unwrap();
            assert!(v.relative_error() < 1e-5, "{which:?}: {v:?}");
        }
        let f3 = free_lagrangian(&m, &FreeLagrangianSpec::canonical(FreeLagrangianKind::F3)).unwrap();
        assert!((f3.normalized().1 - 3f64.ln()).abs() < 1e-12);
    }
}
