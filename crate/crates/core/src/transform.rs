//! The exponential cover `z ↦ r e^{2πz}` linking annulus and rectangle
//! problems.
//!
//! A map `h` between annuli corresponds to `f̃(z) = (1/2π) log(h(r e^{2πz}) / r*)`
//! on the rectangles `[0, ℓ] × [0, 1]` and `[0, L] × [0, 1]` with
//! `2πℓ = Mod 𝔸₁`, `2πL = Mod 𝔸₂`, glued along `y = 0 ~ y = 1`. Weights
//! correspond through `η = 4π² λ e^{-4πx}`, and then
//! `∫_𝔸₁ φ(𝕂) η = 16π⁴ r² ∫_Q₁ φ(𝕂) λ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::annulus::{Annulus, Rectangle};
use crate::error::{Error, Result};
use crate::field::{
    phi_distortion_energy_with, DistortionNorm, GridMap, PolarGridMap, RectGridMap, BOUNDARY_TOL,
};
use crate::grotzsch::{DistortionGauge, GrotzschProblem, WeightFunction};

pub type RadialWeight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemDictionary {
    pub dom: Annulus,
    pub tgt: Annulus,
    pub ell: f64,
    pub big_l: f64,
}

impl ProblemDictionary {
    pub fn from_annuli(dom: Annulus, tgt: Annulus) -> Self {
        Self { dom, tgt, ell: dom.modulus() / (2.0 * PI), big_l: tgt.modulus() / (2.0 * PI) }
    }

    /// Annuli `A(r, r e^{2πℓ})` and `A(r*, r* e^{2πL})`.
    pub fn from_rectangles(ell: f64, big_l: f64, r: f64, r_star: f64) -> Result<Self> {
        Rectangle::new(ell)?;
        Rectangle::new(big_l)?;
        let dom = Annulus::new(r, r * (2.0 * PI * ell).exp())?;
        let tgt = Annulus::new(r_star, r_star * (2.0 * PI * big_l).exp())?;
        Ok(Self { dom, tgt, ell, big_l })
    }

    pub fn x_of_radius(&self, t: f64) -> f64 {
        (t / self.dom.r_inner()).ln() / (2.0 * PI)
    }

    pub fn radius_of_x(&self, x: f64) -> f64 {
        self.dom.r_inner() * (2.0 * PI * x).exp()
    }

    /// `∫_𝔸₁ φ η = energy_factor · ∫_Q₁ φ λ`.
    pub fn energy_factor(&self) -> f64 {
        16.0 * PI.powi(4) * self.dom.r_inner().powi(2)
    }

    /// `λ(x) = η(r e^{2πx}) e^{4πx} / 4π²`.
    pub fn lambda_from_eta(&self, eta: RadialWeight) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let r = self.dom.r_inner();
        move |x| eta(r * (2.0 * PI * x).exp()) * (4.0 * PI * x).exp() / (4.0 * PI * PI)
    }

    /// `η(t) = 4π² λ(x(t)) e^{-4πx(t)}`.
    pub fn eta_from_lambda(&self, lambda: RadialWeight) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let r = self.dom.r_inner();
        move |t| {
            let x = (t / r).ln() / (2.0 * PI);
            4.0 * PI * PI * lambda(x) * (-4.0 * PI * x).exp()
        }
    }
}

/// The rectangle problem equivalent to minimizing `∫ φ(𝕂) η` on `𝔸₁ → 𝔸₂`.
pub fn annulus_problem_to_rect(
    dom: &Annulus,
    tgt: &Annulus,
    eta: RadialWeight,
    gauge: DistortionGauge,
) -> Result<GrotzschProblem> {
    let d = ProblemDictionary::from_annuli(*dom, *tgt);
    let weight = WeightFunction::custom("annulus", d.ell, d.lambda_from_eta(eta), None)?;
    GrotzschProblem::new(d.ell, d.big_l, gauge, weight)
}

/// `η` on the annulus whose cover carries the rectangle weight `w`.
pub fn rect_weight_to_annulus(w: &WeightFunction, r: f64) -> Result<(Annulus, RadialWeight)> {
    let d = ProblemDictionary::from_rectangles(w.ell(), 1.0, r, 1.0)?;
    let w = w.clone();
    Ok((d.dom, Arc::new(d.eta_from_lambda(Arc::new(move |x| w.value(x))))))
}

/// Lifts with the log branch cut along `θ = 0`.
pub fn lift_map(m: &PolarGridMap) -> Result<RectGridMap> {
    lift_map_with_branch(m, 0)
}

/// Lifts with the rectangle's `y = 0` placed on the ray `θ_{j0}`, using the
/// principal argument of `h` there.
pub fn lift_map_with_branch(m: &PolarGridMap, j0: usize) -> Result<RectGridMap> {
    let (n_t, n) = (m.n_t(), m.n_theta());
    if j0 >= n {
        return Err(Error::InvalidInput(format!("branch column {j0} outside 0..{n}")));
    }
    let d = ProblemDictionary::from_annuli(*m.dom(), *m.tgt());
    let rs = m.tgt().r_inner();
    let radii = m.radii();
    let cols = n + 1;
    let mut values = vec![Complex64::new(0.0, 0.0); (n_t + 1) * cols];
    let mut jets = vec![[Complex64::new(0.0, 0.0); 2]; values.len()];
    let unwrap = |prev: f64, z: Complex64| {
        let a = z.arg();
        prev + (a - prev + PI).rem_euclid(2.0 * PI) - PI
    };
    let mut start = m.value(0, j0).arg();
    for i in 0..=n_t {
        start = unwrap(start, m.value(i, j0));
        let mut arg = start;
        for k in 0..n {
            let j = (j0 + k) % n;
            let h = m.value(i, j);
            if k > 0 {
                arg = unwrap(arg, h);
            }
            values[i * cols + k] = Complex64::new((h.norm() / rs).ln(), arg) / (2.0 * PI);
            let (hn, ht) = m.derivatives(i, j);
            let t = radii[i];
            jets[i * cols + k] = [hn * t / h, ht * t / h];
        }
        let closing = unwrap(arg, m.value(i, j0));
        let degree = (closing - start) / (2.0 * PI);
        if (degree - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!("circle {i} has winding number {degree:.3}, expected 1")));
        }
        values[i * cols + n] = values[i * cols] + Complex64::new(0.0, 1.0);
        jets[i * cols + n] = jets[i * cols];
    }
    // Radii are exact on the boundary circles; pin the lifted edges.
    for k in 0..cols {
        values[k].re = 0.0;
        values[n_t * cols + k].re = d.big_l;
    }
    let q1 = Rectangle::new(d.ell)?;
    let q2 = Rectangle::new(d.big_l)?;
    RectGridMap::from_jets(q1, q2, n_t, n, true, values, jets)
}

/// Inverse of [`lift_map`] onto `A(r, r e^{2πℓ}) → A(r*, r* e^{2πL})`.
pub fn project_map(m: &RectGridMap, r: f64, r_star: f64) -> Result<PolarGridMap> {
    let (n_x, n_y) = (m.n_x(), m.n_y());
    for i in 0..=n_x {
        let gap = (m.value(i, n_y) - m.value(i, 0) - Complex64::new(0.0, 1.0)).norm();
        if gap > BOUNDARY_TOL {
            return Err(Error::SeamMismatch(gap));
        }
    }
    let d = ProblemDictionary::from_rectangles(m.q1().length(), m.q2().length(), r, r_star)?;
    let radii = PolarGridMap::radii_for(&d.dom, n_x);
    let mut values = Vec::with_capacity((n_x + 1) * n_y);
    let mut jets = Vec::with_capacity(values.capacity());
    for (i, &t) in radii.iter().enumerate() {
        for j in 0..n_y {
            let f = m.value(i, j);
            let h = r_star * (2.0 * PI * f).exp();
            let (fx, fy) = m.derivatives(i, j);
            values.push(h);
            jets.push([h * fx / t, h * fy / t]);
        }
    }
    PolarGridMap::from_jets(d.dom, d.tgt, n_x, n_y, values, jets)
}

/// Both sides of the energy dictionary for a polar map: `∫_𝔸 φ(𝕂) η` and
/// `16π⁴ r² ∫_Q φ(𝕂̃) λ` computed on the lifted map.
pub fn dictionary_energies(
    m: &PolarGridMap,
    gauge: &DistortionGauge,
    lambda: RadialWeight,
    norm: DistortionNorm,
) -> Result<(f64, f64)> {
    let d = ProblemDictionary::from_annuli(*m.dom(), *m.tgt());
    let eta = d.eta_from_lambda(lambda.clone());
    let polar = GridMap::Polar(m.clone());
    let annulus = phi_distortion_energy_with(&polar, gauge, |t, _| eta(t), norm)?.value;
    let rect = GridMap::Rect(lift_map(m)?);
    let q = phi_distortion_energy_with(&rect, gauge, |x, _| lambda(x), norm)?.value;
    Ok((annulus, d.energy_factor() * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::distortion_at;
    use crate::radial::harmonic_radial;

    #[test]
    fn moduli_round_trip() {
        let d = ProblemDictionary::from_rectangles(0.3, 1.0, 1.0, 1.0).unwrap();
        assert!((d.tgt.r_outer() - (2.0 * PI).exp()).abs() < 1e-9);
        let back = ProblemDictionary::from_annuli(d.dom, d.tgt);
        assert!((back.ell - 0.3).abs() < 1e-12 && (back.big_l - 1.0).abs() < 1e-12);
        let lam = d.lambda_from_eta(Arc::new(|_| 4.0 * PI * PI));
        for x in [0.0, 0.1, 0.3] {
            assert!((lam(x) / (4.0 * PI * x).exp() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_lifts_to_identity() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let m = PolarGridMap::sample_fn(a, a, 8, 16, Complex64::from_polar).unwrap();
        let f = lift_map(&m).unwrap();
        for i in 0..=8 {
            for j in 0..=16 {
                let x = RectGridMap::x_at(f.q1(), 8, i);
                let want = Complex64::new(x, j as f64 / 16.0);
                assert!((f.value(i, j) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn radial_lift_is_shear_and_round_trips() {
        let dom = Annulus::new(1.0, 2.0).unwrap();
        let tgt = Annulus::new(1.0, 3.0).unwrap();
        let p = harmonic_radial(&dom, &tgt).unwrap();
        let m = PolarGridMap::sample_radial(&p, 32, 16).unwrap();
        let f = lift_map(&m).unwrap();
        for i in 0..=32 {
            let x = RectGridMap::x_at(f.q1(), 32, i);
            let u = p.value((2.0 * PI * x).exp()).ln() / (2.0 * PI);
            assert!((f.value(i, 5).re - u).abs() < 1e-12);
        }
        let back = project_map(&f, 1.0, 1.0).unwrap();
        let (g0, g1) = (GridMap::Polar(m.clone()), GridMap::Polar(back));
        let fr = GridMap::Rect(f);
        for i in 1..32 {
            let k = distortion_at(&g0, i, 3).unwrap();
            assert!((distortion_at(&fr, i, 3).unwrap() / k - 1.0).abs() < 1e-12);
            assert!((distortion_at(&g1, i, 3).unwrap() / k - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seam_mismatch_rejected() {
        let q = Rectangle::new(0.5).unwrap();
        let f = RectGridMap::sample_fn(q, q, 8, 8, |x, y| Complex64::new(x + 0.01 * x * (0.5 - x) * y, y)).unwrap();
        assert!(matches!(project_map(&f, 1.0, 1.0), Err(Error::SeamMismatch(_))));
    }
}
