//! Seeded, boundary-respecting perturbations of sampled maps.
//!
//! Every perturbation keeps the boundary correspondence: polar maps keep
//! `|h|` on both circles and may slide tangentially, rectangle maps keep
//! each edge on its image edge. Coefficients are drawn from a ChaCha stream
//! seeded by `seed`, so the output depends only on `(map, amplitude, seed)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{Admissibility, GridMap, PolarGridMap, RectGridMap};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

pub const DEFAULT_AMPLITUDE: f64 = 0.05;
pub const MAX_HALVINGS: u32 = 8;

#[derive(Debug, Clone, Copy)]
enum Basis {
    Sin,
    Cos,
}

/// `Σ basis(m π s) (a cos(2π n y / P) + b sin(2π n y / P))` with
/// `Σ (|a| + |b|) (m π + n) = 1`, so first derivatives stay below one.
#[derive(Debug, Clone)]
struct Modes {
    basis: Basis,
    terms: Vec<(f64, f64, f64, f64)>,
}

impl Modes {
    fn draw(rng: &mut ChaCha8Rng, basis: Basis, ms: &[usize], ns: &[usize]) -> Self {
        let mut terms = Vec::new();
        for &m in ms {
            for &n in ns {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = if n == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
                terms.push((m as f64, n as f64, a, b));
            }
        }
        let norm: f64 = terms.iter().map(|&(m, n, a, b)| (a.abs() + b.abs()) * (m * PI + n).max(1.0)).sum();
        for t in &mut terms {
            t.2 /= norm;
            t.3 /= norm;
        }
        Self { basis, terms }
    }

    /// `s ∈ [0, 1]` along the first factor, `phase` the angle of the second.
    fn eval(&self, s: f64, phase: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(m, n, a, b)| {
                let first = match self.basis {
                    Basis::Sin => (m * PI * s).sin(),
                    Basis::Cos => (m * PI * s).cos(),
                };
                first * (a * (n * phase).cos() + b * (n * phase).sin())
            })
            .sum()
    }
}

/// Perturbs `m` with relative amplitude `amplitude`. If the result folds, or
/// a homeomorphism degenerates, the amplitude is halved up to
/// [`MAX_HALVINGS`] times before giving up.
pub fn perturb_map(m: &GridMap, amplitude: f64, seed: u64) -> Result<GridMap> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::InvalidInput(format!("perturbation amplitude {amplitude}")));
    }
    if amplitude == 0.0 {
        return Ok(m.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = m.admissibility();
    let draw = match m {
        GridMap::Polar(_) => Draw::polar(&mut rng),
        GridMap::Rect(r) => Draw::rect(&mut rng, r.periodic()),
    };
    let mut eps = amplitude;
    for _ in 0..=MAX_HALVINGS {
        let out = match m {
            GridMap::Polar(p) => GridMap::Polar(draw.apply_polar(p, eps)?),
            GridMap::Rect(r) => GridMap::Rect(draw.apply_rect(r, eps)?),
        };
        let ok = match (base, out.admissibility()) {
            (_, Admissibility::Folded { .. }) => false,
            (Admissibility::Homeomorphism, a) => a == Admissibility::Homeomorphism,
            _ => true,
        };
        if ok {
            return Ok(out);
        }
        eps *= 0.5;
    }
    Err(Error::RejectedPerturbation { seed, attempts: MAX_HALVINGS + 1 })
}

struct Draw {
    a: Modes,
    b: Modes,
    c: Modes,
    d: Modes,
}

impl Draw {
    fn polar(rng: &mut ChaCha8Rng) -> Self {
        Self {
            // radial reparametrisation and log-modulus factor, both vanishing on
            // the boundary circles
            a: Modes::draw(rng, Basis::Sin, &[1, 2, 3], &[0, 1, 2]),
            b: Modes::draw(rng, Basis::Sin, &[1, 2, 3], &[0, 1, 2]),
            // angular slip: a part constant along rays plus a part that is
            // switched off where the map squeezes
            c: Modes::draw(rng, Basis::Cos, &[0], &[1, 2, 3]),
            d: Modes::draw(rng, Basis::Cos, &[0, 1, 2], &[0, 1, 2]),
        }
    }

    fn rect(rng: &mut ChaCha8Rng, periodic: bool) -> Self {
        let ns: &[usize] = if periodic { &[1, 2, 3] } else { &[0, 1, 2, 3] };
        Self {
            a: Modes::draw(rng, Basis::Cos, &[0], &[0, 1, 2, 3]),
            b: Modes::draw(rng, Basis::Cos, &[0, 1, 2, 3], &[0]),
            c: Modes::draw(rng, Basis::Sin, &[0, 1, 2, 3], &[0]),
            d: Modes::draw(rng, Basis::Cos, &[0], ns),
        }
    }

    fn apply_polar(&self, m: &PolarGridMap, eps: f64) -> Result<PolarGridMap> {
        let (n_t, n_theta) = (m.n_t(), m.n_theta());
        let (r, big_r) = (m.dom().r_inner(), m.dom().r_outer());
        let span = (big_r / r).ln();
        let mut values = Vec::with_capacity(m.values().len());
        for i in 0..=n_t {
            let sigma = i as f64 / n_t as f64;
            for j in 0..n_theta {
                let th = PolarGridMap::angle(n_theta, j);
                let slip = self.c.eval(0.0, th);
                let v = match m.profile() {
                    Some(p) => {
                        let s2 = (sigma + eps * self.a.eval(sigma, th)).clamp(0.0, 1.0);
                        let tau = if i == 0 {
                            r
                        } else if i == n_t {
                            big_r
                        } else {
                            (r * (span * s2).exp()).clamp(r, big_r)
                        };
                        let w = squeeze_weight(p, tau);
                        let modulus = p.value(tau) * (eps * w * self.b.eval(sigma, th)).exp();
                        Complex64::from_polar(modulus, th + eps * (slip + w * self.d.eval(sigma, th)))
                    }
                    None => {
                        let g = self.b.eval(sigma, th);
                        let k = slip + self.d.eval(sigma, th);
                        m.value(i, j) * Complex64::new(eps * g, eps * k).exp()
                    }
                };
                values.push(v);
            }
        }
        PolarGridMap::from_values(*m.dom(), *m.tgt(), n_t, n_theta, values)
    }

    fn apply_rect(&self, m: &RectGridMap, eps: f64) -> Result<RectGridMap> {
        let (n_x, n_y) = (m.n_x(), m.n_y());
        let ell = m.q1().length();
        let big_l = m.q2().length();
        let mut values = Vec::with_capacity(m.values().len());
        for i in 0..=n_x {
            let x = RectGridMap::x_at(m.q1(), n_x, i);
            let s = x / ell;
            for j in 0..=n_y {
                let y = RectGridMap::y_at(n_y, j);
                let phase = 2.0 * PI * y;
                let re = big_l * (PI * s).sin() * self.a.eval(0.0, phase);
                let k = self.b.eval(s, 0.0) + self.c.eval(s, 0.0);
                let im = if m.periodic() {
                    ell.min(1.0) * k * self.d.eval(0.0, phase)
                } else {
                    (PI * y).sin() * k
                };
                values.push(m.value(i, j) + Complex64::new(eps * re, eps * im));
            }
        }
        RectGridMap::from_values(*m.q1(), *m.q2(), n_x, n_y, m.periodic(), values)
    }
}

/// `2η² / (1 + η²)` with `η` the elasticity: zero where the profile is flat,
/// one for conformal profiles.
fn squeeze_weight(p: &RadialProfile, tau: f64) -> f64 {
    let eta = p.elasticity(tau).unwrap_or(0.0);
    2.0 * eta * eta / (1.0 + eta * eta)
}
