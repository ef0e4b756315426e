//! Sampled deformations on tensor grids.
//!
//! Polar grids are uniform in `ln t` with `n_t` radial cells (so `n_t + 1`
//! circles) and `n_theta` angular nodes; rectangular grids carry `n_x + 1` by
//! `n_y + 1` nodes. Partial derivatives are computed once at construction and
//! stored in the orthonormal frame of the source: `(h_N, h_T)` for polar maps
//! and `(f_x, f_y)` for rectangles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::stencil::{lagrange_derivative, Spectral};
use crate::annulus::{Annulus, Rectangle};
use crate::error::{Error, Result};
use crate::quadrature::simpson_weights;
use crate::radial::RadialProfile;

/// Boundary values must match the target to this accuracy.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Cells with `|J| / |Df|²` at most this are treated as squeezed.
pub const DEGENERATE_TOL: f64 = 1e-6;

const MIN_NODES: usize = 3;

/// Local classification of a node from its normalised Jacobian
/// `J / |Df|² ∈ [-1/2, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Regular,
    Degenerate,
    Folded,
}

/// Global classification of a sampled map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admissibility {
    /// Positive Jacobian at every interior node.
    Homeomorphism,
    /// No folds, but some interior nodes are squeezed.
    MonotoneLimit { degenerate_nodes: usize },
    /// Orientation reversal at node `(i, j)`.
    Folded { i: usize, j: usize, jacobian: f64 },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::Folded { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Admissibility::Homeomorphism => "homeomorphism",
            Admissibility::MonotoneLimit { .. } => "monotone-limit",
            Admissibility::Folded { .. } => "folded",
        }
    }
}

/// Node data shared by both grid shapes. Index `(i, j)` lives at `i * cols + j`.
#[derive(Debug, Clone)]
pub(crate) struct Nodes {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<Complex64>,
    pub partials: Vec<[Complex64; 2]>,
    /// Area weight of each node in the tensor quadrature.
    pub weights: Vec<f64>,
    pub admissibility: Admissibility,
}

impl Nodes {
    fn finish(
        rows: usize,
        cols: usize,
        values: Vec<Complex64>,
        partials: Vec<[Complex64; 2]>,
        weights: Vec<f64>,
        interior: impl Fn(usize, usize) -> bool,
    ) -> Self {
        let mut n = Self {
            rows,
            cols,
            values,
            partials,
            weights,
            admissibility: Admissibility::Homeomorphism,
        };
        let mut degenerate = 0;
        let mut fold: Option<(usize, usize, f64)> = None;
        for i in 0..rows {
            for j in 0..cols {
                match n.class(i, j) {
                    NodeClass::Regular => {}
                    NodeClass::Degenerate => {
                        if interior(i, j) {
                            degenerate += 1;
                        }
                    }
                    NodeClass::Folded => {
                        let jac = n.jacobian(i, j);
                        if fold.map_or(true, |(_, _, f)| jac < f) {
                            fold = Some((i, j, jac));
                        }
                    }
                }
            }
        }
        n.admissibility = match fold {
            Some((i, j, jacobian)) => Admissibility::Folded { i, j, jacobian },
            None if degenerate > 0 => Admissibility::MonotoneLimit { degenerate_nodes: degenerate },
            None => Admissibility::Homeomorphism,
        };
        n
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }

    #[inline]
    pub fn jacobian(&self, i: usize, j: usize) -> f64 {
        let [a, b] = self.partials[self.idx(i, j)];
        (a.conj() * b).im
    }

    #[inline]
    pub fn frobenius_sq(&self, i: usize, j: usize) -> f64 {
        let [a, b] = self.partials[self.idx(i, j)];
        a.norm_sqr() + b.norm_sqr()
    }

    pub fn class(&self, i: usize, j: usize) -> NodeClass {
        let ratio = self.jacobian(i, j) / self.frobenius_sq(i, j);
        if ratio > DEGENERATE_TOL {
            NodeClass::Regular
        } else if ratio >= -DEGENERATE_TOL || ratio.is_nan() {
            NodeClass::Degenerate
        } else {
            NodeClass::Folded
        }
    }
}

fn check_sizes(what: &str, rows: usize, cols: usize) -> Result<()> {
    if rows < MIN_NODES || cols < MIN_NODES {
        return Err(Error::GridTooSmall(format!(
            "{what} grid needs at least {MIN_NODES} nodes per direction, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// Periodic trapezoid weights for `n` nodes on a period of length `p`.
fn periodic_weights(n: usize, p: f64) -> Vec<f64> {
    vec![p / n as f64; n]
}

/// Samples of `h(t_i e^{iθ_j})` on a log-uniform polar grid.
#[derive(Debug, Clone)]
pub struct PolarGridMap {
    dom: Annulus,
    tgt: Annulus,
    n_t: usize,
    n_theta: usize,
    radii: Vec<f64>,
    nodes: Nodes,
    profile: Option<RadialProfile>,
    has_jets: bool,
}

impl PolarGridMap {
    /// Radii `t_0 = r < … < t_{n_t} = R`, uniform in `ln t`.
    pub fn radii_for(dom: &Annulus, n_t: usize) -> Vec<f64> {
        let (r, big_r) = (dom.r_inner(), dom.r_outer());
        let span = (big_r / r).ln();
        let mut ts: Vec<f64> = (0..=n_t).map(|i| r * (span * i as f64 / n_t as f64).exp()).collect();
        ts[n_t] = big_r;
        ts
    }

    pub fn angle(n_theta: usize, j: usize) -> f64 {
        2.0 * PI * j as f64 / n_theta as f64
    }

    /// Builds a grid map from raw samples, indexed `i * n_theta + j`.
    pub fn from_values(dom: Annulus, tgt: Annulus, n_t: usize, n_theta: usize, values: Vec<Complex64>) -> Result<Self> {
        Self::build(dom, tgt, n_t, n_theta, values, None)
    }

    /// Same as [`from_values`](Self::from_values) with derivatives supplied
    /// by the caller instead of finite differences.
    pub fn from_jets(
        dom: Annulus,
        tgt: Annulus,
        n_t: usize,
        n_theta: usize,
        values: Vec<Complex64>,
        jets: Vec<[Complex64; 2]>,
    ) -> Result<Self> {
        Self::build(dom, tgt, n_t, n_theta, values, Some(jets))
    }

    /// Samples an arbitrary map `(t, θ) ↦ h`.
    pub fn sample_fn<F>(dom: Annulus, tgt: Annulus, n_t: usize, n_theta: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        check_sizes("polar", n_t + 1, n_theta)?;
        let radii = Self::radii_for(&dom, n_t);
        let mut values = Vec::with_capacity(radii.len() * n_theta);
        for &t in &radii {
            for j in 0..n_theta {
                values.push(f(t, Self::angle(n_theta, j)));
            }
        }
        Self::from_values(dom, tgt, n_t, n_theta, values)
    }

    fn build(
        dom: Annulus,
        tgt: Annulus,
        n_t: usize,
        n_theta: usize,
        values: Vec<Complex64>,
        jets: Option<Vec<[Complex64; 2]>>,
    ) -> Result<Self> {
        check_sizes("polar", n_t + 1, n_theta)?;
        let rows = n_t + 1;
        if values.len() != rows * n_theta {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for a {}x{} polar grid, got {}",
                rows * n_theta,
                rows,
                n_theta,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        for (i, want) in [(0, tgt.r_inner()), (n_t, tgt.r_outer())] {
            for j in 0..n_theta {
                let got = values[i * n_theta + j].norm();
                if (got - want).abs() > BOUNDARY_TOL * want.max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "boundary circle {i}: |h| = {got} at θ index {j}, expected {want}"
                    )));
                }
            }
        }
        let radii = Self::radii_for(&dom, n_t);
        let has_jets = jets.is_some();
        let partials = match jets {
            Some(j) if j.len() == values.len() => j,
            Some(j) => {
                return Err(Error::InvalidInput(format!("{} jets for {} samples", j.len(), values.len())))
            }
            None => polar_partials(&radii, n_theta, &values),
        };
        let ds = (dom.r_outer() / dom.r_inner()).ln() / n_t as f64;
        let ws = simpson_weights(n_t, ds);
        let wt = periodic_weights(n_theta, 2.0 * PI);
        let mut weights = Vec::with_capacity(values.len());
        for i in 0..rows {
            // dA = t dt dθ = t² ds dθ
            let wi = ws[i] * radii[i] * radii[i];
            weights.extend(wt.iter().map(|w| wi * w));
        }
        let nodes = Nodes::finish(rows, n_theta, values, partials, weights, |i, _| i > 0 && i < n_t);
        Ok(Self { dom, tgt, n_t, n_theta, radii, nodes, profile: None, has_jets })
    }

    /// `H(t) e^{iθ}` for a radial profile, keeping the profile for later
    /// reparametrisation by the perturbation generator.
    pub fn sample_radial(p: &RadialProfile, n_t: usize, n_theta: usize) -> Result<Self> {
        let mut m = Self::sample_fn(p.dom, p.tgt, n_t, n_theta, |t, th| Complex64::from_polar(p.value(t), th))?;
        m.profile = Some(*p);
        Ok(m)
    }

    pub fn dom(&self) -> &Annulus {
        &self.dom
    }

    pub fn tgt(&self) -> &Annulus {
        &self.tgt
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        self.profile.as_ref()
    }

    pub fn has_jets(&self) -> bool {
        self.has_jets
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.nodes.values[self.nodes.idx(i, j)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.nodes.values
    }

    /// `(h_N, h_T)` at node `(i, j)`.
    pub fn derivatives(&self, i: usize, j: usize) -> (Complex64, Complex64) {
        let [a, b] = self.nodes.partials[self.nodes.idx(i, j)];
        (a, b)
    }

    pub fn jets(&self) -> &[[Complex64; 2]] {
        &self.nodes.partials
    }

    pub fn admissibility(&self) -> Admissibility {
        self.nodes.admissibility
    }

    pub(crate) fn nodes(&self) -> &Nodes {
        &self.nodes
    }

    /// Every `step`-th circle and ray; `None` unless both sizes divide.
    pub fn subsample(&self, step: usize) -> Option<Result<Self>> {
        if step == 0 || self.n_t % step != 0 || self.n_theta % step != 0 {
            return None;
        }
        let (n_t, n_theta) = (self.n_t / step, self.n_theta / step);
        let mut values = Vec::new();
        for i in (0..=self.n_t).step_by(step) {
            for j in (0..self.n_theta).step_by(step) {
                values.push(self.value(i, j));
            }
        }
        Some(Self::from_values(self.dom, self.tgt, n_t, n_theta, values))
    }
}

fn polar_partials(radii: &[f64], n_theta: usize, values: &[Complex64]) -> Vec<[Complex64; 2]> {
    let rows = radii.len();
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; values.len()];
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for j in 0..n_theta {
        for i in 0..rows {
            column[i] = values[i * n_theta + j];
        }
        for (i, d) in lagrange_derivative(radii, &column).into_iter().enumerate() {
            out[i * n_theta + j][0] = d;
        }
    }
    let spectral = Spectral::new(n_theta, 2.0 * PI);
    for (i, &t) in radii.iter().enumerate() {
        let mut row = values[i * n_theta..(i + 1) * n_theta].to_vec();
        spectral.differentiate(&mut row);
        for (j, d) in row.into_iter().enumerate() {
            out[i * n_theta + j][1] = d / t;
        }
    }
    out
}

/// Samples of `f(x_i + i y_j)` on `[0, ℓ] × [0, 1]`.
#[derive(Debug, Clone)]
pub struct RectGridMap {
    q1: Rectangle,
    q2: Rectangle,
    n_x: usize,
    n_y: usize,
    periodic: bool,
    nodes: Nodes,
    has_jets: bool,
}

impl RectGridMap {
    pub fn x_at(q1: &Rectangle, n_x: usize, i: usize) -> f64 {
        if i == n_x {
            q1.length()
        } else {
            q1.length() * i as f64 / n_x as f64
        }
    }

    pub fn y_at(n_y: usize, j: usize) -> f64 {
        j as f64 / n_y as f64
    }

    /// Builds a map from `(n_x + 1) * (n_y + 1)` samples indexed
    /// `i * (n_y + 1) + j`. With `periodic`, `f - iy` is treated as
    /// 1-periodic in `y` and differentiated spectrally.
    pub fn from_values(
        q1: Rectangle,
        q2: Rectangle,
        n_x: usize,
        n_y: usize,
        periodic: bool,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        Self::build(q1, q2, n_x, n_y, periodic, values, None)
    }

    pub fn from_jets(
        q1: Rectangle,
        q2: Rectangle,
        n_x: usize,
        n_y: usize,
        periodic: bool,
        values: Vec<Complex64>,
        jets: Vec<[Complex64; 2]>,
    ) -> Result<Self> {
        Self::build(q1, q2, n_x, n_y, periodic, values, Some(jets))
    }

    pub fn sample_fn<F>(q1: Rectangle, q2: Rectangle, n_x: usize, n_y: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        check_sizes("rectangular", n_x + 1, n_y + 1)?;
        let mut values = Vec::with_capacity((n_x + 1) * (n_y + 1));
        for i in 0..=n_x {
            let x = Self::x_at(&q1, n_x, i);
            for j in 0..=n_y {
                values.push(f(x, Self::y_at(n_y, j)));
            }
        }
        Self::from_values(q1, q2, n_x, n_y, false, values)
    }

    fn build(
        q1: Rectangle,
        q2: Rectangle,
        n_x: usize,
        n_y: usize,
        periodic: bool,
        values: Vec<Complex64>,
        jets: Option<Vec<[Complex64; 2]>>,
    ) -> Result<Self> {
        let (rows, cols) = (n_x + 1, n_y + 1);
        check_sizes("rectangular", rows, cols)?;
        if values.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for a {}x{} rectangular grid, got {}",
                rows * cols,
                rows,
                cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        let big_l = q2.length();
        let tol = BOUNDARY_TOL * big_l.max(1.0);
        for j in 0..cols {
            let (a, b) = (values[j].re, values[n_x * cols + j].re);
            if a.abs() > tol || (b - big_l).abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "vertical edges must map to Re f = 0 and Re f = {big_l}; got {a} and {b} at row {j}"
                )));
            }
        }
        // On a cylinder the horizontal edges are glued; the seam check below
        // replaces the edge condition.
        for i in (0..rows).filter(|_| !periodic) {
            let (a, b) = (values[i * cols].im, values[i * cols + n_y].im);
            if a.abs() > BOUNDARY_TOL || (b - 1.0).abs() > BOUNDARY_TOL {
                return Err(Error::InvalidInput(format!(
                    "horizontal edges must map to Im f = 0 and Im f = 1; got {a} and {b} at column {i}"
                )));
            }
        }
        if periodic {
            for i in 0..rows {
                let gap = values[i * cols + n_y] - values[i * cols] - Complex64::new(0.0, 1.0);
                if gap.norm() > BOUNDARY_TOL {
                    return Err(Error::SeamMismatch(gap.norm()));
                }
            }
        }
        let has_jets = jets.is_some();
        let partials = match jets {
            Some(j) if j.len() == values.len() => j,
            Some(j) => {
                return Err(Error::InvalidInput(format!("{} jets for {} samples", j.len(), values.len())))
            }
            None => rect_partials(&q1, n_x, n_y, periodic, &values),
        };
        let wx = simpson_weights(n_x, q1.length() / n_x as f64);
        let wy = if periodic {
            let mut w = periodic_weights(n_y, 1.0);
            w.push(0.0);
            w
        } else {
            simpson_weights(n_y, 1.0 / n_y as f64)
        };
        let mut weights = Vec::with_capacity(values.len());
        for a in &wx {
            weights.extend(wy.iter().map(|b| a * b));
        }
        let nodes = Nodes::finish(rows, cols, values, partials, weights, |i, j| {
            i > 0 && i < n_x && (periodic || (j > 0 && j < n_y))
        });
        Ok(Self { q1, q2, n_x, n_y, periodic, nodes, has_jets })
    }

    pub fn q1(&self) -> &Rectangle {
        &self.q1
    }

    pub fn q2(&self) -> &Rectangle {
        &self.q2
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn has_jets(&self) -> bool {
        self.has_jets
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.nodes.values[self.nodes.idx(i, j)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.nodes.values
    }

    /// `(f_x, f_y)` at node `(i, j)`.
    pub fn derivatives(&self, i: usize, j: usize) -> (Complex64, Complex64) {
        let [a, b] = self.nodes.partials[self.nodes.idx(i, j)];
        (a, b)
    }

    pub fn jets(&self) -> &[[Complex64; 2]] {
        &self.nodes.partials
    }

    pub fn admissibility(&self) -> Admissibility {
        self.nodes.admissibility
    }

    pub(crate) fn nodes(&self) -> &Nodes {
        &self.nodes
    }

    pub fn subsample(&self, step: usize) -> Option<Result<Self>> {
        if step == 0 || self.n_x % step != 0 || self.n_y % step != 0 {
            return None;
        }
        let cols = self.n_y + 1;
        let mut values = Vec::new();
        for i in (0..=self.n_x).step_by(step) {
            for j in (0..cols).step_by(step) {
                values.push(self.nodes.values[i * cols + j]);
            }
        }
        Some(Self::from_values(self.q1, self.q2, self.n_x / step, self.n_y / step, self.periodic, values))
    }
}

fn rect_partials(q1: &Rectangle, n_x: usize, n_y: usize, periodic: bool, values: &[Complex64]) -> Vec<[Complex64; 2]> {
    let (rows, cols) = (n_x + 1, n_y + 1);
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; values.len()];
    let xs: Vec<f64> = (0..rows).map(|i| RectGridMap::x_at(q1, n_x, i)).collect();
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for j in 0..cols {
        for i in 0..rows {
            column[i] = values[i * cols + j];
        }
        for (i, d) in lagrange_derivative(&xs, &column).into_iter().enumerate() {
            out[i * cols + j][0] = d;
        }
    }
    let ys: Vec<f64> = (0..cols).map(|j| RectGridMap::y_at(n_y, j)).collect();
    let spectral = periodic.then(|| Spectral::new(n_y, 1.0));
    for i in 0..rows {
        let row = &values[i * cols..(i + 1) * cols];
        let d = match &spectral {
            Some(s) => {
                let mut buf: Vec<Complex64> =
                    row[..n_y].iter().zip(&ys).map(|(v, &y)| v - Complex64::new(0.0, y)).collect();
                s.differentiate(&mut buf);
                let mut d: Vec<Complex64> = buf.into_iter().map(|v| v + Complex64::new(0.0, 1.0)).collect();
                d.push(d[0]);
                d
            }
            None => lagrange_derivative(&ys, row),
        };
        for (j, v) in d.into_iter().enumerate() {
            out[i * cols + j][1] = v;
        }
    }
    out
}

/// Either grid shape.
#[derive(Debug, Clone)]
pub enum GridMap {
    Polar(PolarGridMap),
    Rect(RectGridMap),
}

impl From<PolarGridMap> for GridMap {
    fn from(m: PolarGridMap) -> Self {
        GridMap::Polar(m)
    }
}

impl From<RectGridMap> for GridMap {
    fn from(m: RectGridMap) -> Self {
        GridMap::Rect(m)
    }
}

impl GridMap {
    pub(crate) fn nodes(&self) -> &Nodes {
        match self {
            GridMap::Polar(m) => m.nodes(),
            GridMap::Rect(m) => m.nodes(),
        }
    }

    /// Node counts `(rows, cols)`; rows run along `t` or `x`.
    pub fn shape(&self) -> (usize, usize) {
        let n = self.nodes();
        (n.rows, n.cols)
    }

    /// Source coordinates of a node: `(t, θ)` or `(x, y)`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        match self {
            GridMap::Polar(m) => (m.radii[i], PolarGridMap::angle(m.n_theta, j)),
            GridMap::Rect(m) => (RectGridMap::x_at(&m.q1, m.n_x, i), RectGridMap::y_at(m.n_y, j)),
        }
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        let n = self.nodes();
        n.values[n.idx(i, j)]
    }

    pub fn derivatives(&self, i: usize, j: usize) -> (Complex64, Complex64) {
        let n = self.nodes();
        let [a, b] = n.partials[n.idx(i, j)];
        (a, b)
    }

    pub fn jacobian(&self, i: usize, j: usize) -> f64 {
        self.nodes().jacobian(i, j)
    }

    /// Real 2×2 derivative matrix in the source frame.
    pub fn derivative_matrix(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let (a, b) = self.derivatives(i, j);
        [[a.re, b.re], [a.im, b.im]]
    }

    pub fn class(&self, i: usize, j: usize) -> NodeClass {
        self.nodes().class(i, j)
    }

    pub fn admissibility(&self) -> Admissibility {
        self.nodes().admissibility
    }

    pub fn has_jets(&self) -> bool {
        match self {
            GridMap::Polar(m) => m.has_jets,
            GridMap::Rect(m) => m.has_jets,
        }
    }

    /// Coarser copy on every second node, used for error budgets.
    pub fn subsample(&self, step: usize) -> Option<Result<GridMap>> {
        match self {
            GridMap::Polar(m) => m.subsample(step).map(|r| r.map(GridMap::Polar)),
            GridMap::Rect(m) => m.subsample(step).map(|r| r.map(GridMap::Rect)),
        }
    }

    pub fn as_polar(&self) -> Option<&PolarGridMap> {
        match self {
            GridMap::Polar(m) => Some(m),
            GridMap::Rect(_) => None,
        }
    }

    pub fn as_rect(&self) -> Option<&RectGridMap> {
        match self {
            GridMap::Rect(m) => Some(m),
            GridMap::Polar(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{beyond_nitsche_profile, harmonic_radial};

    #[test]
    fn identity_derivatives_are_exact() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let m = PolarGridMap::sample_fn(a, a, 16, 32, Complex64::from_polar).unwrap();
        for i in 0..=16 {
            for j in 0..32 {
                let (hn, ht) = m.derivatives(i, j);
                let e = Complex64::from_polar(1.0, PolarGridMap::angle(32, j));
                assert!((hn - e).norm() < 1e-12);
                assert!((ht - Complex64::i() * e).norm() < 1e-12);
            }
        }
        assert_eq!(m.admissibility(), Admissibility::Homeomorphism);
    }

    #[test]
    fn boundary_mismatch_rejected() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let b = Annulus::new(1.0, 3.0).unwrap();
        assert!(PolarGridMap::sample_fn(a, b, 8, 8, Complex64::from_polar).is_err());
    }

    #[test]
    fn tiny_grids_rejected() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let e = PolarGridMap::sample_fn(a, a, 1, 8, Complex64::from_polar).unwrap_err();
        assert!(matches!(e, Error::GridTooSmall(_)));
    }

    #[test]
    fn plateau_is_a_monotone_limit() {
        let dom = Annulus::new(1.0, 4.0).unwrap();
        let tgt = Annulus::new(1.0, 1.25).unwrap();
        let p = beyond_nitsche_profile(&dom, &tgt).unwrap();
        let m = PolarGridMap::sample_radial(&p, 64, 16).unwrap();
        assert!(matches!(m.admissibility(), Admissibility::MonotoneLimit { .. }));
    }

    #[test]
    fn folded_map_detected() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let m = PolarGridMap::sample_fn(a, a, 8, 16, |t, th| Complex64::from_polar(t, -th)).unwrap();
        assert!(matches!(m.admissibility(), Admissibility::Folded { .. }));
    }

    #[test]
    fn harmonic_derivatives_second_order() {
        let dom = Annulus::new(1.0, 2.0).unwrap();
        let tgt = Annulus::new(1.0, 3.0).unwrap();
        let p = harmonic_radial(&dom, &tgt).unwrap();
        let err = |n: usize| {
            let m = PolarGridMap::sample_radial(&p, n, 8).unwrap();
            (0..=n)
                .map(|i| {
                    let t = m.radii()[i];
                    let (hn, ht) = m.derivatives(i, 0);
                    (hn.norm() - p.slope(t)).abs().max((ht.norm() - p.value(t) / t).abs())
                })
                .fold(0.0, f64::max)
        };
        let order = (err(32) / err(64)).log2();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn rect_identity_and_periodic_seam() {
        let q = Rectangle::new(0.5).unwrap();
        let m = RectGridMap::sample_fn(q, q, 8, 8, Complex64::new).unwrap();
        let (fx, fy) = m.derivatives(3, 4);
        assert!((fx - 1.0).norm() < 1e-13 && (fy - Complex64::i()).norm() < 1e-13);
        let mut values = m.values().to_vec();
        values[9 + 8] += Complex64::new(0.0, 1e-6);
        assert!(RectGridMap::from_values(q, q, 8, 8, true, values).is_err());
    }
}
