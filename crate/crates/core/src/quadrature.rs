//! Adaptive Gauss-Kronrod quadrature and a shell-based integrator for
//! integrands that may blow up at one endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute and relative tolerance pair; a result is accepted when its error
/// estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { abs: 1e-12, rel: 1e-10 };

    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = h.abs();
    let error = rescale_error((res_k - res_g) * h, res_abs * ah, res_asc * ah);
    Panel { a, b, value: res_k * h, error }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are tolerated as long as the panel budget suffices.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let first = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Panels too narrow to split further keep their error as is.
    let mut done: Vec<Panel> = Vec::new();
    while error > tol.target(value) && value.is_finite() {
        let Some(worst) = heap.pop() else { break };
        if heap.len() + done.len() >= MAX_PANELS {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a.min(worst.b) < mid && mid < worst.a.max(worst.b)) {
            done.push(worst);
            continue;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Resum to shed the drift of the running updates.
    let all = || heap.iter().chain(done.iter());
    value = all().map(|p| p.value).sum::<f64>();
    error = all().map(|p| p.error).sum::<f64>();
    if !value.is_finite() || error > tol.target(value) {
        return Err(Error::Quadrature { estimate: value, error });
    }
    Ok(Estimate { value, error, evaluations })
}

/// How the integrand is expected to behave next to the singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointKind {
    /// Bounded near the endpoint, possibly with a sharp peak.
    Bounded,
    /// May diverge; the shell ratios decide.
    Improper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellConfig {
    pub min_shells: usize,
    pub max_shells: usize,
    /// Partial sums beyond this are declared divergent.
    pub cap: f64,
    /// Relative size of the extrapolated tail at which a convergent run stops.
    pub tail_rel: f64,
}

impl Default for ShellConfig {
    fn default() -> Self {
        Self { min_shells: 10, max_shells: 1200, cap: f64::INFINITY, tail_rel: 1e-14 }
    }
}

/// Result of [`integrate_endpoint`]. `ratio` is the last ratio of
/// consecutive dyadic shell contributions, which tends to `2^(β-1)` for an
/// integrand behaving like `d^-β` at distance `d`.
#[derive(Debug, Clone, PartialEq)]
pub enum EndpointOutcome {
    Converged { value: f64, shells: usize, ratio: f64 },
    Diverged { partial: f64, shells: usize, ratio: f64 },
    Inconclusive { partial: f64, shells: usize, ratio: f64 },
}

/// Integrates `f` from `x0` to `x1` where `f` may be singular at `x0`.
///
/// The interval is cut into dyadic shells `x0 + [d/2^(k+1), d/2^k]`, each
/// integrated adaptively. The ratio of consecutive shells is used both to
/// extrapolate the remaining tail geometrically and to detect divergence.
/// `f` receives the signed offset `x - x0` alongside `x`, so callers can
/// evaluate weights without cancellation.
pub fn integrate_endpoint<F: Fn(f64, f64) -> f64>(
    f: F,
    x0: f64,
    x1: f64,
    kind: EndpointKind,
    tol: Tolerance,
    cfg: ShellConfig,
) -> Result<EndpointOutcome> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(EndpointOutcome::Converged { value: 0.0, shells: 0, ratio: 0.0 });
    }
    // Shells are integrated in the offset variable so that the distance to
    // the singular point stays exact however small it gets.
    let shell = |d_hi: f64, d_lo: f64, sum: f64| -> Result<f64> {
        let g = |d: f64| f(x0 + d, d);
        let abs = (tol.abs * (d_hi / span).abs()).max(1e-15 * sum.abs());
        match integrate(g, d_lo, d_hi, Tolerance::new(abs, tol.rel)) {
            Ok(e) => Ok(e.value),
            Err(Error::Quadrature { estimate, .. }) if !estimate.is_finite() => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let mut d = span * 0.5;
    let mut sum = shell(span, d, 0.0)?;
    let mut prev: Option<f64> = None;
    let mut ratio = f64::NAN;
    let mut prev_ratio = f64::NAN;
    let mut diverge_streak = 0usize;
    for k in 1..=cfg.max_shells {
        let dk = shell(d, d * 0.5, sum)?;
        d *= 0.5;
        if !dk.is_finite() {
            return Ok(EndpointOutcome::Diverged { partial: f64::INFINITY, shells: k, ratio: f64::INFINITY });
        }
        sum += dk;
        if let Some(p) = prev {
            prev_ratio = ratio;
            ratio = if p != 0.0 { dk / p } else if dk == 0.0 { 0.0 } else { f64::INFINITY };
        }
        prev = Some(dk);
        if sum.abs() > cfg.cap {
            return Ok(EndpointOutcome::Diverged { partial: sum, shells: k, ratio });
        }
        let stable = (ratio - prev_ratio).abs() <= 1e-3;
        if kind == EndpointKind::Improper && k >= cfg.min_shells {
            let extrapolated = 2.0 * ratio - prev_ratio;
            if ratio >= 0.99 && extrapolated >= 0.998 {
                diverge_streak += 1;
                if diverge_streak >= 4 {
                    return Ok(EndpointOutcome::Diverged { partial: sum, shells: k, ratio });
                }
            } else {
                diverge_streak = 0;
            }
        }
        let settled = k >= cfg.min_shells && ratio.is_finite() && ratio < 0.98;
        let tail = if settled { dk * ratio / (1.0 - ratio) } else { f64::INFINITY };
        if settled && (stable || kind == EndpointKind::Bounded) && tail.abs() <= cfg.tail_rel * sum.abs() {
            return Ok(EndpointOutcome::Converged { value: sum + tail, shells: k, ratio });
        }
        if d.abs() < f64::MIN_POSITIVE * 1e4 {
            // Offsets this small are subnormal; whatever remains is below
            // resolution for a bounded integrand.
            return Ok(match kind {
                EndpointKind::Bounded => EndpointOutcome::Converged { value: sum + f(x0 + d, d) * d, shells: k, ratio },
                EndpointKind::Improper if settled && stable => {
                    EndpointOutcome::Converged { value: sum + tail, shells: k, ratio }
                }
                EndpointKind::Improper => EndpointOutcome::Inconclusive { partial: sum, shells: k, ratio },
            });
        }
    }
    Ok(match kind {
        EndpointKind::Bounded => EndpointOutcome::Converged { value: sum, shells: cfg.max_shells, ratio },
        EndpointKind::Improper => EndpointOutcome::Inconclusive { partial: sum, shells: cfg.max_shells, ratio },
    })
}

/// Composite Simpson weights for `n` equal cells (`n + 1` nodes) of width `h`.
/// An odd cell count closes with the 3/8 rule on the last three cells.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "Simpson needs at least two cells");
    let mut w = vec![0.0; n + 1];
    let even = if n % 2 == 0 { n } else { n - 3 };
    for k in (0..even).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if n % 2 == 1 {
        let s = even;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}
