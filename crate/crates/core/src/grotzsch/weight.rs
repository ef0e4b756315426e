//! Positive weights `λ(x)` on `[0, ℓ]` with a cached minimum.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// `e^{4πx}`.
    Nitsche,
    Constant(f64),
    /// `1 + |x - center|^{2s}`.
    PowerWell { s: f64, center: f64 },
    Table { xs: Vec<f64>, ys: Vec<f64> },
    Custom { name: String, f: ScalarFn },
}

/// A weight that is bounded and bounded away from zero on `[0, ℓ]`.
#[derive(Clone)]
pub struct WeightFunction {
    kind: Kind,
    ell: f64,
    lambda0: f64,
    x0: f64,
    hint: Option<f64>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({}, ℓ = {}, λ₀ = {} at x₀ = {})", self.spec(), self.ell, self.lambda0, self.x0)
    }
}

const SCAN_POINTS: usize = 4096;

fn check_ell(ell: f64) -> Result<()> {
    if ell.is_finite() && ell > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("ℓ must be positive, got {ell}")))
    }
}

impl WeightFunction {
    pub fn nitsche(ell: f64) -> Result<Self> {
        check_ell(ell)?;
        Ok(Self { kind: Kind::Nitsche, ell, lambda0: 1.0, x0: 0.0, hint: Some(0.5) })
    }

    pub fn constant(ell: f64, c: f64) -> Result<Self> {
        check_ell(ell)?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput(format!("constant weight must be positive, got {c}")));
        }
        Ok(Self { kind: Kind::Constant(c), ell, lambda0: c, x0: 0.0, hint: None })
    }

    /// `1 + |x - ℓ/2|^{2s}`.
    pub fn power_well(ell: f64, s: f64) -> Result<Self> {
        check_ell(ell)?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidInput(format!("power-well exponent must be positive, got {s}")));
        }
        let center = 0.5 * ell;
        Ok(Self { kind: Kind::PowerWell { s, center }, ell, lambda0: 1.0, x0: center, hint: Some(s) })
    }

    /// Piecewise-linear interpolation of `(xs, ys)`, clamped outside the table.
    pub fn table(ell: f64, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_ell(ell)?;
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::InvalidInput("weight table needs matching, non-empty columns".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("weight table abscissae must increase strictly".into()));
        }
        if ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
            return Err(Error::InvalidInput("weight table values must be positive".into()));
        }
        let mut w = Self { kind: Kind::Table { xs, ys }, ell, lambda0: 0.0, x0: 0.0, hint: None };
        // A piecewise-linear minimum sits at a knot or an endpoint.
        let mut cands = vec![0.0, ell];
        if let Kind::Table { xs, .. } = &w.kind {
            cands.extend(xs.iter().copied().filter(|x| (0.0..=ell).contains(x)));
        }
        let (x0, l0) = cands
            .into_iter()
            .map(|x| (x, w.value(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
            .unwrap();
        w.x0 = x0;
        w.lambda0 = l0;
        w.hint = Some(0.5);
        Ok(w)
    }

    /// Arbitrary weight; the minimum is located by a scan and refined by golden
    /// section search.
    pub fn custom<F>(name: &str, ell: f64, f: F, hint: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_ell(ell)?;
        let f: ScalarFn = Arc::new(f);
        let mut best = (0.0, f(0.0));
        for k in 0..=SCAN_POINTS {
            let x = ell * k as f64 / SCAN_POINTS as f64;
            let v = f(x);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("weight `{name}` is not positive at x = {x}")));
            }
            if v < best.1 {
                best = (x, v);
            }
        }
        let h = ell / SCAN_POINTS as f64;
        let (x0, lambda0) = golden_min(&*f, (best.0 - h).max(0.0), (best.0 + h).min(ell), best);
        Ok(Self { kind: Kind::Custom { name: name.into(), f }, ell, lambda0, x0, hint })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// `min λ` on `[0, ℓ]`.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// A minimizer of `λ`.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Exponent `s` with `λ(x) ≈ λ₀ + C|x - x₀|^{2s}`, when known.
    pub fn regularity_hint(&self) -> Option<f64> {
        self.hint
    }

    pub fn with_hint(mut self, s: Option<f64>) -> Self {
        self.hint = s;
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Nitsche => (4.0 * PI * x).exp(),
            Kind::Constant(c) => *c,
            Kind::PowerWell { s, center } => 1.0 + (x - center).abs().powf(2.0 * s),
            Kind::Table { xs, ys } => interpolate(xs, ys, x),
            Kind::Custom { f, .. } => f(x),
        }
    }

    /// `λ(x) - λ₀`, given the offset `d = x - x₀`, accurate for small `d`.
    pub fn excess(&self, x: f64, d: f64) -> f64 {
        match &self.kind {
            Kind::Nitsche => self.lambda0 * (4.0 * PI * d).exp_m1(),
            Kind::Constant(_) => 0.0,
            Kind::PowerWell { s, .. } => d.abs().powf(2.0 * s),
            _ => (self.value(x) - self.lambda0).max(0.0),
        }
    }

    /// The string accepted by [`WeightSpec`], when the weight came from one.
    pub fn spec(&self) -> String {
        match &self.kind {
            Kind::Nitsche => "nitsche".into(),
            Kind::Constant(c) => format!("constant:{c}"),
            Kind::PowerWell { s, .. } => format!("power-well:{s}"),
            Kind::Table { xs, .. } => format!("table[{} rows]", xs.len()),
            Kind::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    /// `∫_0^ℓ λ`.
    pub fn integral(&self) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Nitsche => (4.0 * PI * self.ell).exp_m1() / (4.0 * PI),
            Kind::Constant(c) => c * self.ell,
            _ => crate::quadrature::integrate(|x| self.value(x), 0.0, self.ell, Default::default())?.value,
        })
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + w * (ys[k + 1] - ys[k])
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, start: (f64, f64)) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = start;
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let (fc, fd) = (f(c), f(d));
        if fc < best.1 {
            best = (c, fc);
        }
        if fd < best.1 {
            best = (d, fd);
        }
        if fc < fd {
            b = d;
        } else {
            a = c;
        }
    }
    best
}

/// Weight grammar: `nitsche`, `constant[:c]`, `power-well:s`, or
/// `table:path` / a bare path to a two-column `x,λ` CSV file.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Nitsche,
    Constant(f64),
    PowerWell(f64),
    Table(PathBuf),
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("weight parameter `{p}`: {e}")));
        match s.split_once(':') {
            None if s == "nitsche" => Ok(Self::Nitsche),
            None if s == "constant" => Ok(Self::Constant(1.0)),
            Some(("constant", p)) => Ok(Self::Constant(num(p)?)),
            Some(("power-well", p)) => Ok(Self::PowerWell(num(p)?)),
            Some(("table", p)) => Ok(Self::Table(PathBuf::from(p.trim()))),
            _ if Path::new(s).is_file() => Ok(Self::Table(PathBuf::from(s))),
            _ => Err(Error::Parse(format!("unknown weight `{s}`"))),
        }
    }
}

impl WeightSpec {
    pub fn build(&self, ell: f64) -> Result<WeightFunction> {
        match self {
            Self::Nitsche => WeightFunction::nitsche(ell),
            Self::Constant(c) => WeightFunction::constant(ell, *c),
            Self::PowerWell(s) => WeightFunction::power_well(ell, *s),
            Self::Table(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
                let (xs, ys) = parse_table(&text)?;
                WeightFunction::table(ell, xs, ys)
            }
        }
    }
}

/// Two comma-separated columns; blank lines and `#` comments are skipped, as
/// is a non-numeric header row.
pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(Error::Parse(format!("line {}: expected `x,λ`", n + 1)));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if xs.is_empty() => continue,
            _ => return Err(Error::Parse(format!("line {}: not numeric", n + 1))),
        }
    }
    Ok((xs, ys))
}
