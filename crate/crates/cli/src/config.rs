//! Flag and config-file parameters.
//!
//! A config file holds `key = value` lines with the flag names as keys
//! (`dom = 1,2`, `gauge = shifted-power:2`); `#` starts a comment. Flags
//! given on the command line override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use extremal_core::annulus::Annulus;
use extremal_core::grotzsch::{DistortionGauge, WeightSpec};

/// A parameter that fails validation; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Source annulus `r,R`.
    #[arg(long)]
    pub dom: Option<String>,
    /// Target annulus `r,R`.
    #[arg(long)]
    pub tgt: Option<String>,
    /// Source rectangle length.
    #[arg(long)]
    pub ell: Option<String>,
    /// Target rectangle length.
    #[arg(long = "L")]
    pub big_l: Option<String>,
    /// Distortion gauge `family[:param]`.
    #[arg(long)]
    pub gauge: Option<String>,
    /// Weight: `nitsche`, `constant[:c]`, `power-well:s` or a table file.
    #[arg(long)]
    pub weight: Option<String>,
    /// Grid size `n_t,n_theta` (or `n_x,n_y`).
    #[arg(long)]
    pub grid: Option<String>,
    /// Number of perturbation trials.
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "dom",
    "tgt",
    "ell",
    "L",
    "gauge",
    "weight",
    "grid",
    "trials",
    "seed",
    "out",
    "emit-grid",
    "emit-degenerate",
    "family",
    "params",
    "ratios",
    "candidate",
];

/// Merged parameters; command-line values win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

pub fn parse_config(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(bad(format!("config line {}: expected `key = value`", n + 1)));
        };
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(bad(format!("config line {}: unknown key `{k}`", n + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl Params {
    pub fn load(args: &CommonArgs) -> anyhow::Result<Self> {
        let mut p = Params { values: BTreeMap::new(), base: PathBuf::from(".") };
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| bad(format!("reading config {}: {e}", path.display())))?;
            p.values = parse_config(&text)?;
            p.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        }
        let flags = [
            ("dom", &args.dom),
            ("tgt", &args.tgt),
            ("ell", &args.ell),
            ("L", &args.big_l),
            ("gauge", &args.gauge),
            ("weight", &args.weight),
            ("grid", &args.grid),
            ("trials", &args.trials),
            ("seed", &args.seed),
        ];
        for (k, v) in flags {
            p.set_opt(k, v.clone());
        }
        if let Some(out) = &args.out {
            p.values.insert("out".into(), out.display().to_string());
        }
        Ok(p)
    }

    pub fn set_opt(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.into(), v);
        }
    }

    pub fn set_flag(&mut self, key: &str, on: bool) {
        if on {
            self.values.insert(key.into(), "true".into());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| bad(format!("--{key} `{v}`: {e}"))))
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> anyhow::Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| bad(format!("missing --{key}")))
    }

    pub fn flag(&self, key: &str) -> anyhow::Result<bool> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }

    pub fn annulus(&self, key: &str) -> anyhow::Result<Annulus> {
        let v = self.raw(key).ok_or_else(|| bad(format!("missing --{key} r,R")))?;
        let xs = parse_list(v).map_err(|e| bad(format!("--{key}: {e}")))?;
        let [r, big_r] = xs[..] else {
            return Err(bad(format!("--{key} needs two radii `r,R`, got `{v}`")));
        };
        Annulus::new(r, big_r).map_err(|e| bad(format!("--{key}: {e}")))
    }

    pub fn positive(&self, key: &str) -> anyhow::Result<f64> {
        let x: f64 = self.require(key)?;
        if !(x.is_finite() && x > 0.0) {
            return Err(bad(format!("--{key} must be positive and finite, got {x}")));
        }
        Ok(x)
    }

    pub fn gauge(&self) -> anyhow::Result<DistortionGauge> {
        let v = self.raw("gauge").unwrap_or("identity");
        DistortionGauge::from_str(v).map_err(|e| bad(format!("--gauge: {e}")))
    }

    pub fn weight_spec(&self) -> anyhow::Result<WeightSpec> {
        let v = self.raw("weight").unwrap_or("nitsche");
        let spec = WeightSpec::from_str(v).map_err(|e| bad(format!("--weight: {e}")))?;
        // Table paths in a config file are relative to the file.
        Ok(match spec {
            WeightSpec::Table(path) if path.is_relative() && !path.is_file() => WeightSpec::Table(self.base.join(path)),
            other => other,
        })
    }

    /// `--grid`, defaulting to `n x n`; each side at least 8.
    pub fn grid(&self, default: usize) -> anyhow::Result<(usize, usize)> {
        let Some(v) = self.raw("grid") else {
            return Ok((default, default));
        };
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        let parse = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("--grid `{v}`: {e}")));
        let (a, b) = match parts[..] {
            [n] => (parse(n)?, parse(n)?),
            [a, b] => (parse(a)?, parse(b)?),
            _ => return Err(bad(format!("--grid needs `n_t,n_theta`, got `{v}`"))),
        };
        if a < 8 || b < 8 {
            return Err(bad(format!("--grid sides must be at least 8, got {a},{b}")));
        }
        Ok((a, b))
    }

    pub fn trials(&self, default: usize) -> anyhow::Result<usize> {
        Ok(self.get("trials")?.unwrap_or(default))
    }

    pub fn seed(&self, default: u64) -> anyhow::Result<u64> {
        Ok(self.get("seed")?.unwrap_or(default))
    }

    pub fn out_dir(&self) -> anyhow::Result<PathBuf> {
        let dir = PathBuf::from(self.raw("out").unwrap_or("."));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

pub fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", s.trim())))
        .collect()
}

/// `j=1..32` (doubling from the start), `1..32`, or an explicit list `1,2,4`.
pub fn parse_indices(v: &str) -> anyhow::Result<Vec<u32>> {
    let v = v.trim();
    let body = v.strip_prefix("j=").unwrap_or(v).trim();
    let js: Vec<u32> = if let Some((a, b)) = body.split_once("..") {
        let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| bad(format!("--emit-degenerate `{v}`: {e}")));
        let (mut j, end) = (parse(a)?, parse(b)?);
        if j == 0 || end < j {
            return Err(bad(format!("--emit-degenerate needs 1 ≤ start ≤ end, got `{v}`")));
        }
        let mut out = Vec::new();
        while j <= end {
            out.push(j);
            j = j.saturating_mul(2);
        }
        out
    } else {
        body.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|e| bad(format!("--emit-degenerate `{v}`: {e}"))))
            .collect::<anyhow::Result<_>>()?
    };
    if js.is_empty() || js.contains(&0) || js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad(format!("--emit-degenerate needs increasing positive indices, got `{v}`")));
    }
    Ok(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# run\ndom = 1,2\n\ntgt=1,3 # inline\n").unwrap();
        assert_eq!(m["dom"], "1,2");
        assert_eq!(m["tgt"], "1,3");
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("dom 1,2").is_err());
    }

    #[test]
    fn index_ranges() {
        assert_eq!(parse_indices("j=1..32").unwrap(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(parse_indices("3,5").unwrap(), vec![3, 5]);
        assert!(parse_indices("4,2").is_err());
        assert!(parse_indices("j=0..4").is_err());
    }
}
