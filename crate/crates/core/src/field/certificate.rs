//! Perturbative minimality checks.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::energy::{dirichlet_energy, phi_distortion_energy_with, DistortionNorm};
use super::grid::GridMap;
use super::perturb::{perturb_map, DEFAULT_AMPLITUDE};
use crate::error::{Error, Result};
use crate::grotzsch::DistortionGauge;

pub type Weight = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Functional {
    Dirichlet,
    PhiDistortion { gauge: DistortionGauge, weight: Weight, norm: DistortionNorm },
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Functional {
    pub fn name(&self) -> String {
        match self {
            Functional::Dirichlet => "dirichlet".into(),
            Functional::PhiDistortion { gauge, .. } => format!("phi-distortion({})", gauge.spec()),
        }
    }

    pub fn evaluate(&self, m: &GridMap) -> Result<f64> {
        match self {
            Functional::Dirichlet => dirichlet_energy(m),
            Functional::PhiDistortion { gauge, weight, norm } => {
                phi_distortion_energy_with(m, gauge, |a, b| weight(a, b), *norm).map(|e| e.value)
            }
        }
    }
}

/// Richardson estimate of the quadrature error of `functional` on `m`:
/// with second-order convergence, `|E_n - E_{n/2}| / 3`, plus a rounding
/// floor.
pub fn discretization_budget(m: &GridMap, functional: &Functional) -> Result<f64> {
    let coarse = m
        .subsample(2)
        .ok_or_else(|| Error::GridTooSmall("error budget needs even grid sizes".into()))??;
    let fine = functional.evaluate(m)?;
    let half = functional.evaluate(&coarse)?;
    Ok((fine - half).abs() / 3.0 + 1e-12 * fine.abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub seed: u64,
    /// `None` when the perturbation was rejected.
    pub energy: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompetitorOutcome {
    pub name: String,
    pub energy: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub functional: String,
    pub candidate_energy: f64,
    pub budget: f64,
    pub trials: Vec<TrialOutcome>,
    pub rejected: usize,
    pub min_gap: f64,
    pub median_gap: f64,
    pub worst_seed: Option<u64>,
    pub competitors: Vec<CompetitorOutcome>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CertificateOptions {
    pub amplitude: f64,
    /// Extra maps that must not beat the candidate either.
    pub competitors: Vec<(String, GridMap)>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { amplitude: DEFAULT_AMPLITUDE, competitors: Vec::new() }
    }
}

pub fn minimality_certificate(
    candidate: &GridMap,
    functional: &Functional,
    trials: usize,
    seed: u64,
) -> Result<CertificateReport> {
    minimality_certificate_with(candidate, functional, trials, seed, &CertificateOptions::default())
}

/// Compares `candidate` against `trials` perturbations seeded
/// `seed, seed + 1, …` and the listed competitors. Fails if any of them is
/// lower by more than the discretisation budget.
pub fn minimality_certificate_with(
    candidate: &GridMap,
    functional: &Functional,
    trials: usize,
    seed: u64,
    opts: &CertificateOptions,
) -> Result<CertificateReport> {
    if !candidate.admissibility().is_admissible() {
        return Err(Error::InvalidInput(format!(
            "candidate is not admissible: {}",
            candidate.admissibility().label()
        )));
    }
    let e0 = functional.evaluate(candidate)?;
    let budget = discretization_budget(candidate, functional)?;
    let mut outcomes = Vec::with_capacity(trials);
    let mut gaps = Vec::with_capacity(trials);
    let mut rejected = 0;
    for k in 0..trials as u64 {
        let s = seed.wrapping_add(k);
        match perturb_map(candidate, opts.amplitude, s) {
            Ok(p) => {
                let e = functional.evaluate(&p)?;
                gaps.push((e - e0, s));
                outcomes.push(TrialOutcome { seed: s, energy: Some(e), gap: Some(e - e0) });
            }
            Err(Error::RejectedPerturbation { .. }) => {
                rejected += 1;
                outcomes.push(TrialOutcome { seed: s, energy: None, gap: None });
            }
            Err(e) => return Err(e),
        }
    }
    let mut competitors = Vec::new();
    for (name, m) in &opts.competitors {
        let e = functional.evaluate(m)?;
        competitors.push(CompetitorOutcome { name: name.clone(), energy: e, gap: e - e0 });
    }
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min_gap = gaps.first().map_or(f64::NAN, |g| g.0);
    let median_gap = if gaps.is_empty() {
        f64::NAN
    } else if gaps.len() % 2 == 1 {
        gaps[gaps.len() / 2].0
    } else {
        0.5 * (gaps[gaps.len() / 2 - 1].0 + gaps[gaps.len() / 2].0)
    };
    let passed = gaps.iter().all(|g| g.0 >= -budget) && competitors.iter().all(|c| c.gap >= -budget);
    Ok(CertificateReport {
        functional: functional.name(),
        candidate_energy: e0,
        budget,
        trials: outcomes,
        rejected,
        min_gap,
        median_gap,
        worst_seed: gaps.first().map(|g| g.1),
        competitors,
        passed,
    })
}
