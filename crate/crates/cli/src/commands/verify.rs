use extremal_core::field::io::read_grid;
use extremal_core::field::{
    free_lagrangian, minimality_certificate_with, perturb_map, CertificateOptions, FreeLagrangianKind,
    FreeLagrangianSpec, Functional, GridMap, PolarGridMap, RectGridMap, DEFAULT_AMPLITUDE,
};
use extremal_core::grotzsch::{minimality_gap_bound, sample_shear, solve_boundary, GrotzschProblem, Verdict};
use extremal_core::radial::{power_stretch_extremal, radial_minimizer};
use serde_json::{json, Value};

use crate::config::{ConfigError, Params};
use crate::exit;
use crate::output::write_json;

/// Relative tolerance on `F₃ = log(R*/r*)`, `F₄ = log(R/r)` (normalized by 2π).
pub const FREE_LAGRANGIAN_TOL: f64 = 1e-4;
/// Number of perturbed maps in the free-Lagrangian suite, at most.
pub const FREE_LAGRANGIAN_TRIALS: usize = 20;

enum Candidate {
    Polar(PolarGridMap),
    Rect(RectGridMap, GrotzschProblem),
}

fn candidate(p: &Params) -> anyhow::Result<(String, Candidate)> {
    let name = p.raw("candidate").unwrap_or("radial").to_string();
    let (n_a, n_b) = p.grid(128)?;
    let c = match name.as_str() {
        "radial" | "power-stretch" => {
            let (dom, tgt) = (p.annulus("dom")?, p.annulus("tgt")?);
            let profile =
                if name == "radial" { radial_minimizer(&dom, &tgt)? } else { power_stretch_extremal(&dom, &tgt).profile };
            Candidate::Polar(PolarGridMap::sample_radial(&profile, n_a, n_b)?)
        }
        "grotzsch" => {
            let problem = super::grotzsch::problem(p)?;
            let s = solved(&problem)?;
            Candidate::Rect(sample_shear(&s, n_a, n_b)?, problem)
        }
        other => {
            let Some(path) = other.strip_prefix("file:") else {
                return Err(ConfigError(format!("unknown candidate `{other}`")).into());
            };
            let text = std::fs::read_to_string(path)?;
            match read_grid(&text)? {
                GridMap::Polar(m) => Candidate::Polar(m),
                GridMap::Rect(m) => {
                    let ell = m.q1().length();
                    let weight = p.weight_spec()?.build(ell)?;
                    let problem = GrotzschProblem::new(ell, m.q2().length(), p.gauge()?, weight)?;
                    Candidate::Rect(m, problem)
                }
            }
        }
    };
    Ok((name, c))
}

fn solved(problem: &GrotzschProblem) -> anyhow::Result<extremal_core::grotzsch::GrotzschSolution> {
    let s = solve_boundary(problem)?;
    if let Some(Verdict::NitschePhenomenon { critical_length }) = s.verdict {
        return Err(ConfigError(format!(
            "no minimizer to verify against: L = {} exceeds the critical length {critical_length}",
            problem.big_l
        ))
        .into());
    }
    Ok(s)
}

fn polar_suite(m: PolarGridMap, trials: usize, seed: u64) -> anyhow::Result<Vec<(bool, Value, Option<u64>)>> {
    let mut tests = Vec::new();
    let dom = *m.dom();
    let tgt = *m.tgt();
    let reference = PolarGridMap::sample_radial(&radial_minimizer(&dom, &tgt)?, m.n_t(), m.n_theta())?;
    let cand: GridMap = m.into();
    let opts = CertificateOptions { amplitude: DEFAULT_AMPLITUDE, competitors: vec![("radial-minimizer".into(), reference.into())] };
    let rep = minimality_certificate_with(&cand, &Functional::Dirichlet, trials, seed, &opts)?;
    let mut value = serde_json::to_value(&rep)?;
    value.as_object_mut().unwrap().insert("name".into(), "dirichlet-certificate".into());
    tests.push((rep.passed, value, if rep.passed { None } else { rep.worst_seed }));

    let mut maps = vec![(None, cand.clone())];
    for k in 0..trials.min(FREE_LAGRANGIAN_TRIALS) as u64 {
        maps.push((Some(seed + k), perturb_map(&cand, DEFAULT_AMPLITUDE, seed + k)?));
    }
    for kind in [FreeLagrangianKind::F3, FreeLagrangianKind::F4] {
        let spec = FreeLagrangianSpec::canonical(kind);
        let mut worst = (0.0f64, None);
        let mut rows = Vec::new();
        for (s, map) in &maps {
            let v = free_lagrangian(map.as_polar().expect("polar suite"), &spec)?;
            let err = v.relative_error();
            if err > worst.0 {
                worst = (err, *s);
            }
            rows.push(json!({ "seed": s, "value": v.value, "predicted": v.predicted, "relative_error": err }));
        }
        let passed = worst.0 <= FREE_LAGRANGIAN_TOL;
        let value = json!({
            "name": format!("free-lagrangian-{kind:?}"),
            "tolerance": FREE_LAGRANGIAN_TOL,
            "max_relative_error": worst.0,
            "maps": rows,
            "passed": passed,
        });
        tests.push((passed, value, if passed { None } else { worst.1 }));
    }
    Ok(tests)
}

fn rect_suite(
    m: RectGridMap,
    problem: &GrotzschProblem,
    trials: usize,
    seed: u64,
) -> anyhow::Result<Vec<(bool, Value, Option<u64>)>> {
    let s = solved(problem)?;
    let cand: GridMap = m.into();
    let mut rows = Vec::new();
    let mut failing = None;
    let mut min_gap = f64::INFINITY;
    let base = minimality_gap_bound(cand.as_rect().unwrap(), &s)?;
    let mut passed = base.passed;
    rows.push(json!({ "seed": null, "report": base }));
    for k in 0..trials as u64 {
        let q = perturb_map(&cand, DEFAULT_AMPLITUDE, seed + k)?;
        let r = minimality_gap_bound(q.as_rect().unwrap(), &s)?;
        min_gap = min_gap.min(r.gap);
        if !r.passed && failing.is_none() {
            failing = Some(seed + k);
        }
        passed &= r.passed;
        rows.push(json!({ "seed": seed + k, "report": r }));
    }
    let value = json!({ "name": "gap-bound", "alpha": s.alpha, "min_gap": min_gap, "trials": rows, "passed": passed });
    Ok(vec![(passed, value, failing)])
}

pub fn run(p: &Params) -> anyhow::Result<u8> {
    let trials = p.trials(100)?;
    let seed = p.seed(7)?;
    let out = p.out_dir()?;
    let (name, cand) = candidate(p)?;
    let tests = match cand {
        Candidate::Polar(m) => polar_suite(m, trials, seed)?,
        Candidate::Rect(m, problem) => rect_suite(m, &problem, trials, seed)?,
    };
    let passed = tests.iter().all(|t| t.0);
    let failing_seed = tests.iter().find_map(|t| t.2);
    for (ok, v, _) in &tests {
        println!("{} {}", if *ok { "PASS" } else { "FAIL" }, v["name"].as_str().unwrap_or("?"));
    }
    let record = json!({
        "candidate": name,
        "trials": trials,
        "seed": seed,
        "passed": passed,
        "failing_seed": failing_seed,
        "tests": tests.into_iter().map(|t| t.1).collect::<Vec<_>>(),
    });
    let path = write_json(&out, "verify.json", "verify", record)?;
    println!("report -> {}", path.display());
    Ok(if passed { exit::OK } else { exit::CERTIFICATE_FAILED })
}
