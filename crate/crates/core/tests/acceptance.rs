//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use extremal_core::annulus::Annulus;
use extremal_core::field::{
    dirichlet_energy, discretization_budget, distortion_at, free_lagrangian, minimality_certificate, perturb_map,
    DistortionNorm, FreeLagrangianKind, FreeLagrangianSpec, Functional, GridMap, NodeClass, PolarGridMap,
    DEFAULT_AMPLITUDE,
};
use extremal_core::grotzsch::{
    classify_phenomenon, critical_length, degenerate_sequence, solve_boundary, DistortionGauge, GrotzschProblem,
    Phenomenon, WeightFunction,
};
use extremal_core::radial::{harmonic_radial, power_stretch_extremal, radial_dirichlet_energy, radial_minimizer};
use extremal_core::transform::{dictionary_energies, lift_map, project_map};
use num_complex::Complex64;

const COSH_TOL: f64 = 1e-8;
const ALPHA_TOL: f64 = 1e-10;
const PROFILE_TOL: f64 = 1e-10;
const GRID: usize = 256;
const CERT_TRIALS: usize = 100;
const CERT_SEED: u64 = 7;
const FREE_LAGRANGIAN_TOL: f64 = 1e-4;
const FREE_LAGRANGIAN_TRIALS: u64 = 20;
const CONFORMAL_TRIALS: u64 = 20;
const DEGENERATE_FRACTION: f64 = 0.05;
const DISTORTION_TOL: f64 = 1e-8;
const TRANSFORM_POINTWISE_TOL: f64 = 1e-8;
const TRANSFORM_ENERGY_TOL: f64 = 1e-4;
const MIN_ORDER: f64 = 1.8;

type Outcome = Result<(bool, String), String>;

fn annulus(r: f64, big_r: f64) -> Annulus {
    Annulus::new(r, big_r).expect("valid annulus")
}

fn regime_pairs() -> [(Annulus, Annulus); 3] {
    [
        (annulus(1.0, 2.0), annulus(1.0, 3.0)),
        (annulus(1.0, 3.0), annulus(1.0, 2.0)),
        (annulus(1.0, 4.0), annulus(1.0, 1.25)),
    ]
}

fn nitsche_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    for ell in [0.1, 0.25, 0.5] {
        let w = WeightFunction::nitsche(ell).map_err(|e| e.to_string())?;
        let p = GrotzschProblem::new(ell, ell, DistortionGauge::identity(), w).map_err(|e| e.to_string())?;
        let l0 = critical_length(&p).map_err(|e| e.to_string())?.value;
        let target = (2.0 * PI * ell).exp();
        worst = worst.max(((2.0 * PI * l0).cosh() - target).abs() / target);
    }
    Ok((worst <= COSH_TOL, format!("max |cosh(2πL₀) - e^(2πℓ)| / e^(2πℓ) = {worst:.2e} (tol {COSH_TOL:.0e})")))
}

fn phenomenon_table() -> Outcome {
    let expected: [(&str, bool); 6] = [
        ("linear-log", false),
        ("shifted-power:0.5", false),
        ("shifted-power:1.5", true),
        ("shifted-power:2", true),
        ("shifted-power:3", true),
        ("power:2", false),
    ];
    let w = WeightFunction::nitsche(1.0).map_err(|e| e.to_string())?;
    let mut wrong = Vec::new();
    for (spec, phenomenon) in expected {
        let g: DistortionGauge = spec.parse().map_err(|e: extremal_core::Error| e.to_string())?;
        let rec = classify_phenomenon(&g, &w, 1.0).map_err(|e| e.to_string())?;
        let got = matches!(rec.verdict, Phenomenon::NitschePhenomenon { .. });
        if got != phenomenon {
            wrong.push(spec);
        }
    }
    Ok((wrong.is_empty(), format!("{} of 6 gauges misclassified {wrong:?}", wrong.len())))
}

fn closed_form_grotzsch() -> Outcome {
    let w = WeightFunction::constant(1.0, 1.0).map_err(|e| e.to_string())?;
    let p = GrotzschProblem::new(1.0, 2.0, DistortionGauge::identity(), w).map_err(|e| e.to_string())?;
    let s = solve_boundary(&p).map_err(|e| e.to_string())?;
    let dev = s.samples.iter().map(|q| (q.u - 2.0 * q.x).abs()).fold(0.0, f64::max);
    let da = (s.alpha - 0.75).abs();
    Ok((
        da <= ALPHA_TOL && dev <= PROFILE_TOL,
        format!("|α - 3/4| = {da:.2e}, max |u - 2x| = {dev:.2e} (tol {ALPHA_TOL:.0e})"),
    ))
}

fn radial_certificate() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (dom, tgt) in regime_pairs() {
        let p = radial_minimizer(&dom, &tgt).map_err(|e| e.to_string())?;
        let m: GridMap = PolarGridMap::sample_radial(&p, GRID, GRID).map_err(|e| e.to_string())?.into();
        let rep = minimality_certificate(&m, &Functional::Dirichlet, CERT_TRIALS, CERT_SEED).map_err(|e| e.to_string())?;
        ok &= rep.passed && rep.rejected == 0;
        parts.push(format!(
            "{}: min gap {:.2e} vs budget {:.1e}{}",
            p.regime().name(),
            rep.min_gap,
            rep.budget,
            if rep.rejected > 0 { format!(", {} rejected", rep.rejected) } else { String::new() }
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn free_lagrangian_invariance() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut maps = 0;
    for (dom, tgt) in regime_pairs() {
        let p = radial_minimizer(&dom, &tgt).map_err(|e| e.to_string())?;
        let m: GridMap = PolarGridMap::sample_radial(&p, GRID, GRID).map_err(|e| e.to_string())?.into();
        let mut candidates = vec![m.clone()];
        for s in 0..FREE_LAGRANGIAN_TRIALS {
            candidates.push(perturb_map(&m, DEFAULT_AMPLITUDE, 100 + s).map_err(|e| e.to_string())?);
        }
        for c in &candidates {
            let polar = c.as_polar().expect("polar map");
            for (which, exact) in [(FreeLagrangianKind::F3, tgt.modulus()), (FreeLagrangianKind::F4, dom.modulus())] {
                let v = free_lagrangian(polar, &FreeLagrangianSpec::canonical(which)).map_err(|e| e.to_string())?;
                worst = worst.max((v.normalized().0 - exact).abs() / exact);
            }
            maps += 1;
        }
    }
    Ok((worst <= FREE_LAGRANGIAN_TOL, format!("{maps} maps, max relative error {worst:.2e} (tol {FREE_LAGRANGIAN_TOL:.0e})")))
}

fn conformal_lower_bound() -> Outcome {
    let mut ok = true;
    let mut worst_similarity: f64 = 0.0;
    let mut min_excess = f64::INFINITY;
    let mut tested = 0;
    for (dom, tgt) in [(annulus(1.0, 2.0), annulus(1.0, 2.0)), (annulus(1.0, 2.0), annulus(3.0, 6.0))] {
        let k = tgt.r_inner() / dom.r_inner();
        let bound = 2.0 * tgt.area();
        let sim = |beta: f64| {
            PolarGridMap::sample_fn(dom, tgt, GRID, GRID, move |t, th| Complex64::from_polar(k * t, th + beta))
        };
        let span = dom.modulus();
        let twist = PolarGridMap::sample_fn(dom, tgt, GRID, GRID, move |t, th| {
            Complex64::from_polar(k * t, th + 0.3 * (PI * (t / dom.r_inner()).ln() / span).sin())
        });
        let mut others: Vec<GridMap> = vec![twist.map_err(|e| e.to_string())?.into()];
        let base: GridMap = sim(0.0).map_err(|e| e.to_string())?.into();
        for s in 0..CONFORMAL_TRIALS {
            others.push(perturb_map(&base, DEFAULT_AMPLITUDE, 200 + s).map_err(|e| e.to_string())?);
        }
        for beta in [0.0, 0.7] {
            let m: GridMap = sim(beta).map_err(|e| e.to_string())?.into();
            let e = dirichlet_energy(&m).map_err(|e| e.to_string())?;
            let b = discretization_budget(&m, &Functional::Dirichlet).map_err(|e| e.to_string())?;
            worst_similarity = worst_similarity.max((e - bound).abs() / b);
            ok &= (e - bound).abs() <= b;
            tested += 1;
        }
        for m in &others {
            let e = dirichlet_energy(m).map_err(|e| e.to_string())?;
            let b = discretization_budget(m, &Functional::Dirichlet).map_err(|e| e.to_string())?;
            min_excess = min_excess.min((e - bound) / b);
            ok &= e - bound > b;
            tested += 1;
        }
    }
    Ok((
        ok,
        format!(
            "{tested} maps; similarities |E - 2|𝔸*|| ≤ {worst_similarity:.2} budgets, others exceed 2|𝔸*| by ≥ {min_excess:.1} budgets"
        ),
    ))
}

fn degenerate_sequence_criterion() -> Outcome {
    let ell = 0.25;
    let w = WeightFunction::nitsche(ell).map_err(|e| e.to_string())?;
    let base = GrotzschProblem::new(ell, ell, DistortionGauge::identity(), w).map_err(|e| e.to_string())?;
    let l0 = critical_length(&base).map_err(|e| e.to_string())?.value;
    let p = base.with_length(1.5 * l0).map_err(|e| e.to_string())?;
    let seq = degenerate_sequence(&p, &[1, 2, 4, 8, 16, 32]).map_err(|e| e.to_string())?;
    let e: Vec<f64> = seq.members.iter().map(|m| m.energy).collect();
    let decreasing = e.windows(2).all(|w| w[1] < w[0]);
    let bound = seq.critical_energy;
    let ratio = (e[5] - bound).abs() / (e[0] - bound);
    let corrected = (e[5] - seq.limit_energy).abs() / (e[0] - seq.limit_energy);
    Ok((
        decreasing && ratio <= DEGENERATE_FRACTION,
        format!(
            "decreasing={decreasing}; |E(f^32) - ∫φ(𝕂(f₀))λ| = {ratio:.3} of the j=1 gap (tol {DEGENERATE_FRACTION}); \
             against ∫φ(𝕂(f₀))λ + α_max(L-L₀) = {:.6} the ratio is {corrected:.4}",
            seq.limit_energy
        ),
    ))
}

fn svd_distortion(a: [[f64; 2]; 2]) -> f64 {
    let m = nalgebra::Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
    let sv = m.singular_values();
    let k = sv.max() / sv.min();
    0.5 * (k + 1.0 / k)
}

fn distortion_identity() -> Outcome {
    let mut maps: Vec<GridMap> = Vec::new();
    for (dom, tgt) in regime_pairs() {
        let p = radial_minimizer(&dom, &tgt).map_err(|e| e.to_string())?;
        let m: GridMap = PolarGridMap::sample_radial(&p, GRID, GRID).map_err(|e| e.to_string())?.into();
        maps.push(perturb_map(&m, DEFAULT_AMPLITUDE, 300).map_err(|e| e.to_string())?);
        maps.push(m);
    }
    let mut worst: f64 = 0.0;
    let mut cells = 0usize;
    for m in &maps {
        let (rows, cols) = m.shape();
        for i in 0..rows {
            for j in 0..cols {
                if m.class(i, j) != NodeClass::Regular {
                    continue;
                }
                let k = distortion_at(m, i, j).map_err(|e| e.to_string())?;
                worst = worst.max((k / svd_distortion(m.derivative_matrix(i, j)) - 1.0).abs());
                cells += 1;
            }
        }
    }
    let dom = annulus(1.0, 2.0);
    let ps = power_stretch_extremal(&dom, &annulus(1.0, 4.0));
    let m: GridMap = PolarGridMap::sample_radial(&ps.profile, GRID, GRID).map_err(|e| e.to_string())?.into();
    let (rows, cols) = m.shape();
    let mut ps_worst: f64 = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            ps_worst = ps_worst.max((distortion_at(&m, i, j).map_err(|e| e.to_string())? - 1.25).abs());
        }
    }
    Ok((
        worst <= DISTORTION_TOL && ps_worst <= DISTORTION_TOL,
        format!("{cells} cells, max rel. deviation from ½(K+1/K) {worst:.2e}; power stretch |𝕂 - 1.25| ≤ {ps_worst:.2e} (tol {DISTORTION_TOL:.0e})"),
    ))
}

fn transform_consistency() -> Outcome {
    let dom = annulus(1.0, 2.0);
    let tgt = annulus(1.0, 3.0);
    let p = harmonic_radial(&dom, &tgt).map_err(|e| e.to_string())?;
    let base: GridMap = PolarGridMap::sample_radial(&p, GRID, GRID).map_err(|e| e.to_string())?.into();
    let mut pointwise: f64 = 0.0;
    let mut energy: f64 = 0.0;
    let gauges = [DistortionGauge::identity(), DistortionGauge::shifted_power(2.0).map_err(|e| e.to_string())?];
    let lambda: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|x: f64| (4.0 * PI * x).exp());
    for s in 0..5u64 {
        let m = if s == 0 { base.clone() } else { perturb_map(&base, DEFAULT_AMPLITUDE, 400 + s).map_err(|e| e.to_string())? };
        let polar = m.as_polar().expect("polar map");
        let lifted: GridMap = lift_map(polar).map_err(|e| e.to_string())?.into();
        let back: GridMap = project_map(lifted.as_rect().expect("rect map"), 1.0, 1.0).map_err(|e| e.to_string())?.into();
        let (rows, cols) = m.shape();
        for i in 0..rows {
            for j in 0..cols {
                if m.class(i, j) != NodeClass::Regular {
                    continue;
                }
                let k = distortion_at(&m, i, j).map_err(|e| e.to_string())?;
                let kl = distortion_at(&lifted, i, j).map_err(|e| e.to_string())?;
                let kb = distortion_at(&back, i, j).map_err(|e| e.to_string())?;
                pointwise = pointwise.max((kl / k - 1.0).abs()).max((kb / k - 1.0).abs());
            }
        }
        for g in &gauges {
            let (a, q) = dictionary_energies(polar, g, lambda.clone(), DistortionNorm::Mean).map_err(|e| e.to_string())?;
            energy = energy.max((a - q).abs() / a.abs());
        }
    }
    Ok((
        pointwise <= TRANSFORM_POINTWISE_TOL && energy <= TRANSFORM_ENERGY_TOL,
        format!("pointwise 𝕂 drift {pointwise:.2e} (tol {TRANSFORM_POINTWISE_TOL:.0e}); dictionary energy mismatch {energy:.2e} (tol {TRANSFORM_ENERGY_TOL:.0e})"),
    ))
}

fn grid_convergence() -> Outcome {
    let dom = annulus(1.0, 2.0);
    let p = harmonic_radial(&dom, &annulus(1.0, 3.0)).map_err(|e| e.to_string())?;
    let exact = radial_dirichlet_energy(&p, &dom).map_err(|e| e.to_string())?.quadrature;
    let err = |n: usize| -> Result<f64, String> {
        let m: GridMap = PolarGridMap::sample_radial(&p, n, n).map_err(|e| e.to_string())?.into();
        Ok((dirichlet_energy(&m).map_err(|e| e.to_string())? - exact).abs())
    };
    let (e64, e256) = (err(64)?, err(256)?);
    let order = (e64 / e256).log2() / 2.0;
    Ok((order >= MIN_ORDER, format!("errors {e64:.3e} (n=64), {e256:.3e} (n=256), order {order:.3} (min {MIN_ORDER})")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("nitsche-bound", nitsche_bound),
        ("phenomenon-table", phenomenon_table),
        ("closed-form-grotzsch", closed_form_grotzsch),
        ("radial-certificate", radial_certificate),
        ("free-lagrangian-invariance", free_lagrangian_invariance),
        ("conformal-lower-bound", conformal_lower_bound),
        ("degenerate-sequence", degenerate_sequence_criterion),
        ("distortion-identity", distortion_identity),
        ("transform-consistency", transform_consistency),
        ("grid-convergence", grid_convergence),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
