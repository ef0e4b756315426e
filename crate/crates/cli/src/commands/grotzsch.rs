use std::f64::consts::PI;

use extremal_core::grotzsch::{
    degenerate_sequence, GaugeFamily, GrotzschProblem, ProfileSample, Verdict, WeightSpec,
};
use serde_json::{json, Value};

use crate::config::{parse_indices, Params};
use crate::exit;
use crate::output::{num, write_json, Csv};

pub fn problem(p: &Params) -> anyhow::Result<GrotzschProblem> {
    let ell = p.positive("ell")?;
    let big_l = p.positive("L")?;
    let weight = p.weight_spec()?.build(ell)?;
    Ok(GrotzschProblem::new(ell, big_l, p.gauge()?, weight)?)
}

fn samples_json(samples: &[ProfileSample]) -> Value {
    samples.iter().map(|s| json!([s.x, s.u, s.u_x])).collect()
}

pub fn run(p: &Params) -> anyhow::Result<u8> {
    let problem = problem(p)?;
    let out = p.out_dir()?;
    let s = extremal_core::grotzsch::solve_boundary(&problem)?;
    let verdict = s.verdict.clone().expect("solve_boundary attaches a verdict");
    let mut record = json!({
        "ell": problem.ell,
        "L": problem.big_l,
        "gauge": problem.gauge.spec(),
        "weight": problem.weight.spec(),
        "alpha": s.alpha,
        "verdict": verdict.name(),
        "l_achieved": s.l_achieved,
        "residual": s.residual,
    });
    let obj = record.as_object_mut().unwrap();
    let code = match verdict {
        Verdict::NitschePhenomenon { critical_length: l0 } => {
            obj.insert("L0".into(), l0.into());
            let nitsche = p.weight_spec()? == WeightSpec::Nitsche;
            if nitsche && matches!(problem.gauge.family(), GaugeFamily::Identity) {
                let lhs = (2.0 * PI * l0).cosh();
                let rhs = (2.0 * PI * problem.ell).exp();
                obj.insert(
                    "cosh_check".into(),
                    json!({ "cosh_2pi_L0": lhs, "exp_2pi_ell": rhs, "relative_deviation": (lhs - rhs).abs() / rhs }),
                );
                println!("NitschePhenomenon: L0 = {l0:.15}, cosh(2πL0) = {lhs:.15}, e^(2πℓ) = {rhs:.15}");
            } else {
                println!("NitschePhenomenon: L0 = {l0:.15}");
            }
            exit::PHENOMENON
        }
        _ => {
            obj.insert("energy".into(), s.energy()?.into());
            println!("{}: alpha = {:.15}", verdict.name(), s.alpha);
            exit::OK
        }
    };
    obj.insert("samples".into(), samples_json(&s.samples));
    write_json(&out, "grotzsch.json", "grotzsch", record)?;
    let meta = [("ell", num(problem.ell)), ("L", num(problem.big_l)), ("gauge", problem.gauge.spec())];
    let mut csv = Csv::new("grotzsch-profile", &meta, &["x", "u", "u_x"]);
    for q in &s.samples {
        csv.row(&[num(q.x), num(q.u), num(q.u_x)]);
    }
    csv.write(&out, "profile.csv")?;

    if let Some(spec) = p.raw("emit-degenerate") {
        let js = parse_indices(spec)?;
        let seq = degenerate_sequence(&problem, &js)?;
        let meta = [
            ("L0", num(seq.critical_length)),
            ("critical_energy", num(seq.critical_energy)),
            ("limit_energy", num(seq.limit_energy)),
        ];
        let mut csv = Csv::new("degenerate-sequence", &meta, &["j", "scale", "collar_start", "collar_end", "energy"]);
        for m in &seq.members {
            csv.row(&[m.j.to_string(), num(m.scale), num(m.collar.0), num(m.collar.1), num(m.energy)]);
        }
        let path = csv.write(&out, "degenerate.csv")?;
        println!("degenerate sequence ({} members) -> {}", seq.members.len(), path.display());
    }
    Ok(code)
}
