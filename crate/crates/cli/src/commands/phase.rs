use extremal_core::grotzsch::{critical_length, solve_boundary, DistortionGauge, GrotzschProblem, Verdict};
use extremal_core::Error;
use rayon::prelude::*;

use crate::config::{parse_list, ConfigError, Params};
use crate::exit;
use crate::output::{num, Csv};

const INCONCLUSIVE: &str = "?";

/// `Ok(None)` marks an inconclusive cell.
fn conclusive<T>(r: extremal_core::Result<T>) -> anyhow::Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::InconclusiveConvergence { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cell(base: &GrotzschProblem, ratio: f64) -> anyhow::Result<Option<&'static str>> {
    if ratio == 1.0 {
        return Ok(Some("identity"));
    }
    let problem = base.with_length(ratio * base.ell)?;
    Ok(conclusive(solve_boundary(&problem))?.map(|s| match s.verdict {
        Some(Verdict::NitschePhenomenon { .. }) => "phenomenon",
        Some(Verdict::IdentityCase) => "identity",
        _ => "exists",
    }))
}

pub fn run(p: &Params) -> anyhow::Result<u8> {
    let family = p.raw("family").unwrap_or("shifted-power").to_string();
    let params = parse_list(p.raw("params").unwrap_or("0.5,1.5,2,3")).map_err(|e| ConfigError(format!("--params: {e}")))?;
    let ratios =
        parse_list(p.raw("ratios").unwrap_or("0.5,1,2,4,8")).map_err(|e| ConfigError(format!("--ratios: {e}")))?;
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(ConfigError(format!("--ratios must be positive, got {r}")).into());
    }
    let ell = p.get::<f64>("ell")?.unwrap_or(1.0);
    if !(ell.is_finite() && ell > 0.0) {
        return Err(ConfigError(format!("--ell must be positive and finite, got {ell}")).into());
    }
    let weight = p.weight_spec()?.build(ell)?;
    let gauges = params
        .iter()
        .map(|q| {
            format!("{family}:{q}").parse::<DistortionGauge>().map_err(|e| ConfigError(format!("--family/--params: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = p.out_dir()?;

    let rows: Vec<(Option<f64>, Vec<Option<&'static str>>)> = gauges
        .par_iter()
        .map(|g| -> anyhow::Result<_> {
            let base = GrotzschProblem::new(ell, ell, g.clone(), weight.clone())?;
            let l0 = conclusive(critical_length(&base))?.map(|c| c.value);
            let cells = ratios.par_iter().map(|&r| cell(&base, r)).collect::<anyhow::Result<Vec<_>>>()?;
            Ok((l0, cells))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut columns = vec!["p".to_string(), "L0".into(), "phenomenon".into()];
    columns.extend(ratios.iter().map(|r| format!("ratio={r}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let meta = [("family", family.clone()), ("weight", weight.spec()), ("ell", num(ell))];
    let mut csv = Csv::new("phase", &meta, &columns);
    let mut inconclusive = 0;
    for (q, (l0, cells)) in params.iter().zip(&rows) {
        let mut line = vec![q.to_string()];
        match l0 {
            Some(l) => {
                line.push(num(*l));
                line.push(if l.is_finite() { "yes" } else { "no" }.into());
            }
            None => {
                inconclusive += 1;
                line.push(INCONCLUSIVE.into());
                line.push(INCONCLUSIVE.into());
            }
        }
        for c in cells {
            if c.is_none() {
                inconclusive += 1;
            }
            line.push(c.unwrap_or(INCONCLUSIVE).into());
        }
        csv.row(&line);
    }
    csv.comment(&format!("inconclusive,{inconclusive}"));
    let path = csv.write(&out, "phase.csv")?;
    println!("phase table {}x{} ({inconclusive} inconclusive) -> {}", params.len(), ratios.len(), path.display());
    Ok(exit::OK)
}
