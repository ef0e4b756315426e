use extremal_core::annulus::{classify_regime, nitsche_bound_holds, nitsche_threshold};
use extremal_core::field::io::write_grid;
use extremal_core::field::{GridMap, PolarGridMap};
use extremal_core::radial::{characteristic_constant, radial_dirichlet_energy, radial_minimizer};
use serde_json::json;

use crate::config::Params;
use crate::exit;
use crate::output::write_json;

pub fn run(p: &Params) -> anyhow::Result<u8> {
    let dom = p.annulus("dom")?;
    let tgt = p.annulus("tgt")?;
    let out = p.out_dir()?;
    let profile = radial_minimizer(&dom, &tgt)?;
    let energy = radial_dirichlet_energy(&profile, &dom)?;
    let c = characteristic_constant(&profile)?;
    let regime = classify_regime(&dom, &tgt);
    let record = json!({
        "dom": [dom.r_inner(), dom.r_outer()],
        "tgt": [tgt.r_inner(), tgt.r_outer()],
        "regime": regime.name(),
        "profile": profile.kind,
        "c": c.c,
        "c_deviation": c.deviation,
        "energy": energy.closed_form,
        "energy_quadrature": energy.quadrature,
        "nitsche": {
            "threshold_ratio": nitsche_threshold(&dom),
            "target_ratio": tgt.ratio(),
            "holds": nitsche_bound_holds(&dom, &tgt),
        },
    });
    let path = write_json(&out, "radial.json", "radial", record)?;
    println!("{regime}: energy {:.12} -> {}", energy.closed_form, path.display());
    if p.flag("emit-grid")? {
        let (n_t, n_theta) = p.grid(128)?;
        let m: GridMap = PolarGridMap::sample_radial(&profile, n_t, n_theta)?.into();
        let path = out.join("map.csv");
        write_grid(&m, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        println!("grid {n_t}x{n_theta} -> {}", path.display());
    }
    Ok(exit::OK)
}
