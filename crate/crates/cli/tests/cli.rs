use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn extremal(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extremal"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol * want.abs().max(1.0)
}

#[test]
fn radial_examples() {
    let dir = TempDir::new().unwrap();
    let o = extremal(&["radial", "--dom", "1,2", "--tgt", "1,3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("radial.json"));
    assert_eq!(r["schema"], "extremal-annulus/1");
    assert_eq!(r["regime"], "Expanding");
    assert!(close(&r["profile"]["a"], 5.0 / 3.0, 1e-14) && close(&r["profile"]["b"], -2.0 / 3.0, 1e-14));

    extremal(&["radial", "--dom", "1,2", "--tgt", "1,2"], dir.path());
    let r = json(&dir.path().join("radial.json"));
    assert_eq!(r["regime"], "Conformal");
    assert!(close(&r["energy"], 6.0 * PI, 1e-12));

    extremal(&["radial", "--dom", "1,4", "--tgt", "1,1.25"], dir.path());
    let r = json(&dir.path().join("radial.json"));
    assert_eq!(r["regime"], "BeyondNitsche");
    assert!(close(&r["profile"]["rho"], 2.0, 1e-12));
    assert_eq!(r["nitsche"]["holds"], false);
}

#[test]
fn invalid_geometry_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = extremal(&["radial", "--dom", "2,1", "--tgt", "1,3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 < r_inner < r_outer"));
    let o = extremal(&["grotzsch", "--ell", "0", "--L", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn linear_grotzsch_minimizer() {
    let dir = TempDir::new().unwrap();
    let o = extremal(&["grotzsch", "--ell", "1", "--L", "2", "--weight", "constant"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let g = json(&dir.path().join("grotzsch.json"));
    assert!(close(&g["alpha"], 0.75, 1e-10));
    for s in g["samples"].as_array().unwrap() {
        assert!((s[1].as_f64().unwrap() - 2.0 * s[0].as_f64().unwrap()).abs() < 1e-10);
    }
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("# extremal-annulus/1\n"));
    assert!(csv.lines().nth(2) == Some("x,u,u_x"));
}

#[test]
fn phenomenon_exit_and_degenerate_sequence() {
    let dir = TempDir::new().unwrap();
    let o = extremal(&["grotzsch", "--ell", "0.25", "--L", "0.6", "--emit-degenerate", "j=1..32"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let g = json(&dir.path().join("grotzsch.json"));
    // cosh(2πL₀) = e^{2πℓ}.
    let l0 = g["L0"].as_f64().unwrap();
    assert!(((2.0 * PI * l0).cosh() / (PI / 2.0).exp() - 1.0).abs() < 1e-8);
    assert!(g["cosh_check"]["relative_deviation"].as_f64().unwrap() < 1e-8);
    // The critical slope is infinite at the weight minimum.
    assert!(g["samples"][0][2].is_null());
    let csv = std::fs::read_to_string(dir.path().join("degenerate.csv")).unwrap();
    let energies: Vec<f64> =
        csv.lines().skip(3).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(energies.len(), 6);
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
}

fn phase_rows(dir: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(dir.join("phase.csv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn phase_tables() {
    let dir = TempDir::new().unwrap();
    let o = extremal(&["phase", "--family", "shifted-power", "--params", "0.5,1.5,2,3", "--ratios", "0.5,1,4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = phase_rows(dir.path());
    let pattern: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(pattern, ["no", "yes", "yes", "yes"]);
    assert!(rows.iter().all(|r| r[4] == "identity"));
    assert_eq!(rows[1][5], "phenomenon");
    assert_eq!(rows[0][5], "exists");

    extremal(&["phase", "--family", "power", "--params", "1.5,2,4", "--ratios", "0.5,2,4"], dir.path());
    for r in phase_rows(dir.path()) {
        assert_eq!(&r[3..], ["exists", "exists", "exists"]);
    }
    let text = std::fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    assert!(text.trim_end().ends_with("# inconclusive,0"));
}

#[test]
fn verify_passes_for_harmonic_and_fails_for_power_stretch() {
    let dir = TempDir::new().unwrap();
    let args = ["verify", "--dom", "1,2", "--tgt", "1,3", "--trials", "100", "--seed", "7", "--grid", "64"];
    let o = extremal(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["passed"], true);
    for t in v["tests"].as_array().unwrap() {
        if let Some(e) = t.get("max_relative_error") {
            assert!(e.as_f64().unwrap() <= 1e-4);
        }
    }

    let o = extremal(&["verify", "--dom", "1,2", "--tgt", "1,3", "--candidate", "power-stretch", "--trials", "10", "--grid", "32"], dir.path());
    assert_eq!(o.status.code(), Some(5));
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["passed"], false);
    assert!(v["failing_seed"].is_u64());
}

#[test]
fn verify_grid_file_and_grotzsch_candidates() {
    let dir = TempDir::new().unwrap();
    extremal(&["radial", "--dom", "1,3", "--tgt", "1,2", "--emit-grid", "--grid", "64"], dir.path());
    let file = format!("file:{}", dir.path().join("map.csv").display());
    let o = extremal(&["verify", "--candidate", &file, "--trials", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));

    let o = extremal(
        &["verify", "--candidate", "grotzsch", "--ell", "0.25", "--L", "0.32", "--gauge", "shifted-power:2", "--grid", "48,12", "--trials", "10"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = extremal(&["verify", "--candidate", "grotzsch", "--ell", "0.25", "--L", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# radial certificate\ndom = 1,2\ntgt = 1,3\ntrials = 8\nseed = 11\ngrid = 32\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(extremal(&["verify", "--config", cfg], &a).status.code(), Some(0));
    assert_eq!(extremal(&["verify", "--config", cfg], &b).status.code(), Some(0));
    assert_eq!(std::fs::read(a.join("verify.json")).unwrap(), std::fs::read(b.join("verify.json")).unwrap());
    assert_eq!(json(&a.join("verify.json"))["seed"], 11);

    // Flags override the file.
    extremal(&["verify", "--config", cfg, "--seed", "3"], &a);
    assert_eq!(json(&a.join("verify.json"))["seed"], 3);

    std::fs::write(dir.path().join("bad.cfg"), "colour = red\n").unwrap();
    let o = extremal(&["radial", "--config", dir.path().join("bad.cfg").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn weight_table_file() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("w.csv");
    std::fs::write(&table, "x,lambda\n0,1\n1,1\n").unwrap();
    let o = extremal(&["grotzsch", "--ell", "1", "--L", "2", "--weight", table.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(close(&json(&dir.path().join("grotzsch.json"))["alpha"], 0.75, 1e-9));
}
