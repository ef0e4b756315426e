use std::f64::consts::PI;
use std::sync::Arc;

use extremal_core::annulus::Annulus;
use extremal_core::field::*;
use extremal_core::grotzsch::{DistortionGauge, WeightFunction};
use extremal_core::radial::harmonic_radial;
use extremal_core::transform::*;
use proptest::prelude::*;

fn perturbed(seed: u64, n: usize) -> GridMap {
    let p = harmonic_radial(&Annulus::new(1.0, 2.0).unwrap(), &Annulus::new(1.0, 3.0).unwrap()).unwrap();
    let m: GridMap = PolarGridMap::sample_radial(&p, n, n).unwrap().into();
    perturb_map(&m, 0.05, seed).unwrap()
}

#[test]
fn annulus_problem_dictionary() {
    let dom = Annulus::new(1.0, (2.0 * PI * 0.3).exp()).unwrap();
    let tgt = Annulus::new(1.0, (2.0 * PI).exp()).unwrap();
    let p = annulus_problem_to_rect(&dom, &tgt, Arc::new(|_| 1.0), DistortionGauge::identity()).unwrap();
    assert!((p.ell - 0.3).abs() < 1e-12 && (p.big_l - 1.0).abs() < 1e-12);
    for x in [0.0, 0.1, 0.25] {
        let want = (4.0 * PI * x).exp() / (4.0 * PI * PI);
        assert!((p.weight.value(x) - want).abs() < 1e-12 * want);
    }
    let w = WeightFunction::nitsche(0.3).unwrap();
    let (a, eta) = rect_weight_to_annulus(&w, 1.0).unwrap();
    assert!((a.modulus() - 2.0 * PI * 0.3).abs() < 1e-12);
    for t in [1.0, 1.5, a.r_outer()] {
        assert!((eta(t) - 4.0 * PI * PI).abs() < 1e-9);
    }
}

#[test]
fn round_trip_reproduces_samples() {
    let m = perturbed(5, 64);
    let pm = m.as_polar().unwrap();
    let back = project_map(&lift_map(pm).unwrap(), 1.0, 1.0).unwrap();
    for (a, b) in pm.values().iter().zip(back.values()) {
        assert!((a - b).norm() < 1e-12);
    }
    for (a, b) in pm.jets().iter().zip(back.jets()) {
        assert!((a[0] - b[0]).norm() < 1e-10 && (a[1] - b[1]).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn branch_choice_changes_nothing(seed in 0u64..500, j0 in 0usize..64) {
        let m = perturbed(seed, 64);
        let pm = m.as_polar().unwrap();
        let a: GridMap = lift_map(pm).unwrap().into();
        let b: GridMap = lift_map_with_branch(pm, j0).unwrap().into();
        let g = DistortionGauge::shifted_power(2.0).unwrap();
        let lam = |x: f64, _| (4.0 * PI * x).exp();
        let ea = phi_distortion_energy_with(&a, &g, lam, DistortionNorm::HilbertSchmidt).unwrap().value;
        let eb = phi_distortion_energy_with(&b, &g, lam, DistortionNorm::HilbertSchmidt).unwrap().value;
        prop_assert!((ea - eb).abs() <= 1e-10 * ea);
        let da = dirichlet_energy(&a).unwrap();
        let db = dirichlet_energy(&b).unwrap();
        prop_assert!((da - db).abs() <= 1e-10 * da);
    }

    #[test]
    fn dictionary_energies_agree(seed in 0u64..500, p in 1.2f64..3.0) {
        let m = perturbed(seed, 32);
        let g = DistortionGauge::shifted_power(p).unwrap();
        let (a, q) = dictionary_energies(m.as_polar().unwrap(), &g, Arc::new(|x| 1.0 + x), DistortionNorm::Mean).unwrap();
        prop_assert!((a - q).abs() <= 1e-10 * a);
    }
}
