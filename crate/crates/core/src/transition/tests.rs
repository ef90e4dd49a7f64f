use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::faulttree::HealthState;
use crate::truss::{build_four_bay_truss, LoadCase};

#[test]
fn default_grid_has_800_cases() {
    let g = LoadGrid::new(6900.0);
    assert_eq!(g.n_cases(), 800);
    assert_eq!(g.cases().count(), 800);
    assert_eq!(g.magnitude(100), 6900.0);
    assert!(g.cases().all(|c| c.magnitude > 0.0 && c.preload == 5.0));
}

#[test]
fn calibration_hits_four_cases() {
    let t = build_four_bay_truss();
    let cal = calibrate_wmax(&t, DEFAULT_TARGET).unwrap();
    assert_eq!(cal.damaging_cases, 4, "{cal:?}");
    assert_eq!(cal.probability, 0.005);
    assert!(cal.warning.is_none());
    assert!((cal.w_max - 6900.0).abs() <= 0.25 * 6900.0, "{}", cal.w_max);

    // smallest such load: just below it one case fewer fails
    let response = StressResponse::new(&t, HealthState::UNDAMAGED, 5.0).unwrap();
    let below = LoadGrid::new(cal.w_max * (1.0 - 1e-9));
    assert!(response.damaging_cases(&below) < 4);
    assert_eq!(response.damaging_cases(&LoadGrid::new(cal.w_max)), 4);
}

#[test]
fn zero_target_gives_identity_row() {
    let t = build_four_bay_truss();
    let cal = calibrate_wmax(&t, 0.0).unwrap();
    assert_eq!(cal.damaging_cases, 0);
    let counts = transition_counts(&t, HealthState::UNDAMAGED, &LoadGrid::new(cal.w_max)).unwrap();
    assert_eq!(counts[0], 800);
    assert!(calibrate_wmax(&t, 1.0).is_err());
    assert!(calibrate_wmax(&t, -0.1).is_err());
}

#[test]
fn damage_probability_is_monotone_in_wmax() {
    let t = build_four_bay_truss();
    let response = StressResponse::new(&t, HealthState::UNDAMAGED, 5.0).unwrap();
    let mut last = 0;
    for i in 0..200 {
        let w = 5000.0 + 50.0 * i as f64;
        let c = response.damaging_cases(&LoadGrid::new(w));
        assert!(c >= last, "w={w}: {c} < {last}");
        last = c;
    }
    assert!(last > 4);
}

#[test]
fn preload_alone_never_damages() {
    let t = build_four_bay_truss();
    for h in HealthState::all() {
        for loc in 1..=8 {
            let d = delta_health(&t, h, &LoadCase::new(loc, 0.0)).unwrap();
            assert_eq!(d, HealthState::UNDAMAGED, "H={h}");
        }
    }
}

#[test]
fn failed_members_never_fail_again() {
    let t = build_four_bay_truss();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let h = HealthState::from_decimal(rng.random());
        let load = LoadCase::new(rng.random_range(1..=8), rng.random_range(0.0..20000.0));
        let d = delta_health(&t, h, &load).unwrap();
        assert_eq!(d.decimal() & h.decimal(), 0, "H={h} δ={d}");
    }
}

#[test]
fn worst_case_at_wmax_damages() {
    let t = build_four_bay_truss();
    let cal = calibrate_wmax(&t, DEFAULT_TARGET).unwrap();
    let hit = (1..=8)
        .map(|loc| delta_health(&t, HealthState::UNDAMAGED, &LoadCase::new(loc, cal.w_max)).unwrap())
        .any(|d| d != HealthState::UNDAMAGED);
    assert!(hit);
}

#[test]
fn superposition_matches_direct_solves() {
    let t = build_four_bay_truss();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let h = HealthState::from_decimal(rng.random());
        let loc = rng.random_range(1..=8);
        let w = rng.random_range(0.0..15000.0);
        let fast = StressResponse::new(&t, h, 5.0).unwrap().delta(loc, w);
        let direct = delta_health(&t, h, &LoadCase::new(loc, w)).unwrap();
        assert_eq!(fast, direct, "H={h} L{loc} w={w}");
    }
}

#[test]
fn built_matrix_properties() {
    let t = build_four_bay_truss();
    let cal = calibrate_wmax(&t, DEFAULT_TARGET).unwrap();
    let m = build_transition(&t, &LoadGrid::new(cal.w_max)).unwrap();
    m.validate().unwrap();
    assert_eq!(m.action(), crate::decision::Action::DoNothing);
    assert_eq!(m.get(HealthState::UNDAMAGED, HealthState::UNDAMAGED), 0.995);
    for from in HealthState::all() {
        for to in HealthState::all() {
            if m.get(from, to) > 0.0 {
                assert!(to.contains(from), "{from} -> {to}");
            }
        }
    }
    // repeated propagation stays a distribution
    let mut b = vec![0.0; 256];
    b[0] = 1.0;
    for _ in 0..1000 {
        b = m.propagate(&b);
    }
    assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(b.iter().all(|&p| p >= 0.0));
}
