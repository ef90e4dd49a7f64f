use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::faulttree::{truss_fault_tree, HealthState, N_STATES};
use crate::transition::{build_transition, calibrate_wmax, maintenance_matrix, LoadGrid, DEFAULT_TARGET};
use crate::truss::build_four_bay_truss;
use Action::*;

fn model() -> &'static DecisionModel {
    static MODEL: OnceLock<DecisionModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let truss = build_four_bay_truss();
        let cal = calibrate_wmax(&truss, DEFAULT_TARGET).unwrap();
        let dn = build_transition(&truss, &LoadGrid::new(cal.w_max)).unwrap();
        DecisionModel::new(truss_fault_tree(), dn, maintenance_matrix(), UtilityTables::default()).unwrap()
    })
}

fn random_belief(rng: &mut impl Rng, support: &[usize]) -> Vec<f64> {
    let mut b = vec![0.0; N_STATES];
    for &s in support {
        b[s] = -rng.random::<f64>().max(1e-300).ln();
    }
    let z: f64 = b.iter().sum();
    b.iter_mut().for_each(|p| *p /= z);
    b
}

fn classifier_support() -> Vec<usize> {
    HealthState::classifier_support().iter().map(|h| h.index()).collect()
}

fn all_states() -> Vec<usize> {
    (0..N_STATES).collect()
}

#[test]
fn failure_probability_examples() {
    let m = model();
    let p = |h: u8| m.failure_probability(&point_belief(HealthState::from_decimal(h))).unwrap();
    assert_eq!(p(0), 0.0);
    assert_eq!(p(9), 0.0); // m9, m12: different bays
    assert_eq!(p(17), 1.0); // m9, m13: bay 1
    let uniform = vec![1.0 / 256.0; 256];
    assert!((m.failure_probability(&uniform).unwrap() - 0.68359375).abs() < 1e-15);
    assert!(m.failure_probability(&[0.5; 256]).is_err());
}

#[test]
fn failure_probability_paths_agree() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let b = random_belief(&mut rng, &all_states());
        let dot = m.failure_probability(&b).unwrap();
        let net = m.failure_probability_via_network(&b).unwrap();
        assert!((dot - net).abs() < 1e-12, "{dot} vs {net}");
    }
}

#[test]
fn undamaged_belief_does_nothing() {
    let m = model();
    let b = point_belief(HealthState::UNDAMAGED);
    assert_eq!(m.optimal_strategy(&b).unwrap().strategy, Strategy::new(DoNothing, DoNothing));
    assert_eq!(m.myopic_decide(&b).unwrap(), DoNothing);
    assert!(m.next_failure_probability(&b).unwrap() <= 0.005);
}

#[test]
fn exact_ties_go_to_doing_nothing() {
    let zero = UtilityTables { operational: 0.0, failed: 0.0, do_nothing: 0.0, maintain: 0.0 };
    let m = model().with_utilities(zero);
    let b = point_belief(HealthState::from_decimal(17));
    let v = m.evaluate_strategies(&b).unwrap();
    assert!(v.iter().all(|s| s.expected_utility == 0.0));
    assert_eq!(m.optimal_strategy(&b).unwrap().strategy, Strategy::new(DoNothing, DoNothing));

    // free maintenance weakly dominates
    let free = model().with_utilities(UtilityTables { maintain: 0.0, ..UtilityTables::default() });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let b = random_belief(&mut rng, &all_states());
        let v = free.evaluate_strategies(&b).unwrap();
        assert!(v[3].expected_utility >= v[0].expected_utility - 1e-12);
    }
}

#[test]
fn myopic_threshold_is_one_third() {
    let u = UtilityTables::default();
    assert!((u.myopic_threshold() - 1.0 / 3.0).abs() < 1e-15);

    // locate the EU crossover along a mixture of two point beliefs
    let m = model();
    let mix = |l: f64| {
        let mut b = point_belief(HealthState::UNDAMAGED);
        b[0] = 1.0 - l;
        b[1] = l;
        b
    };
    let gap = |l: f64| {
        let b = mix(l);
        m.expected_utility(&b, &[Maintain]).unwrap() - m.expected_utility(&b, &[DoNothing]).unwrap()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    assert!(gap(lo) < 0.0 && gap(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = m.next_failure_probability(&mix(hi)).unwrap();
    assert!((p - 1.0 / 3.0).abs() < 1e-9, "{p}");
}

#[test]
fn expensive_maintenance_is_never_chosen() {
    let u = UtilityTables::default().with_costs(285.0, 300.0);
    assert!(u.myopic_threshold() >= 1.0);
    let m = model().with_utilities(u);
    for h in HealthState::all() {
        assert_eq!(m.myopic_decide(&point_belief(h)).unwrap(), DoNothing);
    }
}

#[test]
fn myopic_matches_one_step_enumeration() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut maintained = 0;
    for i in 0..1000 {
        let support = if i % 2 == 0 { all_states() } else { classifier_support() };
        let b = random_belief(&mut rng, &support);
        let dn = m.expected_utility(&b, &[DoNothing]).unwrap();
        let mt = m.expected_utility(&b, &[Maintain]).unwrap();
        let best = if mt > dn { Maintain } else { DoNothing };
        let myopic = m.myopic_decide(&b).unwrap();
        assert_eq!(myopic, best);
        maintained += (myopic == Maintain) as usize;
    }
    assert!(maintained > 0 && maintained < 1000);
}

#[test]
fn second_decision_is_do_nothing() {
    let m = model();
    for h in HealthState::all() {
        let s = m.optimal_strategy(&point_belief(h)).unwrap().strategy;
        assert_eq!(s.second, DoNothing, "H={h}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let b = random_belief(&mut rng, &classifier_support());
        assert_eq!(m.optimal_strategy(&b).unwrap().strategy.second, DoNothing);
    }
}

#[test]
fn argmax_invariant_to_utility_shift() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let b = random_belief(&mut rng, &all_states());
        let c = rng.random_range(-500.0..500.0);
        let u = m.utilities;
        let shifted = m.with_utilities(UtilityTables {
            operational: u.operational + c,
            failed: u.failed + c,
            do_nothing: u.do_nothing + c,
            maintain: u.maintain + c,
        });
        let a = m.optimal_strategy(&b).unwrap();
        let s = shifted.optimal_strategy(&b).unwrap();
        assert_eq!(a.strategy, s.strategy);
        assert!((s.expected_utility - a.expected_utility - 5.0 * c).abs() < 1e-9);
    }
}

#[test]
fn equal_failure_and_maintenance_cost_still_uses_information() {
    // Maintenance at cost 100 against a near-zero failure risk is never
    // worth it, but a single diagonal failure makes it worth it. The
    // decision at this cost therefore still depends on the belief.
    let m = model().with_utilities(UtilityTables::default().with_costs(100.0, 100.0));
    let undamaged = m.optimal_strategy(&point_belief(HealthState::UNDAMAGED)).unwrap().strategy;
    let damaged = m.optimal_strategy(&point_belief(HealthState::single(1))).unwrap().strategy;
    assert_eq!(undamaged, Strategy::new(DoNothing, DoNothing));
    assert_eq!(damaged, Strategy::new(Maintain, DoNothing));
    // far end of the bay: lower risk, no maintenance
    let mild = m.optimal_strategy(&point_belief(HealthState::single(4))).unwrap().strategy;
    assert_eq!(mild, Strategy::new(DoNothing, DoNothing));
}

#[test]
fn maintenance_timing_trends() {
    let m = model();
    let failure_costs = [100.0, 200.0, 285.0, 400.0, 600.0, 1000.0];
    let maintenance_costs = [25.0, 50.0, 100.0, 200.0, 400.0];
    let cells = transitions_until_maintenance(m, &failure_costs, &maintenance_costs, PlanningRule::Myopic, DEFAULT_STEP_CAP).unwrap();
    let steps = |cf: f64, cm: f64| {
        cells.iter().find(|c| c.failure_cost == cf && c.maintenance_cost == cm).unwrap().steps
    };
    let rank = |s: Option<usize>| s.unwrap_or(usize::MAX);
    for &cm in &maintenance_costs {
        for w in failure_costs.windows(2) {
            assert!(rank(steps(w[1], cm)) <= rank(steps(w[0], cm)), "C_m={cm} C_f {} -> {}", w[0], w[1]);
        }
    }
    for &cf in &failure_costs {
        for w in maintenance_costs.windows(2) {
            assert!(rank(steps(cf, w[1])) >= rank(steps(cf, w[0])));
        }
    }
    for c in &cells {
        if c.maintenance_cost >= c.failure_cost + 15.0 {
            assert_eq!(c.steps, None);
        }
    }
    assert!(steps(285.0, 100.0).is_some());
}
