//! Property tests: arc-set algebra against point sampling, value-function
//! identities against direct formulas, and label symmetries.

use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use proptest::prelude::*;

use turret_core::circle::{Arc, ArcSet, Direction};
use turret_core::one_v_one::{region_1v1, v_1v1, w_1v1};
use turret_core::state::{AttackerPolar, GameState, SpeedParams};
use turret_core::two_v_one::{runner_residual, solve_theta_tilde};

fn arc() -> impl Strategy<Value = Arc<f64>> {
    (-10.0..10.0f64, 0.0..3.5f64).prop_map(|(c, w)| Arc::new(c, w))
}

fn arc_set() -> impl Strategy<Value = ArcSet<f64>> {
    prop::collection::vec(arc(), 0..4).prop_map(ArcSet::from_arcs)
}

/// Fraction of `n` evenly spaced probes inside `s`, times 2π.
fn sampled_measure(s: &ArcSet<f64>, n: usize) -> f64 {
    let hits = (0..n).filter(|k| s.contains((*k as f64 + 0.5) * TAU / n as f64)).count();
    hits as f64 * TAU / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn union_and_intersection_agree_pointwise(a in arc_set(), b in arc_set(), th in -7.0..7.0f64) {
        prop_assert_eq!(a.union(&b).contains(th), a.contains(th) || b.contains(th));
        prop_assert_eq!(a.intersect(&b).contains(th), a.contains(th) && b.contains(th));
    }

    #[test]
    fn inclusion_exclusion(a in arc_set(), b in arc_set()) {
        let lhs = a.union(&b).measure() + a.intersect(&b).measure();
        prop_assert!((lhs - a.measure() - b.measure()).abs() < 1e-9);
    }

    #[test]
    fn complement_measure(a in arc_set()) {
        prop_assert!((a.complement().measure() + a.measure() - TAU).abs() < 1e-9);
    }

    #[test]
    fn measure_matches_sampling(a in arc_set()) {
        let n = 20_000;
        // each component edge can misplace at most one probe
        let slack = 2.0 * (a.component_count() as f64 + 1.0) * TAU / n as f64;
        prop_assert!((sampled_measure(&a, n) - a.measure()).abs() <= slack);
    }

    #[test]
    fn components_are_disjoint_arcs(a in arc_set()) {
        let arcs = a.arcs();
        prop_assert_eq!(arcs.len(), a.component_count());
        let total: f64 = arcs.iter().map(|x| 2.0 * x.half_width).sum();
        prop_assert!((total - a.measure()).abs() < 1e-9);
    }

    #[test]
    fn boundary_distance_reaches_nearest_edge(a in arc_set(), th in -4.0..4.0f64, ccw in any::<bool>()) {
        prop_assume!(!a.is_empty() && !a.is_full());
        let dir = if ccw { Direction::Ccw } else { Direction::Cw };
        let d = a.boundary_distance(th, dir);
        prop_assert!(d >= 0.0 && d < TAU + 1e-12);
        prop_assume!(d > 1e-6);
        let s = dir.sign::<f64>();
        // membership is constant strictly between the start and the edge
        let mid = a.contains(th + s * 0.5 * d);
        for k in 1..20 {
            prop_assert_eq!(a.contains(th + s * d * k as f64 / 20.0), mid);
        }
        // and flips across it, unless the edge bounds a zero-width arc
        let edge = th + s * d;
        let (before, after) = (a.contains(edge - s * 1e-9), a.contains(edge + s * 1e-9));
        prop_assert!(before != after || a.contains(edge));
    }

    #[test]
    fn one_v_one_region_is_zero_level_set(r in 1.0..5.0f64, nu in 0.05..1.0f64, rel in -3.0..3.0f64) {
        let a = AttackerPolar::new(r, rel);
        let inside = region_1v1(&a, nu).contains(0.0);
        let v = v_1v1(r, rel, nu).unwrap();
        // the Turret at 0 sees the attacker at relative angle `rel`
        prop_assume!(v.abs() > 1e-12);
        prop_assert_eq!(inside, v < 0.0);
    }

    #[test]
    fn runner_root_is_smallest_positive_root(r in 1.05..5.0f64, nu in 0.05..0.95f64, rel in 0.01..1.5f64) {
        if let Ok(sol) = solve_theta_tilde(r, rel, nu) {
            prop_assert!(runner_residual(sol.theta_tilde, r, rel, nu).abs() < 1e-10);
            // the residual stays negative on a fine grid before the root
            let n = 2000;
            for k in 0..n {
                let x = rel + (sol.theta_tilde - rel) * k as f64 / n as f64;
                prop_assert!(runner_residual(x, r, rel, nu) < 1e-12);
            }
        }
    }

    #[test]
    fn labels_are_rotation_invariant(
        tt in -PI..PI, r1 in 1.0..3.0f64, t1 in -PI..PI, r2 in 1.0..3.0f64, t2 in -PI..PI, delta in -PI..PI,
    ) {
        let p = SpeedParams::new(0.2, 0.7).unwrap();
        let st = GameState::new(tt, AttackerPolar::new(r1, t1), AttackerPolar::new(r2, t2));
        let a = turret_core::classify(&st, &p);
        let b = turret_core::classify(&st.rotated(delta), &p);
        prop_assert_eq!(a.label, b.label);
    }
}

#[test]
fn one_v_one_width_values() {
    // F(r; ν) written out by hand at ν = 0.5
    let f = |r: f64| ((r / 0.5f64).powi(2) - 1.0).sqrt() - (0.5 / r).acos();
    assert_relative_eq!(w_1v1(2.0, 0.5).unwrap(), f(2.0) - f(1.0), max_relative = 1e-14);
    assert_eq!(w_1v1(1.0, 0.5).unwrap(), 0.0);
}

#[test]
fn f32_and_f64_regions_agree() {
    let a64 = AttackerPolar::new(2.0f64, 0.6);
    let a32 = AttackerPolar::new(2.0f32, 0.6);
    let m64 = region_1v1(&a64, 0.7).measure();
    let m32 = region_1v1(&a32, 0.7f32).measure();
    assert!((m64 - m32 as f64).abs() < 1e-5);
}
