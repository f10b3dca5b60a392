//! Composite winning regions, overlap reachability sets and the distances
//! the forcing strategy keeps positive.

use serde::{Deserialize, Serialize};

use crate::circle::{Arc, ArcSet, Direction};
use crate::one_v_one::{f_barrier, region_1v1, w_1v1};
use crate::scalar::Scalar;
use crate::state::{AttackerId, AttackerPolar, GameState, SpeedParams};
use crate::two_v_one::{region_2v1, CaptureOrder};

/// Every region the case analysis looks at, for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBundle<T: Scalar> {
    pub r_a1_fast: ArcSet<T>,
    pub r_a2_fast: ArcSet<T>,
    pub r_a1_slow: ArcSet<T>,
    pub r_a2_slow: ArcSet<T>,
    pub r_a1a2_slow: ArcSet<T>,
    pub r_a2a1_slow: ArcSet<T>,
    pub r_a1a2_fast: ArcSet<T>,
    pub r_a2a1_fast: ArcSet<T>,
    pub i1_fast: ArcSet<T>,
    pub u1_fast: ArcSet<T>,
    pub u1_slow: ArcSet<T>,
    pub i2_slow: ArcSet<T>,
    pub u2_slow: ArcSet<T>,
    pub u2_fast: ArcSet<T>,
    /// Turret angles from which the fast 1v1 overlap can still be entered.
    pub r1v1: ArcSet<T>,
    /// Equal to `i2_slow`.
    pub r2v1: ArcSet<T>,
}

impl<T: Scalar> RegionBundle<T> {
    pub fn r_1v1(&self, id: AttackerId, fast: bool) -> &ArcSet<T> {
        match (id, fast) {
            (AttackerId::A1, true) => &self.r_a1_fast,
            (AttackerId::A2, true) => &self.r_a2_fast,
            (AttackerId::A1, false) => &self.r_a1_slow,
            (AttackerId::A2, false) => &self.r_a2_slow,
        }
    }

    pub fn r_2v1(&self, order: CaptureOrder, fast: bool) -> &ArcSet<T> {
        match (order.runner(), fast) {
            (AttackerId::A1, false) => &self.r_a1a2_slow,
            (AttackerId::A2, false) => &self.r_a2a1_slow,
            (AttackerId::A1, true) => &self.r_a1a2_fast,
            (AttackerId::A2, true) => &self.r_a2a1_fast,
        }
    }
}

fn alive_region_1v1<T: Scalar>(state: &GameState<T>, id: AttackerId, nu: T) -> ArcSet<T> {
    if state.is_alive(id) {
        region_1v1(state.attacker(id), nu)
    } else {
        ArcSet::empty()
    }
}

fn alive_region_2v1<T: Scalar>(state: &GameState<T>, order: CaptureOrder, nu: T) -> ArcSet<T> {
    if state.alive_count() == 2 {
        region_2v1(&state.attackers[0], &state.attackers[1], order, nu)
    } else {
        ArcSet::empty()
    }
}

/// Compute every region for `state`. Removed attackers contribute empty sets.
pub fn build_regions<T: Scalar>(state: &GameState<T>, p: &SpeedParams<T>) -> RegionBundle<T> {
    let [o12, o21] = CaptureOrder::BOTH;
    let r_a1_fast = alive_region_1v1(state, AttackerId::A1, p.nu_fast);
    let r_a2_fast = alive_region_1v1(state, AttackerId::A2, p.nu_fast);
    let r_a1_slow = alive_region_1v1(state, AttackerId::A1, p.nu_slow);
    let r_a2_slow = alive_region_1v1(state, AttackerId::A2, p.nu_slow);
    let r_a1a2_slow = alive_region_2v1(state, o12, p.nu_slow);
    let r_a2a1_slow = alive_region_2v1(state, o21, p.nu_slow);
    let r_a1a2_fast = alive_region_2v1(state, o12, p.nu_fast);
    let r_a2a1_fast = alive_region_2v1(state, o21, p.nu_fast);

    let i1_fast = r_a1_fast.intersect(&r_a2_fast);
    let u1_fast = r_a1_fast.union(&r_a2_fast);
    let u1_slow = r_a1_slow.union(&r_a2_slow);
    let i2_slow = r_a1a2_slow.intersect(&r_a2a1_slow);
    let u2_slow = r_a1a2_slow.union(&r_a2a1_slow);
    let u2_fast = r_a1a2_fast.union(&r_a2a1_fast);
    let r1v1 = r1v1_set(&i1_fast, p);
    let r2v1 = i2_slow.clone();
    RegionBundle {
        r_a1_fast,
        r_a2_fast,
        r_a1_slow,
        r_a2_slow,
        r_a1a2_slow,
        r_a2a1_slow,
        r_a1a2_fast,
        r_a2a1_fast,
        i1_fast,
        u1_fast,
        u1_slow,
        i2_slow,
        u2_slow,
        u2_fast,
        r1v1,
        r2v1,
    }
}

/// Overlap reachability set `{θ : α |θ − θ_I| ≤ w_I}` of the fast 1v1 overlap.
///
/// An overlap of two arcs can split into two components when both arcs are
/// wide; each component then gets its own reachability arc.
pub fn r1v1_set<T: Scalar>(i1: &ArcSet<T>, p: &SpeedParams<T>) -> ArcSet<T> {
    let alpha = p.alpha();
    ArcSet::from_arcs(
        i1.arcs()
            .into_iter()
            .map(|a| Arc::new(a.center, a.half_width / alpha)),
    )
}

/// Angular separation between the Turret and the two reachability sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilemmaDistances<T: Scalar> {
    /// Distance to the 1v1 overlap reachability set, `+∞` if it is empty.
    pub d1: T,
    /// Distance to the 2v1 overlap reachability set, `+∞` if it is empty.
    pub d2: T,
    pub theta_b1: Option<T>,
    pub theta_b2: Option<T>,
    /// Side of the Turret on which each set lies.
    pub side1: Option<Direction>,
    pub side2: Option<Direction>,
}

fn nearest_side<T: Scalar>(theta: T, set: &ArcSet<T>) -> (T, Option<T>, Option<Direction>) {
    if set.contains(theta) {
        return (T::zero(), Some(theta), None);
    }
    let cw = set.nearest_boundary(theta, Direction::Cw);
    let ccw = set.nearest_boundary(theta, Direction::Ccw);
    match (cw, ccw) {
        (Some((dc, pc)), Some((dw, pw))) => {
            if dc <= dw {
                (dc, Some(pc), Some(Direction::Cw))
            } else {
                (dw, Some(pw), Some(Direction::Ccw))
            }
        }
        _ => (T::infinity(), None, None),
    }
}

/// `d1`, `d2` and the boundary angles `θ_B1`, `θ_B2`.
///
/// Each distance is the shorter rotation from the Turret to the set, and the
/// side is recorded so that `ḋ = ±(ω_T − θ̇_B)` can be signed: for a set on
/// the clockwise side, `ḋ = ω_T − θ̇_B`.
pub fn dilemma_distances<T: Scalar>(theta_t: T, bundle: &RegionBundle<T>) -> DilemmaDistances<T> {
    let (d1, theta_b1, side1) = nearest_side(theta_t, &bundle.r1v1);
    let (d2, theta_b2, side2) = nearest_side(theta_t, &bundle.r2v1);
    DilemmaDistances {
        d1,
        d2,
        theta_b1,
        theta_b2,
        side1,
        side2,
    }
}

/// Rate of the far boundary `θ_UB = θ_I + w_I/α` of the 1v1 reachability set
/// given the rates of the two fast-region boundaries that bound the overlap.
pub fn theta_ub_rate<T: Scalar>(dot_theta1: T, dot_theta2: T, p: &SpeedParams<T>) -> T {
    let inv = T::one() / p.alpha();
    T::half() * (T::one() - inv) * dot_theta1 + T::half() * (T::one() + inv) * dot_theta2
}

/// How to read the subscripts of the avoid-dilemma boundary formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CurveReading {
    /// Radii and widths of the attacker being varied, re-derived from the overlap geometry.
    #[default]
    Derived,
    /// The printed formulas, which use `r_A1` in place of `r_A2` and `−F(1)` constants.
    AsPrinted,
}

/// Polylines `(r_A2, θ_A2)` for the analytic boundaries of the A2 sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCurves<T: Scalar> {
    pub c_e: T,
    pub c_n: T,
    /// `ℐ₁ᵥ₁(ν_fast)` appears or disappears.
    pub existence: Vec<[T; 2]>,
    /// `θ_T` on the far boundary of `ℛ₁ᵥ₁` when the overlap is bounded by both regions.
    pub nominal: Vec<[T; 2]>,
    /// Same, when `ℛ_A2(ν_fast)` lies inside `ℛ_A1(ν_fast)`.
    pub degenerate: Vec<[T; 2]>,
}

/// Analytic boundaries for a sweep of A2 positions with A1 counterclockwise
/// of the Turret and A2 clockwise.
///
/// Angles are unwrapped, i.e. continuous along each polyline.
pub fn closed_form_boundaries<T: Scalar>(
    a1: &AttackerPolar<T>,
    theta_t: T,
    p: &SpeedParams<T>,
    radii: &[T],
    reading: CurveReading,
) -> ClosedFormCurves<T> {
    let nf = p.nu_fast;
    let beta = p.beta();
    let f = |r: T| f_barrier(r, nf).unwrap_or_else(|_| T::nan());
    let w = |r: T| w_1v1(r, nf).unwrap_or_else(|_| T::nan());
    let f1 = f(T::one());
    let th1 = a1.theta.value();
    let r1 = a1.r;
    let two = T::two();
    let lower1 = th1 - w(r1);
    let (c_e, c_n) = match reading {
        CurveReading::Derived => (
            th1 - f(r1) + two * f1,
            (two * theta_t - (T::one() - beta) * lower1) / (T::one() + beta) + f1,
        ),
        CurveReading::AsPrinted => (
            th1 - f(r1) - two * f1,
            (two * theta_t - (T::one() - beta) * lower1) / (T::one() + beta) - f1,
        ),
    };
    let existence = radii.iter().map(|&r| [r, c_e - f(r)]).collect();
    let nominal = radii
        .iter()
        .map(|&r| match reading {
            CurveReading::Derived => [r, c_n - f(r)],
            CurveReading::AsPrinted => [r, c_n - f(r1)],
        })
        .collect();
    let degenerate = radii
        .iter()
        .map(|&r| match reading {
            CurveReading::Derived => [r, theta_t - beta * w(r)],
            CurveReading::AsPrinted => [r, theta_t - beta * w(r1)],
        })
        .collect();
    ClosedFormCurves {
        c_e,
        c_n,
        existence,
        nominal,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r1v1_scales_half_width() {
        let p = SpeedParams::new(0.35_f64, 0.7).unwrap();
        let i1 = ArcSet::from_arc(Arc::new(0.3, 0.1));
        let r = r1v1_set(&i1, &p);
        let a = r.arcs();
        assert_eq!(a.len(), 1);
        assert!((a[0].half_width - 0.2).abs() < 1e-15);
        assert!((a[0].center - 0.3).abs() < 1e-15);
        assert!(r1v1_set(&ArcSet::empty(), &p).is_empty());
    }

    #[test]
    fn ub_rate_extremes() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let a = p.alpha();
        assert!((theta_ub_rate(a, -a, &p) + 1.0).abs() < 1e-15);
        assert!((theta_ub_rate(-a, a, &p) - 1.0).abs() < 1e-15);
        assert_eq!(theta_ub_rate(0.0, 0.0, &p), 0.0);
    }

    #[test]
    fn perimeter_attackers_have_degenerate_regions() {
        let p = SpeedParams::new(0.3_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(1.0, 1.0), AttackerPolar::new(1.0, -1.0));
        let b = build_regions(&st, &p);
        assert_eq!(b.u1_fast.measure(), 0.0);
        assert_eq!(b.u1_slow.measure(), 0.0);
        assert!(b.i1_fast.is_empty());
        assert!(b.u2_slow.measure() == 0.0);
        assert!(b.r1v1.is_empty());
    }

    #[test]
    fn distances_to_empty_sets_are_infinite() {
        let p = SpeedParams::new(0.3_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(1.0, 2.0), AttackerPolar::new(1.0, -2.0));
        let b = build_regions(&st, &p);
        let d = dilemma_distances(0.0, &b);
        assert!(d.d1.is_infinite() && d.d2.is_infinite());
        assert!(d.theta_b1.is_none());
    }

    #[test]
    fn distance_zero_on_boundary() {
        let p = SpeedParams::new(0.3_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(2.0, 0.6), AttackerPolar::new(2.0, -0.6));
        let b = build_regions(&st, &p);
        assert!(!b.r1v1.is_empty());
        let edge = b.r1v1.arcs()[0].upper();
        let d = dilemma_distances(edge, &b);
        assert!(d.d1 < 1e-12);
    }
}
