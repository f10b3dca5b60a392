//! Complete-information game between the Turret and two attackers.
//!
//! The Turret captures a Runner first and then the Penetrator. The Runner
//! flees perpendicular to the Turret's final line of sight; the Turret has to
//! rotate through `θ̃` to catch it, where `θ̃` is the smallest root of
//! `r sin(θ̃ − θ_rel) = ν θ̃`. The two-attacker value is the Penetrator's
//! one-on-one value plus the `2θ̃` lost going out to the Runner and back.
//!
//! Angles toward the Runner and back toward the Penetrator are measured along
//! the arc between the two attackers that contains the Turret, so they are
//! unwrapped (possibly larger than π).

use serde::{Deserialize, Serialize};

use crate::circle::{ccw_distance, cw_distance, ArcSet, Direction};
use crate::error::{GameError, Result};
use crate::one_v_one::{attacker_1v1_heading, f_barrier};
use crate::scalar::Scalar;
use crate::state::{AttackerControl, AttackerId, AttackerPolar, GameState};

/// Order in which the Turret intends to capture the attackers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaptureOrder {
    pub first: AttackerId,
    pub second: AttackerId,
}

impl CaptureOrder {
    pub fn runner_first(runner: AttackerId) -> Self {
        CaptureOrder {
            first: runner,
            second: runner.other(),
        }
    }

    pub fn runner(&self) -> AttackerId {
        self.first
    }

    pub fn penetrator(&self) -> AttackerId {
        self.second
    }

    pub fn reversed(&self) -> Self {
        CaptureOrder::runner_first(self.second)
    }

    pub const BOTH: [CaptureOrder; 2] = [
        CaptureOrder {
            first: AttackerId::A1,
            second: AttackerId::A2,
        },
        CaptureOrder {
            first: AttackerId::A2,
            second: AttackerId::A1,
        },
    ];
}

impl std::fmt::Display for CaptureOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.first, self.second)
    }
}

/// Root of the runner-capture equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunnerSolution<T: Scalar> {
    /// Rotation the Turret makes before it captures the Runner.
    pub theta_tilde: T,
    /// Radius at which the Runner is captured, `r cos(θ̃ − θ_rel)`.
    pub capture_radius: T,
}

fn no_capture<T: Scalar>(r: T, theta_rel: T, nu: T) -> GameError {
    GameError::NoCapture {
        r: r.to_f64_lossy(),
        theta_rel: theta_rel.to_f64_lossy(),
        nu: nu.to_f64_lossy(),
    }
}

/// Residual `r sin(θ̃ − θ_rel) − ν θ̃` of the runner-capture equation.
pub fn runner_residual<T: Scalar>(theta_tilde: T, r: T, theta_rel: T, nu: T) -> T {
    r * (theta_tilde - theta_rel).sin() - nu * theta_tilde
}

/// Smallest root `θ̃ ≥ θ_rel` of the runner-capture equation with capture
/// outside the perimeter.
///
/// The residual is concave in `θ̃` on `[θ_rel, θ_rel + π]`, is negative at
/// `θ_rel` (for `θ_rel > 0`) and peaks at `θ_rel + acos(ν/r)`. The smallest
/// root therefore exists iff the peak is nonnegative and lies in
/// `[θ_rel, peak]`, where plain bisection finds it.
pub fn solve_theta_tilde<T: Scalar>(r: T, theta_rel: T, nu: T) -> Result<RunnerSolution<T>> {
    if r < T::one() || theta_rel < T::zero() || !(nu > T::zero()) || r < nu {
        return Err(GameError::Precondition(format!(
            "runner needs r >= 1, r >= ν and θ_rel >= 0 (r = {}, θ_rel = {}, ν = {})",
            r.to_f64_lossy(),
            theta_rel.to_f64_lossy(),
            nu.to_f64_lossy()
        )));
    }
    if theta_rel == T::zero() {
        return Ok(RunnerSolution {
            theta_tilde: T::zero(),
            capture_radius: r,
        });
    }
    let g = |x: T| runner_residual(x, r, theta_rel, nu);
    let peak = theta_rel + (nu / r).min(T::one()).acos();
    if g(peak) < T::zero() {
        return Err(no_capture(r, theta_rel, nu));
    }
    let (mut lo, mut hi) = (theta_rel, peak);
    for _ in 0..200 {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // hi always satisfies g >= 0; pick whichever end has the smaller residual
    let theta_tilde = if g(lo).abs() < g(hi).abs() { lo } else { hi };
    let capture_radius = r * (theta_tilde - theta_rel).cos();
    if capture_radius < T::one() {
        return Err(no_capture(r, theta_rel, nu));
    }
    Ok(RunnerSolution {
        theta_tilde,
        capture_radius,
    })
}

/// `∂θ̃/∂θ_T = −a/(a − 1)` with `a = (r/ν) cos(θ̃ − θ_rel)`.
pub fn dtheta_tilde_dtheta_t<T: Scalar>(r: T, theta_rel: T, nu: T) -> Result<T> {
    let sol = solve_theta_tilde(r, theta_rel, nu)?;
    let a = sol.capture_radius / nu;
    if a - T::one() <= T::epsilon().sqrt() {
        return Err(GameError::Precondition(
            "capture on the speed-ratio circle: ∂θ̃/∂θ_T is unbounded".into(),
        ));
    }
    Ok(-a / (a - T::one()))
}

/// Where the Runner and Penetrator sit relative to the Turret.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderGeometry<T: Scalar> {
    /// Direction the Turret turns to reach the Runner without passing the Penetrator.
    pub toward_runner: Direction,
    /// Rotation from the Turret to the Runner in that direction.
    pub runner_gap: T,
    /// Rotation from the Turret to the Penetrator in the opposite direction.
    pub penetrator_gap: T,
}

pub fn order_geometry<T: Scalar>(theta_t: T, runner: T, penetrator: T) -> OrderGeometry<T> {
    let ccw_r = ccw_distance(theta_t, runner);
    let ccw_p = ccw_distance(theta_t, penetrator);
    if ccw_r <= ccw_p {
        OrderGeometry {
            toward_runner: Direction::Ccw,
            runner_gap: ccw_r,
            penetrator_gap: cw_distance(theta_t, penetrator),
        }
    } else {
        OrderGeometry {
            toward_runner: Direction::Cw,
            runner_gap: cw_distance(theta_t, runner),
            penetrator_gap: ccw_p,
        }
    }
}

fn value_from_gaps<T: Scalar>(
    runner: &AttackerPolar<T>,
    penetrator: &AttackerPolar<T>,
    runner_gap: T,
    penetrator_gap: T,
    nu: T,
) -> Result<T> {
    let sol = solve_theta_tilde(runner.r, runner_gap, nu)?;
    Ok(penetrator_gap + f_barrier(T::one(), nu)? - f_barrier(penetrator.r, nu)?
        + T::two() * sol.theta_tilde)
}

/// Two-attacker value for capture order `order`; negative means both are captured.
pub fn v_2v1<T: Scalar>(state: &GameState<T>, order: CaptureOrder, nu: T) -> Result<T> {
    let runner = state.attacker(order.runner());
    let penetrator = state.attacker(order.penetrator());
    let geo = order_geometry(
        state.theta_t.value(),
        runner.theta.value(),
        penetrator.theta.value(),
    );
    value_from_gaps(runner, penetrator, geo.runner_gap, geo.penetrator_gap, nu)
}

/// How the far edge of a two-attacker region is determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// `V_2v1 = 0` at the edge.
    Barrier,
    /// Past the edge the Runner can no longer be captured outside the perimeter.
    RunnerEscape,
    /// The region fills the whole gap up to the Penetrator.
    ReachesPenetrator,
}

/// One connected piece of a two-attacker Turret-winning region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPiece<T: Scalar> {
    /// Direction from the far edge toward the Runner (the way the Turret turns).
    pub toward_runner: Direction,
    /// Largest runner gap still inside the region.
    pub max_runner_gap: T,
    /// Turret angle at the far edge.
    pub far_edge: T,
    pub edge: EdgeKind,
}

fn piece_in_gap<T: Scalar>(
    runner: &AttackerPolar<T>,
    penetrator: &AttackerPolar<T>,
    span: T,
    toward_runner: Direction,
    nu: T,
) -> Option<RegionPiece<T>> {
    let wins = |gap: T| -> std::result::Result<bool, ()> {
        match value_from_gaps(runner, penetrator, gap, span - gap, nu) {
            Ok(v) => Ok(v <= T::zero()),
            Err(_) => Err(()),
        }
    };
    let at = |gap: T| runner.theta.value() - toward_runner.sign::<T>() * gap;
    if wins(T::zero()) != Ok(true) {
        return None;
    }
    if wins(span) == Ok(true) {
        return Some(RegionPiece {
            toward_runner,
            max_runner_gap: span,
            far_edge: at(span),
            edge: EdgeKind::ReachesPenetrator,
        });
    }
    let (mut lo, mut hi) = (T::zero(), span);
    let mut hi_kind = EdgeKind::Barrier;
    for _ in 0..200 {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match wins(mid) {
            Ok(true) => lo = mid,
            Ok(false) => {
                hi = mid;
                hi_kind = EdgeKind::Barrier;
            }
            Err(()) => {
                hi = mid;
                hi_kind = EdgeKind::RunnerEscape;
            }
        }
    }
    let edge = if wins(hi).is_err() || hi_kind == EdgeKind::RunnerEscape {
        // the value may still be negative right before the runner escapes
        match value_from_gaps(runner, penetrator, lo, span - lo, nu) {
            Ok(v) if v < -T::lit(1e-6) => EdgeKind::RunnerEscape,
            _ => EdgeKind::Barrier,
        }
    } else {
        EdgeKind::Barrier
    };
    Some(RegionPiece {
        toward_runner,
        max_runner_gap: lo,
        far_edge: at(lo),
        edge,
    })
}

/// Pieces of the Turret-winning region for capture order `runner → penetrator`.
///
/// There is one candidate piece on each of the two arcs separating the
/// attackers; each piece starts at the Runner and extends toward the
/// Penetrator.
pub fn region_2v1_pieces<T: Scalar>(
    a1: &AttackerPolar<T>,
    a2: &AttackerPolar<T>,
    order: CaptureOrder,
    nu: T,
) -> Vec<RegionPiece<T>> {
    let (runner, penetrator) = match order.runner() {
        AttackerId::A1 => (a1, a2),
        AttackerId::A2 => (a2, a1),
    };
    if runner.r < T::one() || penetrator.r < T::one() {
        return Vec::new();
    }
    let rt = runner.theta.value();
    let pt = penetrator.theta.value();
    // Turret between penetrator (CW) and runner (CCW): it turns CCW toward the runner.
    let span_ccw = ccw_distance(pt, rt);
    // Turret between runner (CW) and penetrator (CCW).
    let span_cw = T::two_pi() - span_ccw;
    [
        (span_ccw, Direction::Ccw),
        (span_cw, Direction::Cw),
    ]
    .into_iter()
    .filter_map(|(span, dir)| piece_in_gap(runner, penetrator, span, dir, nu))
    .collect()
}

/// Turret-winning region for the given capture order at speed ratio `nu`.
pub fn region_2v1<T: Scalar>(
    a1: &AttackerPolar<T>,
    a2: &AttackerPolar<T>,
    order: CaptureOrder,
    nu: T,
) -> ArcSet<T> {
    let runner_theta = match order.runner() {
        AttackerId::A1 => a1.theta.value(),
        AttackerId::A2 => a2.theta.value(),
    };
    region_2v1_pieces(a1, a2, order, nu)
        .into_iter()
        .map(|p| match p.toward_runner {
            Direction::Ccw => ArcSet::from_ccw(runner_theta - p.max_runner_gap, p.max_runner_gap),
            Direction::Cw => ArcSet::from_ccw(runner_theta, p.max_runner_gap),
        })
        .fold(ArcSet::empty(), |acc, s| acc.union(&s))
}

/// Equilibrium controls `(runner, penetrator)` for the given capture order.
pub fn attacker_2v1_controls<T: Scalar>(
    state: &GameState<T>,
    order: CaptureOrder,
    nu: T,
) -> Result<(AttackerControl<T>, AttackerControl<T>)> {
    let runner = state.attacker(order.runner());
    let penetrator = state.attacker(order.penetrator());
    let geo = order_geometry(
        state.theta_t.value(),
        runner.theta.value(),
        penetrator.theta.value(),
    );
    let sol = solve_theta_tilde(runner.r, geo.runner_gap, nu)?;
    let s = geo.toward_runner.sign::<T>();
    let runner_ctrl = AttackerControl::new(
        nu,
        s * (T::FRAC_PI_2() - sol.theta_tilde + geo.runner_gap),
    );
    // the Turret comes back to the penetrator from the runner's side
    let penetrator_ctrl = attacker_1v1_heading(penetrator.r, -s, nu);
    Ok((runner_ctrl, penetrator_ctrl))
}
