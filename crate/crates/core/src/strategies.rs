//! Turret and attacker policies.
//!
//! Policies are described by small serializable specs and instantiated as
//! controllers that may carry a seeded RNG or latched observations. Every
//! attacker policy falls back to the survivor's one-on-one play at the true
//! speed once an attacker has been removed.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{signed_diff, Direction};
use crate::one_v_one::{attacker_1v1_heading, region_1v1, turret_1v1_rate, v_1v1};
use crate::regions::{DilemmaDistances, RegionBundle};
use crate::scalar::{sgn, Scalar};
use crate::state::{AttackerControl, AttackerId, GameState, SpeedClass, SpeedParams};
use crate::two_v_one::{attacker_2v1_controls, v_2v1, CaptureOrder};

/// Default switching period of the random-walk Turret.
pub const RANDOM_WALK_INTERVAL: f64 = 0.05;

/// Everything a policy may look at when choosing its controls.
#[derive(Debug, Clone, Copy)]
pub struct PolicyContext<'a, T: Scalar> {
    pub state: &'a GameState<T>,
    pub params: &'a SpeedParams<T>,
    /// True attacker capability. Information-limiting policies ignore it
    /// while both attackers are in play.
    pub true_speed: SpeedClass,
    pub regions: Option<&'a RegionBundle<T>>,
    pub distances: Option<&'a DilemmaDistances<T>>,
    /// Attacker controls applied during the previous step.
    pub observed: [AttackerControl<T>; 2],
}

impl<T: Scalar> PolicyContext<'_, T> {
    fn true_nu(&self) -> T {
        self.params.nu(self.true_speed)
    }

    fn survivor(&self) -> Option<AttackerId> {
        match self.state.alive {
            [true, false] => Some(AttackerId::A1),
            [false, true] => Some(AttackerId::A2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TurretPolicySpec {
    /// Turn toward one attacker at full rate; the survivor once it is gone.
    Pursue { target: AttackerId },
    /// Turn in a fixed direction while both attackers are in play.
    Committed { direction: Direction },
    /// Turn toward the nearest boundary of the 1v1 overlap reachability set.
    SeekR1v1,
    /// Turn toward the nearest boundary of the 2v1 overlap reachability set.
    SeekR2v1,
    /// Full-rate turns in a seeded random direction, redrawn every `interval`.
    RandomWalk {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        interval: Option<f64>,
    },
    /// Stand still.
    Hold,
    /// Head for the Runner of the mismatched slow order; if the attackers
    /// show a speed above `ν_slow`, turn on whichever attacker the fast
    /// one-on-one game still lets the Turret capture.
    AvoidDilemma { runner: AttackerId },
}

impl TurretPolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            TurretPolicySpec::Pursue { .. } => "pursue",
            TurretPolicySpec::Committed { .. } => "committed",
            TurretPolicySpec::SeekR1v1 => "seek_r1v1",
            TurretPolicySpec::SeekR2v1 => "seek_r2v1",
            TurretPolicySpec::RandomWalk { .. } => "random_walk",
            TurretPolicySpec::Hold => "hold",
            TurretPolicySpec::AvoidDilemma { .. } => "avoid_dilemma",
        }
    }

    pub fn needs_regions(&self) -> bool {
        matches!(self, TurretPolicySpec::SeekR1v1 | TurretPolicySpec::SeekR2v1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackerPolicySpec {
    /// Each attacker plays its own one-on-one game at the true speed.
    OneVsOne,
    /// Two-attacker equilibrium at the true speed with a fixed Runner.
    TwoVsOne { runner: AttackerId },
    /// Two-attacker equilibrium at the true speed for the capture order the
    /// Turret prefers.
    TwoVsOneBest,
    /// Two-attacker equilibrium at `ν_slow`, played against a Turret on the
    /// near boundary of the 2v1 overlap.
    TwoVsOneSlow,
    /// Slow speed with the fast one-on-one heading.
    SsFh,
    /// `TwoVsOneSlow` while `d2 < d1`, otherwise `SsFh`.
    ForcingSwitch,
    /// Seeded random switching between `TwoVsOneSlow` and `SsFh`.
    RandomSwitch {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        interval: Option<f64>,
    },
    /// `evader` drifts sideways while it keeps a one-on-one margin, then
    /// plays its one-on-one game; the other attacker plays one-on-one.
    Punish {
        evader: AttackerId,
        #[serde(default)]
        margin: Option<f64>,
    },
    /// `SsFh` until the Turret reaches the fast 1v1 overlap, then
    /// `TwoVsOneBest` at the true speed.
    RevealOnOverlap,
}

impl AttackerPolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            AttackerPolicySpec::OneVsOne => "one_vs_one",
            AttackerPolicySpec::TwoVsOne { .. } => "two_vs_one",
            AttackerPolicySpec::TwoVsOneBest => "two_vs_one_best",
            AttackerPolicySpec::TwoVsOneSlow => "two_vs_one_slow",
            AttackerPolicySpec::SsFh => "ss_fh",
            AttackerPolicySpec::ForcingSwitch => "forcing_switch",
            AttackerPolicySpec::RandomSwitch { .. } => "random_switch",
            AttackerPolicySpec::Punish { .. } => "punish",
            AttackerPolicySpec::RevealOnOverlap => "reveal_on_overlap",
        }
    }

    /// Policies that never move faster than `ν_slow` and never read the true
    /// speed while both attackers are in play.
    pub fn is_information_limiting(&self) -> bool {
        matches!(
            self,
            AttackerPolicySpec::TwoVsOneSlow
                | AttackerPolicySpec::SsFh
                | AttackerPolicySpec::ForcingSwitch
                | AttackerPolicySpec::RandomSwitch { .. }
        )
    }

    pub fn needs_regions(&self) -> bool {
        matches!(
            self,
            AttackerPolicySpec::TwoVsOneSlow
                | AttackerPolicySpec::ForcingSwitch
                | AttackerPolicySpec::RandomSwitch { .. }
        )
    }
}

/// Both attackers: slow speed, heading of the fast one-on-one game.
pub fn ss_fh<T: Scalar>(state: &GameState<T>, p: &SpeedParams<T>) -> [AttackerControl<T>; 2] {
    let theta_t = state.theta_t.value();
    state.attackers.map(|a| {
        let h = attacker_1v1_heading(a.r, a.rel_angle(theta_t), p.nu_fast);
        AttackerControl::new(p.nu_slow, h.heading)
    })
}

fn one_v_one_all<T: Scalar>(state: &GameState<T>, nu: T) -> [AttackerControl<T>; 2] {
    let theta_t = state.theta_t.value();
    let mut out = [AttackerControl::idle(); 2];
    for id in AttackerId::BOTH {
        if state.is_alive(id) {
            let a = state.attacker(id);
            out[id.index()] = attacker_1v1_heading(a.r, a.rel_angle(theta_t), nu);
        }
    }
    out
}

fn assign<T: Scalar>(
    order: CaptureOrder,
    (runner, penetrator): (AttackerControl<T>, AttackerControl<T>),
) -> [AttackerControl<T>; 2] {
    let mut out = [AttackerControl::idle(); 2];
    out[order.runner().index()] = runner;
    out[order.penetrator().index()] = penetrator;
    out
}

/// Two-attacker equilibrium controls; if the Runner cannot be captured the
/// attackers play their one-on-one games instead.
pub fn two_vs_one<T: Scalar>(
    state: &GameState<T>,
    order: CaptureOrder,
    nu: T,
) -> [AttackerControl<T>; 2] {
    match attacker_2v1_controls(state, order, nu) {
        Ok(c) => assign(order, c),
        Err(e) => {
            debug!("2v1 controls unavailable ({e}); playing 1v1");
            one_v_one_all(state, nu)
        }
    }
}

/// Capture order with the smaller two-attacker value, i.e. the order the
/// Turret would pick.
pub fn turret_preferred_order<T: Scalar>(state: &GameState<T>, nu: T) -> CaptureOrder {
    let value = |o: CaptureOrder| v_2v1(state, o, nu).unwrap_or(T::infinity());
    let [o12, o21] = CaptureOrder::BOTH;
    if value(o21) < value(o12) {
        o21
    } else {
        o12
    }
}

/// Order whose slow region boundary is the near edge of the 2v1 overlap.
///
/// The overlap is bounded on the Turret's side by the region the Turret is
/// farther from, measured toward the overlap.
fn binding_slow_order<T: Scalar>(
    theta_t: T,
    b: &RegionBundle<T>,
    side: Direction,
) -> CaptureOrder {
    let dist = |o: CaptureOrder| {
        let set = b.r_2v1(o, false);
        if set.contains(theta_t) {
            T::zero()
        } else {
            set.boundary_distance(theta_t, side)
        }
    };
    let [o12, o21] = CaptureOrder::BOTH;
    if dist(o21) > dist(o12) {
        o21
    } else {
        o12
    }
}

/// Slow two-attacker play that keeps the near edge of the 2v1 overlap moving
/// away from the Turret.
///
/// The equilibrium is evaluated for a fictitious Turret sitting on that edge:
/// that is the state whose value is held at zero. Without an overlap the
/// actual Turret is used with its preferred order.
pub fn two_vs_one_slow<T: Scalar>(ctx: &PolicyContext<'_, T>) -> [AttackerControl<T>; 2] {
    let p = ctx.params;
    if let (Some(b), Some(d)) = (ctx.regions, ctx.distances) {
        if let (Some(theta_b2), Some(side)) = (d.theta_b2, d.side2) {
            let theta_t = ctx.state.theta_t.value();
            let order = binding_slow_order(theta_t, b, side);
            let mut probe = *ctx.state;
            probe.theta_t = theta_b2.into();
            if let Ok(c) = attacker_2v1_controls(&probe, order, p.nu_slow) {
                return assign(order, c);
            }
            debug!("2v1 slow controls unavailable at the overlap edge; using SS-FH");
            return ss_fh(ctx.state, p);
        }
    }
    let order = turret_preferred_order(ctx.state, p.nu_slow);
    match attacker_2v1_controls(ctx.state, order, p.nu_slow) {
        Ok(c) => assign(order, c),
        Err(_) => ss_fh(ctx.state, p),
    }
}

/// Switch rule that keeps the Turret out of both overlap reachability sets.
pub fn forcing_switch<T: Scalar>(ctx: &PolicyContext<'_, T>) -> [AttackerControl<T>; 2] {
    match ctx.distances {
        Some(d) if d.d2 < d.d1 => two_vs_one_slow(ctx),
        _ => ss_fh(ctx.state, ctx.params),
    }
}

/// Turn toward `target` at full rate, stopping when aligned.
pub fn turn_toward<T: Scalar>(theta_t: T, target: T) -> T {
    let d = signed_diff(target, theta_t);
    if d == T::zero() {
        T::zero()
    } else {
        sgn(d)
    }
}

fn pursue<T: Scalar>(state: &GameState<T>, id: AttackerId) -> T {
    let target = if state.is_alive(id) { id } else { id.other() };
    turret_1v1_rate(state.attacker(target).rel_angle(state.theta_t.value()))
}

/// Stateful Turret controller built from a [`TurretPolicySpec`].
#[derive(Debug, Clone)]
pub struct TurretController<T: Scalar> {
    spec: TurretPolicySpec,
    rng: ChaCha8Rng,
    interval: T,
    next_draw: T,
    current: T,
    revealed: bool,
}

impl<T: Scalar> TurretController<T> {
    pub fn new(spec: TurretPolicySpec, default_seed: u64) -> Self {
        let (seed, interval) = match spec {
            TurretPolicySpec::RandomWalk { seed, interval } => (
                seed.unwrap_or(default_seed),
                interval.unwrap_or(RANDOM_WALK_INTERVAL),
            ),
            _ => (default_seed, RANDOM_WALK_INTERVAL),
        };
        TurretController {
            spec,
            rng: ChaCha8Rng::seed_from_u64(seed),
            interval: T::lit(interval),
            next_draw: T::zero(),
            current: T::zero(),
            revealed: false,
        }
    }

    pub fn spec(&self) -> &TurretPolicySpec {
        &self.spec
    }

    /// Turret rate in `[-1, 1]` for the current step.
    pub fn omega(&mut self, ctx: &PolicyContext<'_, T>) -> T {
        let st = ctx.state;
        let theta_t = st.theta_t.value();
        if st.alive_count() == 0 {
            return T::zero();
        }
        match self.spec {
            TurretPolicySpec::Pursue { target } => pursue(st, target),
            TurretPolicySpec::Committed { direction } => match ctx.survivor() {
                None => direction.sign(),
                Some(id) => pursue(st, id),
            },
            TurretPolicySpec::SeekR1v1 | TurretPolicySpec::SeekR2v1 => {
                let d = match ctx.distances {
                    Some(d) => d,
                    None => return T::zero(),
                };
                let (dist, b) = if self.spec == TurretPolicySpec::SeekR1v1 {
                    (d.d1, d.theta_b1)
                } else {
                    (d.d2, d.theta_b2)
                };
                match b {
                    Some(b) if dist > T::zero() => turn_toward(theta_t, b),
                    _ => T::zero(),
                }
            }
            TurretPolicySpec::RandomWalk { .. } => {
                while st.t >= self.next_draw {
                    self.current = if self.rng.gen::<bool>() { T::one() } else { -T::one() };
                    self.next_draw += self.interval;
                }
                self.current
            }
            TurretPolicySpec::Hold => T::zero(),
            TurretPolicySpec::AvoidDilemma { runner } => {
                if let Some(id) = ctx.survivor() {
                    return pursue(st, id);
                }
                let limit = ctx.params.nu_slow * (T::one() + T::lit(1e-9));
                if ctx.observed.iter().any(|c| c.speed > limit) {
                    self.revealed = true;
                }
                if !self.revealed {
                    return pursue(st, runner);
                }
                let nf = ctx.params.nu_fast;
                let wins = |id: AttackerId| region_1v1(st.attacker(id), nf).contains(theta_t);
                if !wins(runner) && wins(runner.other()) {
                    pursue(st, runner.other())
                } else {
                    pursue(st, runner)
                }
            }
        }
    }
}

/// Stateful attacker controller built from an [`AttackerPolicySpec`].
#[derive(Debug, Clone)]
pub struct AttackerController<T: Scalar> {
    spec: AttackerPolicySpec,
    rng: ChaCha8Rng,
    interval: T,
    next_draw: T,
    use_2v1: bool,
    revealed: bool,
}

impl<T: Scalar> AttackerController<T> {
    pub fn new(spec: AttackerPolicySpec, default_seed: u64) -> Self {
        let (seed, interval) = match spec {
            AttackerPolicySpec::RandomSwitch { seed, interval } => (
                seed.unwrap_or(default_seed),
                interval.unwrap_or(RANDOM_WALK_INTERVAL),
            ),
            _ => (default_seed, RANDOM_WALK_INTERVAL),
        };
        AttackerController {
            spec,
            // offset so Turret and attackers never share a stream
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15),
            interval: T::lit(interval),
            next_draw: T::zero(),
            use_2v1: false,
            revealed: false,
        }
    }

    pub fn spec(&self) -> &AttackerPolicySpec {
        &self.spec
    }

    /// Controls for both attackers; removed attackers get idle controls.
    pub fn controls(&mut self, ctx: &PolicyContext<'_, T>) -> [AttackerControl<T>; 2] {
        let st = ctx.state;
        if st.alive_count() < 2 {
            return one_v_one_all(st, ctx.true_nu());
        }
        let p = ctx.params;
        match self.spec {
            AttackerPolicySpec::OneVsOne => one_v_one_all(st, ctx.true_nu()),
            AttackerPolicySpec::TwoVsOne { runner } => {
                two_vs_one(st, CaptureOrder::runner_first(runner), ctx.true_nu())
            }
            AttackerPolicySpec::TwoVsOneBest => {
                let nu = ctx.true_nu();
                two_vs_one(st, turret_preferred_order(st, nu), nu)
            }
            AttackerPolicySpec::TwoVsOneSlow => two_vs_one_slow(ctx),
            AttackerPolicySpec::SsFh => ss_fh(st, p),
            AttackerPolicySpec::ForcingSwitch => forcing_switch(ctx),
            AttackerPolicySpec::RandomSwitch { .. } => {
                while st.t >= self.next_draw {
                    self.use_2v1 = self.rng.gen::<bool>();
                    self.next_draw += self.interval;
                }
                if self.use_2v1 {
                    two_vs_one_slow(ctx)
                } else {
                    ss_fh(st, p)
                }
            }
            AttackerPolicySpec::Punish { evader, margin } => {
                let nu = ctx.true_nu();
                let mut out = one_v_one_all(st, nu);
                let a = st.attacker(evader);
                let rel = a.rel_angle(st.theta_t.value());
                let m = T::lit(margin.unwrap_or(0.05));
                if v_1v1(a.r, rel, nu).map(|v| v > m).unwrap_or(false) {
                    out[evader.index()] = AttackerControl::new(nu, sgn(rel) * T::FRAC_PI_2());
                }
                out
            }
            AttackerPolicySpec::RevealOnOverlap => {
                if !self.revealed {
                    let theta_t = st.theta_t.value();
                    let inside = AttackerId::BOTH
                        .iter()
                        .all(|&id| region_1v1(st.attacker(id), p.nu_fast).contains(theta_t));
                    self.revealed = inside;
                }
                if self.revealed {
                    let nu = ctx.true_nu();
                    two_vs_one(st, turret_preferred_order(st, nu), nu)
                } else {
                    ss_fh(st, p)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::AttackerPolar;

    fn ctx<'a>(
        st: &'a GameState<f64>,
        p: &'a SpeedParams<f64>,
        true_speed: SpeedClass,
    ) -> PolicyContext<'a, f64> {
        PolicyContext {
            state: st,
            params: p,
            true_speed,
            regions: None,
            distances: None,
            observed: [AttackerControl::idle(); 2],
        }
    }

    #[test]
    fn ss_fh_is_slow_with_fast_heading() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(2.0, 0.8), AttackerPolar::new(1.6, -0.4));
        let c = ss_fh(&st, &p);
        assert_eq!(c[0].speed, 0.25);
        assert!((c[0].heading.sin() - 0.35).abs() < 1e-15);
        assert!((c[1].heading.sin() + 0.7 / 1.6).abs() < 1e-15);
        let mut ctl = AttackerController::new(AttackerPolicySpec::SsFh, 1);
        let a = ctl.controls(&ctx(&st, &p, SpeedClass::Slow));
        let b = ctl.controls(&ctx(&st, &p, SpeedClass::Fast));
        assert_eq!(a, b);
    }

    #[test]
    fn pursue_turns_toward_ccw_attacker() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(2.0, 0.8), AttackerPolar::new(1.6, -0.4));
        let mut t = TurretController::new(TurretPolicySpec::Pursue { target: AttackerId::A1 }, 0);
        assert_eq!(t.omega(&ctx(&st, &p, SpeedClass::Slow)), 1.0);
        let mut t = TurretController::new(TurretPolicySpec::Pursue { target: AttackerId::A2 }, 0);
        assert_eq!(t.omega(&ctx(&st, &p, SpeedClass::Slow)), -1.0);
    }

    #[test]
    fn seek_without_regions_holds() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(2.0, 0.8), AttackerPolar::new(1.6, -0.4));
        let mut t = TurretController::new(TurretPolicySpec::SeekR1v1, 0);
        assert_eq!(t.omega(&ctx(&st, &p, SpeedClass::Slow)), 0.0);
    }

    #[test]
    fn random_walk_is_seeded() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let mut st = GameState::new(0.0, AttackerPolar::new(2.0, 0.8), AttackerPolar::new(1.6, -0.4));
        let spec = TurretPolicySpec::RandomWalk {
            seed: Some(42),
            interval: None,
        };
        let run = |st: &mut GameState<f64>| {
            let mut t = TurretController::new(spec, 0);
            (0..200)
                .map(|k| {
                    st.t = k as f64 * 0.01;
                    t.omega(&ctx(st, &p, SpeedClass::Slow))
                })
                .collect::<Vec<_>>()
        };
        let a = run(&mut st);
        let b = run(&mut st);
        assert_eq!(a, b);
        assert!(a.iter().all(|w| w.abs() == 1.0));
        assert!(a.contains(&1.0) && a.contains(&-1.0));
    }

    #[test]
    fn survivor_plays_one_on_one_at_true_speed() {
        let p = SpeedParams::new(0.25_f64, 0.7).unwrap();
        let mut st = GameState::new(0.0, AttackerPolar::new(2.0, 0.8), AttackerPolar::new(1.6, -0.4));
        st.alive = [false, true];
        let mut ctl = AttackerController::new(AttackerPolicySpec::SsFh, 1);
        let c = ctl.controls(&ctx(&st, &p, SpeedClass::Fast));
        assert_eq!(c[1].speed, 0.7);
        assert_eq!(c[0], AttackerControl::idle());
    }

    #[test]
    fn policy_specs_parse() {
        let t: TurretPolicySpec = serde_json::from_str(r#"{"kind":"random_walk","seed":3}"#).unwrap();
        assert_eq!(t.name(), "random_walk");
        let a: AttackerPolicySpec = serde_json::from_str(r#"{"kind":"forcing_switch"}"#).unwrap();
        assert!(a.is_information_limiting());
        assert!(serde_json::from_str::<AttackerPolicySpec>(r#"{"kind":"teleport"}"#).is_err());
    }
}
