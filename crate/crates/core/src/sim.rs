//! Fixed-step integration of the game with capture/breach detection and
//! per-step logging of the overlap distances.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::circle::signed_diff;
use crate::error::{GameError, Result};
use crate::regions::{build_regions, dilemma_distances, DilemmaDistances, RegionBundle};
use crate::scalar::Scalar;
use crate::state::{AttackerControl, AttackerId, GameState, SpeedClass, SpeedParams};
use crate::strategies::{
    AttackerController, AttackerPolicySpec, PolicyContext, TurretController, TurretPolicySpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative angle below which an attacker counts as captured.
    #[serde(default = "Tolerances::default_cap")]
    pub eps_cap: f64,
    /// Radius margin above 1 that already counts as a breach.
    #[serde(default = "Tolerances::default_breach")]
    pub eps_breach: f64,
}

impl Tolerances {
    fn default_cap() -> f64 {
        1e-6
    }

    fn default_breach() -> f64 {
        1e-9
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_cap: Self::default_cap(),
            eps_breach: Self::default_breach(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T: Scalar> {
    pub initial: GameState<T>,
    pub params: SpeedParams<T>,
    pub true_speed: SpeedClass,
    pub turret: TurretPolicySpec,
    pub attackers: AttackerPolicySpec,
    pub dt: T,
    pub t_max: T,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Compute regions and `d1`, `d2` every step even if no policy needs them.
    pub track_regions: bool,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(
        initial: GameState<T>,
        params: SpeedParams<T>,
        true_speed: SpeedClass,
        turret: TurretPolicySpec,
        attackers: AttackerPolicySpec,
    ) -> Self {
        SimConfig {
            initial,
            params,
            true_speed,
            turret,
            attackers,
            dt: T::lit(1e-3),
            t_max: T::lit(50.0),
            seed: 0,
            tolerances: Tolerances::default(),
            track_regions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !pos(self.dt) || !pos(self.t_max) {
            return Err(GameError::InvalidConfig("dt and t_max must be positive".into()));
        }
        if !(self.tolerances.eps_cap > 0.0 && self.tolerances.eps_breach > 0.0) {
            return Err(GameError::InvalidConfig("tolerances must be positive".into()));
        }
        for (a, alive) in self.initial.attackers.iter().zip(self.initial.alive) {
            if alive && a.r < T::one() {
                return Err(GameError::Precondition(format!(
                    "attacker starts inside the target (r = {})",
                    a.r
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Capture { attacker: AttackerId, t: f64 },
    Breach { attacker: AttackerId, t: f64 },
    RegionVanished { region: RegionName, t: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Capture { t, .. } | Event::Breach { t, .. } | Event::RegionVanished { t, .. } => t,
        }
    }

    pub fn is_removal(&self) -> bool {
        !matches!(self, Event::RegionVanished { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionName {
    R1v1,
    R2v1,
}

/// One logged step: the state at `t` and the controls applied from `t` to `t + dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row<T: Scalar> {
    pub state: GameState<T>,
    pub omega: T,
    pub controls: [AttackerControl<T>; 2],
    pub distances: Option<DilemmaDistances<T>>,
    pub r1v1_measure: T,
    pub r2v1_measure: T,
}

impl<T: Scalar> Row<T> {
    pub fn d1(&self) -> T {
        self.distances.map_or(T::infinity(), |d| d.d1)
    }

    pub fn d2(&self) -> T {
        self.distances.map_or(T::infinity(), |d| d.d2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub rows: Vec<Row<T>>,
    pub events: Vec<Event>,
    /// Number of breaches.
    pub payoff: u32,
    /// Time of the last removal, or the horizon.
    pub t_final: T,
    /// Some attacker was still in play at `t_max`.
    pub horizon_exceeded: bool,
}

/// Summary written next to the trajectory table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub events: Vec<Event>,
    #[serde(rename = "J")]
    pub payoff: u32,
    pub t_final: f64,
    pub horizon_exceeded: bool,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "t", "theta_T", "r_A1", "theta_A1", "r_A2", "theta_A2", "omega_T", "v_A1", "phi_A1", "v_A2",
    "phi_A2", "d1", "d2", "theta_B1", "theta_B2",
];

impl<T: Scalar> Trajectory<T> {
    pub fn first_removal_time(&self) -> Option<f64> {
        self.events.iter().find(|e| e.is_removal()).map(Event::time)
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            events: self.events.clone(),
            payoff: self.payoff,
            t_final: self.t_final.to_f64_lossy(),
            horizon_exceeded: self.horizon_exceeded,
        }
    }

    /// Write the table as CSV; every line of `preamble` is emitted as a `#` comment first.
    pub fn write_csv<W: Write>(&self, mut w: W, preamble: &[String]) -> io::Result<()> {
        for line in preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
        let opt = |x: Option<T>| x.map_or(f64::NAN, |v| v.to_f64_lossy());
        for row in &self.rows {
            let s = &row.state;
            let d = row.distances;
            let vals = [
                s.t.to_f64_lossy(),
                s.theta_t.value().to_f64_lossy(),
                s.attackers[0].r.to_f64_lossy(),
                s.attackers[0].theta.value().to_f64_lossy(),
                s.attackers[1].r.to_f64_lossy(),
                s.attackers[1].theta.value().to_f64_lossy(),
                row.omega.to_f64_lossy(),
                row.controls[0].speed.to_f64_lossy(),
                row.controls[0].heading.to_f64_lossy(),
                row.controls[1].speed.to_f64_lossy(),
                row.controls[1].heading.to_f64_lossy(),
                row.d1().to_f64_lossy(),
                row.d2().to_f64_lossy(),
                opt(d.and_then(|d| d.theta_b1)),
                opt(d.and_then(|d| d.theta_b2)),
            ];
            let line: Vec<String> = vals.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Deriv<T> {
    theta_t: T,
    r: [T; 2],
    theta: [T; 2],
}

fn deriv<T: Scalar>(
    r: [T; 2],
    omega: T,
    c: &[AttackerControl<T>; 2],
    alive: [bool; 2],
) -> Deriv<T> {
    let mut d = Deriv {
        theta_t: omega,
        r: [T::zero(); 2],
        theta: [T::zero(); 2],
    };
    for k in 0..2 {
        if alive[k] {
            d.r[k] = -c[k].speed * c[k].heading.cos();
            d.theta[k] = c[k].speed * c[k].heading.sin() / r[k];
        }
    }
    d
}

/// Advance one step with fourth-order Runge–Kutta, controls held constant.
///
/// `θ̇_T = ω`, `ṙ = −v cos φ`, `θ̇ = v sin φ / r`. Removed attackers stay put.
pub fn step<T: Scalar>(
    state: &GameState<T>,
    omega: T,
    controls: &[AttackerControl<T>; 2],
    dt: T,
) -> GameState<T> {
    let alive = state.alive;
    let r0 = [state.attackers[0].r, state.attackers[1].r];
    let h = T::half() * dt;
    let add = |k: &Deriv<T>, s: T| [r0[0] + s * k.r[0], r0[1] + s * k.r[1]];
    let k1 = deriv(r0, omega, controls, alive);
    let k2 = deriv(add(&k1, h), omega, controls, alive);
    let k3 = deriv(add(&k2, h), omega, controls, alive);
    let k4 = deriv(add(&k3, dt), omega, controls, alive);
    let six = T::lit(6.0);
    let comb = |a: T, b: T, c: T, d: T| dt * (a + T::two() * b + T::two() * c + d) / six;
    let mut out = *state;
    out.theta_t = state
        .theta_t
        .rotated(comb(k1.theta_t, k2.theta_t, k3.theta_t, k4.theta_t));
    for k in 0..2 {
        if alive[k] {
            let a = &mut out.attackers[k];
            a.r = r0[k] + comb(k1.r[k], k2.r[k], k3.r[k], k4.r[k]);
            a.theta = a
                .theta
                .rotated(comb(k1.theta[k], k2.theta[k], k3.theta[k], k4.theta[k]));
        }
    }
    out.t = state.t + dt;
    out
}

/// Capture and breach events between two consecutive states.
///
/// Captures are sign changes of the relative angle (away from the antipode)
/// or a relative angle within `eps_cap`; breaches are crossings of `r = 1`.
/// Times are linearly interpolated and a capture wins ties.
pub fn detect_events<T: Scalar>(
    prev: &GameState<T>,
    next: &GameState<T>,
    tol: &Tolerances,
) -> Vec<Event> {
    let dt = next.t - prev.t;
    let half_pi = T::FRAC_PI_2();
    let eps_cap = T::lit(tol.eps_cap);
    let eps_breach = T::lit(tol.eps_breach);
    let mut out = Vec::new();
    for id in AttackerId::BOTH {
        if !prev.is_alive(id) {
            continue;
        }
        let a0 = prev.attacker(id);
        let a1 = next.attacker(id);
        let rel0 = signed_diff(a0.theta.value(), prev.theta_t.value());
        let rel1 = signed_diff(a1.theta.value(), next.theta_t.value());
        let capture = if rel1.abs() <= eps_cap {
            let f = if rel0 == rel1 { T::one() } else { rel0 / (rel0 - rel1) };
            Some(f.max(T::zero()).min(T::one()))
        } else if rel0.abs() < half_pi && rel1.abs() < half_pi && (rel0 < T::zero()) != (rel1 < T::zero()) {
            Some(rel0 / (rel0 - rel1))
        } else {
            None
        };
        let breach = if a1.r <= T::one() + eps_breach {
            let f = if a0.r == a1.r {
                T::one()
            } else {
                (a0.r - T::one()) / (a0.r - a1.r)
            };
            Some(f.max(T::zero()).min(T::one()))
        } else {
            None
        };
        let at = |f: T| (prev.t + f * dt).to_f64_lossy();
        match (capture, breach) {
            (Some(fc), Some(fb)) if fb < fc => out.push(Event::Breach { attacker: id, t: at(fb) }),
            (Some(fc), _) => out.push(Event::Capture { attacker: id, t: at(fc) }),
            (None, Some(fb)) => out.push(Event::Breach { attacker: id, t: at(fb) }),
            (None, None) => {}
        }
    }
    out
}

/// Run the configured game until both attackers are removed or `t_max`.
pub fn simulate<T: Scalar>(cfg: &SimConfig<T>) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let p = &cfg.params;
    let mut turret = TurretController::<T>::new(cfg.turret, cfg.seed);
    let mut attackers = AttackerController::<T>::new(cfg.attackers, cfg.seed);
    let want_regions =
        cfg.track_regions || cfg.turret.needs_regions() || cfg.attackers.needs_regions();

    let mut state = cfg.initial;
    let mut rows = Vec::new();
    let mut events = Vec::new();
    let mut observed = [AttackerControl::idle(); 2];
    let mut had = [false, false];
    let mut t_final = cfg.t_max;
    let max_steps = (cfg.t_max / cfg.dt).ceil().to_usize().unwrap_or(usize::MAX);

    for _ in 0..max_steps {
        if state.alive_count() == 0 {
            break;
        }
        let bundle: Option<RegionBundle<T>> =
            (want_regions && state.alive_count() == 2).then(|| build_regions(&state, p));
        let dist = bundle
            .as_ref()
            .map(|b| dilemma_distances(state.theta_t.value(), b));
        let now = [
            bundle.as_ref().is_some_and(|b| !b.r1v1.is_empty()),
            bundle.as_ref().is_some_and(|b| !b.r2v1.is_empty()),
        ];
        for (k, name) in [RegionName::R1v1, RegionName::R2v1].into_iter().enumerate() {
            if had[k] && !now[k] {
                events.push(Event::RegionVanished {
                    region: name,
                    t: state.t.to_f64_lossy(),
                });
            }
            had[k] = now[k];
        }

        let ctx = PolicyContext {
            state: &state,
            params: p,
            true_speed: cfg.true_speed,
            regions: bundle.as_ref(),
            distances: dist.as_ref(),
            observed,
        };
        let omega = turret.omega(&ctx).max(-T::one()).min(T::one());
        let controls = attackers.controls(&ctx);
        rows.push(Row {
            state,
            omega,
            controls,
            distances: dist,
            r1v1_measure: bundle.as_ref().map_or(T::zero(), |b| b.r1v1.measure()),
            r2v1_measure: bundle.as_ref().map_or(T::zero(), |b| b.r2v1.measure()),
        });
        observed = controls;

        let mut next = step(&state, omega, &controls, cfg.dt);
        for e in detect_events(&state, &next, &cfg.tolerances) {
            match e {
                Event::Capture { attacker, .. } | Event::Breach { attacker, .. } => {
                    next.alive[attacker.index()] = false;
                }
                Event::RegionVanished { .. } => {}
            }
            events.push(e);
        }
        state = next;
        if state.alive_count() == 0 {
            t_final = T::lit(events.last().map_or(0.0, Event::time));
        }
    }
    if state.alive_count() < 2 {
        for (k, name) in [RegionName::R1v1, RegionName::R2v1].into_iter().enumerate() {
            if had[k] {
                events.push(Event::RegionVanished {
                    region: name,
                    t: state.t.to_f64_lossy(),
                });
            }
        }
    }
    rows.push(Row {
        state,
        omega: T::zero(),
        controls: [AttackerControl::idle(); 2],
        distances: None,
        r1v1_measure: T::zero(),
        r2v1_measure: T::zero(),
    });
    events.sort_by(|a, b| a.time().total_cmp(&b.time()));
    let payoff = events
        .iter()
        .filter(|e| matches!(e, Event::Breach { .. }))
        .count() as u32;
    Ok(Trajectory {
        rows,
        events,
        payoff,
        t_final,
        horizon_exceeded: state.alive_count() > 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::AttackerPolar;

    fn lone(r: f64, theta: f64) -> GameState<f64> {
        let mut st = GameState::new(0.0, AttackerPolar::new(r, theta), AttackerPolar::new(5.0, 3.0));
        st.alive = [true, false];
        st
    }

    #[test]
    fn turret_rotation_is_exact() {
        let st = lone(2.0, 1.0);
        let n = step(&st, 1.0, &[AttackerControl::idle(); 2], 0.1);
        assert!((n.theta_t.value() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn radial_motion_is_exact() {
        let st = lone(2.0, 1.0);
        let c = [AttackerControl::new(0.5, 0.0), AttackerControl::idle()];
        let n = step(&st, 0.0, &c, 0.1);
        assert!((n.attackers[0].r - 1.95).abs() < 1e-15);
        assert!((n.attackers[0].theta.value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangential_motion_matches_fourth_order() {
        let st = lone(2.0, 0.0);
        let c = [AttackerControl::new(0.5, std::f64::consts::FRAC_PI_2), AttackerControl::idle()];
        let n = step(&st, 0.0, &c, 0.1);
        assert_eq!(n.attackers[0].r, 2.0);
        assert!((n.attackers[0].theta.value() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn capture_interpolates_sign_change() {
        let a = lone(2.0, 0.01);
        let mut b = a;
        b.theta_t = 0.03.into();
        b.t = 0.1;
        let ev = detect_events(&a, &b, &Tolerances::default());
        assert_eq!(ev.len(), 1);
        match ev[0] {
            Event::Capture { attacker, t } => {
                assert_eq!(attacker, AttackerId::A1);
                assert!((t - 0.1 / 3.0).abs() < 1e-12);
            }
            _ => panic!("expected capture"),
        }
    }

    #[test]
    fn earlier_capture_wins_over_breach() {
        let a = lone(1.01, 0.01);
        let mut b = a;
        b.theta_t = 0.03.into();
        b.attackers[0].r = 0.99;
        b.t = 0.1;
        let ev = detect_events(&a, &b, &Tolerances::default());
        assert!(matches!(ev[..], [Event::Capture { .. }]));
        b.theta_t = 0.011.into();
        let ev = detect_events(&a, &b, &Tolerances::default());
        assert!(matches!(ev[..], [Event::Breach { .. }]));
    }

    #[test]
    fn antipodal_wrap_is_not_a_capture() {
        let a = lone(2.0, 3.1);
        let mut b = a;
        b.attackers[0].theta = (-3.1).into();
        b.t = 0.1;
        assert!(detect_events(&a, &b, &Tolerances::default()).is_empty());
    }

    #[test]
    fn rejects_bad_config() {
        let p = SpeedParams::new(0.2_f64, 0.7).unwrap();
        let mut cfg = SimConfig::new(
            lone(2.0, 1.0),
            p,
            SpeedClass::Slow,
            TurretPolicySpec::Hold,
            AttackerPolicySpec::OneVsOne,
        );
        cfg.dt = 0.0;
        assert!(matches!(simulate(&cfg), Err(GameError::InvalidConfig(_))));
        cfg.dt = 1e-3;
        cfg.initial.attackers[0].r = 0.5;
        assert!(matches!(simulate(&cfg), Err(GameError::Precondition(_))));
    }
}
