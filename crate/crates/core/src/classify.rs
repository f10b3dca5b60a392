//! Case taxonomy: which of the no-dilemma, dilemma, avoid-dilemma or
//! force-dilemma situations a state is in.

use serde::{Deserialize, Serialize};

use crate::circle::Direction;
use crate::error::{GameError, Result};
use crate::regions::{build_regions, RegionBundle};
use crate::scalar::Scalar;
use crate::sim::{simulate, SimConfig};
use crate::state::{GameState, SpeedClass, SpeedParams};
use crate::strategies::{AttackerPolicySpec, TurretPolicySpec};
use crate::two_v_one::{order_geometry, CaptureOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    GuaranteedTwoCaptures,
    UncapturableSlow,
    UncapturableFast,
    InconsequentialSpeed,
    MatchingDirections,
    GuaranteedDilemma,
    AvoidDilemma,
    ForceDilemma,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 8] = [
        CaseLabel::GuaranteedTwoCaptures,
        CaseLabel::UncapturableSlow,
        CaseLabel::UncapturableFast,
        CaseLabel::InconsequentialSpeed,
        CaseLabel::MatchingDirections,
        CaseLabel::GuaranteedDilemma,
        CaseLabel::AvoidDilemma,
        CaseLabel::ForceDilemma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::GuaranteedTwoCaptures => "GuaranteedTwoCaptures",
            CaseLabel::UncapturableSlow => "UncapturableSlow",
            CaseLabel::UncapturableFast => "UncapturableFast",
            CaseLabel::InconsequentialSpeed => "InconsequentialSpeed",
            CaseLabel::MatchingDirections => "MatchingDirections",
            CaseLabel::GuaranteedDilemma => "GuaranteedDilemma",
            CaseLabel::AvoidDilemma => "AvoidDilemma",
            CaseLabel::ForceDilemma => "ForceDilemma",
        }
    }

    /// Labels in which the Turret faces the speed-guessing problem at all.
    pub fn is_dilemma_family(self) -> bool {
        matches!(
            self,
            CaseLabel::GuaranteedDilemma | CaseLabel::AvoidDilemma | CaseLabel::ForceDilemma
        )
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown label `{s}`"))
    }
}

/// Every membership the decision list consults, for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Memberships {
    pub in_u2_fast: bool,
    pub in_u1_slow: bool,
    pub in_u1_fast: bool,
    pub in_u2_slow: bool,
    /// `θ_T ∈ ℛ_{Ai,Aj}(slow) ∩ ℛ_{Ai}(fast)`, indexed like `CaptureOrder::BOTH`.
    pub matching: [bool; 2],
    /// `θ_T ∈ ℛ_{Ai,Aj}(slow) ∩ ℛ_{Aj}(fast)`, indexed like `CaptureOrder::BOTH`.
    pub mismatch: [bool; 2],
    pub i2_slow_empty: bool,
    pub i1_fast_empty: bool,
    pub in_r1v1: bool,
    pub in_r2v1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: CaseLabel,
    /// Capture order behind the label: the matching order for
    /// `MatchingDirections`, the slow two-attacker order of the mismatched
    /// overlap for the dilemma labels.
    pub witness: Option<CaptureOrder>,
    pub memberships: Memberships,
}

/// Compute the memberships of `θ_T` in every set of `bundle`.
pub fn memberships<T: Scalar>(theta_t: T, b: &RegionBundle<T>) -> Memberships {
    let mut m = Memberships {
        in_u2_fast: b.u2_fast.contains(theta_t),
        in_u1_slow: b.u1_slow.contains(theta_t),
        in_u1_fast: b.u1_fast.contains(theta_t),
        in_u2_slow: b.u2_slow.contains(theta_t),
        i2_slow_empty: b.i2_slow.is_empty(),
        i1_fast_empty: b.i1_fast.is_empty(),
        in_r1v1: b.r1v1.contains(theta_t),
        in_r2v1: b.r2v1.contains(theta_t),
        ..Default::default()
    };
    for (k, order) in CaptureOrder::BOTH.into_iter().enumerate() {
        let slow = b.r_2v1(order, false).contains(theta_t);
        m.matching[k] = slow && b.r_1v1(order.runner(), true).contains(theta_t);
        m.mismatch[k] = slow && b.r_1v1(order.penetrator(), true).contains(theta_t);
    }
    m
}

/// Apply the ordered decision list to precomputed memberships.
pub fn decide(m: &Memberships) -> (CaseLabel, Option<CaptureOrder>) {
    let [o12, o21] = CaptureOrder::BOTH;
    let pick = |flags: [bool; 2]| {
        if flags[0] {
            Some(o12)
        } else if flags[1] {
            Some(o21)
        } else {
            None
        }
    };
    if m.in_u2_fast {
        return (CaseLabel::GuaranteedTwoCaptures, None);
    }
    if !m.in_u1_slow {
        return (CaseLabel::UncapturableSlow, None);
    }
    if !m.in_u1_fast {
        return (CaseLabel::UncapturableFast, None);
    }
    if !m.in_u2_slow {
        return (CaseLabel::InconsequentialSpeed, None);
    }
    if let Some(o) = pick(m.matching) {
        return (CaseLabel::MatchingDirections, Some(o));
    }
    let witness = pick(m.mismatch);
    debug_assert!(witness.is_some(), "dilemma branch without a mismatched order");
    debug_assert!(!m.in_r2v1, "Turret inside the 2v1 overlap without matching");
    if m.i2_slow_empty && m.i1_fast_empty {
        (CaseLabel::GuaranteedDilemma, witness)
    } else if m.in_r1v1 {
        (CaseLabel::AvoidDilemma, witness)
    } else {
        (CaseLabel::ForceDilemma, witness)
    }
}

pub fn classify_with<T: Scalar>(state: &GameState<T>, bundle: &RegionBundle<T>) -> Classification {
    let memberships = memberships(state.theta_t.value(), bundle);
    let (label, witness) = decide(&memberships);
    Classification {
        label,
        witness,
        memberships,
    }
}

/// Label `state` for the speed pair `p`.
pub fn classify<T: Scalar>(state: &GameState<T>, p: &SpeedParams<T>) -> Classification {
    classify_with(state, &build_regions(state, p))
}

/// Payoffs when the Turret commits to a direction at the start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenLoopTable {
    /// Toward the Runner of the slow two-attacker order.
    pub aggressive_direction: Direction,
    /// `J` for (slow, fast) attackers when the Turret turns toward the Runner.
    pub aggressive: [u32; 2],
    /// `J` for (slow, fast) attackers when the Turret turns the other way.
    pub conservative: [u32; 2],
}

/// Simulate the four open-loop commitments from a guaranteed-dilemma state.
///
/// The attackers answer each commitment with a complete-information reply:
/// the two-attacker equilibrium with the attacker the Turret turns toward as
/// Runner, except that fast attackers facing the aggressive turn let that
/// attacker evade and buy time for the other one.
pub fn open_loop_matrix<T: Scalar>(
    state: &GameState<T>,
    p: &SpeedParams<T>,
    dt: T,
    t_max: T,
) -> Result<OpenLoopTable> {
    let c = classify(state, p);
    let order = match (c.label, c.witness) {
        (CaseLabel::GuaranteedDilemma, Some(o)) => o,
        (label, _) => {
            return Err(GameError::Precondition(format!(
                "open-loop table needs a GuaranteedDilemma state, got {label}"
            )))
        }
    };
    let ai = order.runner();
    let aj = order.penetrator();
    let aggressive = order_geometry(
        state.theta_t.value(),
        state.attacker(ai).theta.value(),
        state.attacker(aj).theta.value(),
    )
    .toward_runner;
    let run = |dir: Direction, speed: SpeedClass, attackers: AttackerPolicySpec| {
        let mut cfg = SimConfig::new(
            *state,
            *p,
            speed,
            TurretPolicySpec::Committed { direction: dir },
            attackers,
        );
        cfg.dt = dt;
        cfg.t_max = t_max;
        simulate(&cfg).map(|tr| tr.payoff)
    };
    let conservative = aggressive.reversed();
    Ok(OpenLoopTable {
        aggressive_direction: aggressive,
        aggressive: [
            run(aggressive, SpeedClass::Slow, AttackerPolicySpec::TwoVsOne { runner: ai })?,
            run(
                aggressive,
                SpeedClass::Fast,
                AttackerPolicySpec::Punish {
                    evader: ai,
                    margin: None,
                },
            )?,
        ],
        conservative: [
            run(conservative, SpeedClass::Slow, AttackerPolicySpec::TwoVsOne { runner: aj })?,
            run(conservative, SpeedClass::Fast, AttackerPolicySpec::TwoVsOne { runner: aj })?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::AttackerPolar;

    #[test]
    fn decision_list_is_ordered() {
        let mut m = Memberships {
            in_u2_fast: true,
            ..Default::default()
        };
        assert_eq!(decide(&m).0, CaseLabel::GuaranteedTwoCaptures);
        m.in_u2_fast = false;
        assert_eq!(decide(&m).0, CaseLabel::UncapturableSlow);
        m.in_u1_slow = true;
        assert_eq!(decide(&m).0, CaseLabel::UncapturableFast);
        m.in_u1_fast = true;
        assert_eq!(decide(&m).0, CaseLabel::InconsequentialSpeed);
        m.in_u2_slow = true;
        m.matching = [false, true];
        assert_eq!(decide(&m), (CaseLabel::MatchingDirections, Some(CaptureOrder::BOTH[1])));
        m.matching = [false, false];
        m.mismatch = [true, false];
        m.i1_fast_empty = true;
        m.i2_slow_empty = true;
        assert_eq!(decide(&m).0, CaseLabel::GuaranteedDilemma);
        m.i1_fast_empty = false;
        assert_eq!(decide(&m).0, CaseLabel::ForceDilemma);
        m.in_r1v1 = true;
        assert_eq!(decide(&m).0, CaseLabel::AvoidDilemma);
    }

    #[test]
    fn label_round_trips_through_str() {
        for l in CaseLabel::ALL {
            assert_eq!(l.as_str().parse::<CaseLabel>().unwrap(), l);
        }
    }

    #[test]
    fn aligned_attackers_are_two_captures() {
        let p = SpeedParams::new(0.2_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(3.0, 0.05), AttackerPolar::new(3.0, -0.05));
        assert_eq!(classify(&st, &p).label, CaseLabel::GuaranteedTwoCaptures);
    }

    #[test]
    fn attackers_on_perimeter_are_uncapturable() {
        let p = SpeedParams::new(0.2_f64, 0.7).unwrap();
        let st = GameState::new(0.0, AttackerPolar::new(1.0, 1.0), AttackerPolar::new(1.0, -1.0));
        assert_eq!(classify(&st, &p).label, CaseLabel::UncapturableSlow);
    }
}
