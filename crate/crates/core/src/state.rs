//! Game state and speed parameterization.

use serde::{Deserialize, Serialize};

use crate::circle::{signed_diff, Angle};
use crate::error::{GameError, Result};
use crate::scalar::Scalar;

/// The two candidate maximum speed ratios the Turret cannot tell apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedParams<T: Scalar> {
    pub nu_slow: T,
    pub nu_fast: T,
}

impl<T: Scalar> SpeedParams<T> {
    pub fn new(nu_slow: T, nu_fast: T) -> Result<Self> {
        let ok = nu_slow > T::zero() && nu_slow < nu_fast && nu_fast <= T::one();
        if !ok {
            return Err(GameError::InvalidSpeeds {
                slow: nu_slow.to_f64_lossy(),
                fast: nu_fast.to_f64_lossy(),
            });
        }
        Ok(SpeedParams { nu_slow, nu_fast })
    }

    /// `ν_slow / ν_fast`, the rate at which an information-limited attacker
    /// can move a fast-game boundary.
    pub fn alpha(&self) -> T {
        self.nu_slow / self.nu_fast
    }

    /// `ν_fast / ν_slow = 1/α`.
    pub fn beta(&self) -> T {
        self.nu_fast / self.nu_slow
    }

    pub fn nu(&self, class: SpeedClass) -> T {
        match class {
            SpeedClass::Slow => self.nu_slow,
            SpeedClass::Fast => self.nu_fast,
        }
    }
}

/// Which of the two candidate speeds is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Slow,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AttackerId {
    A1,
    A2,
}

impl AttackerId {
    pub const BOTH: [AttackerId; 2] = [AttackerId::A1, AttackerId::A2];

    pub fn index(self) -> usize {
        match self {
            AttackerId::A1 => 0,
            AttackerId::A2 => 1,
        }
    }

    pub fn other(self) -> AttackerId {
        match self {
            AttackerId::A1 => AttackerId::A2,
            AttackerId::A2 => AttackerId::A1,
        }
    }
}

impl std::fmt::Display for AttackerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackerId::A1 => write!(f, "A1"),
            AttackerId::A2 => write!(f, "A2"),
        }
    }
}

/// Attacker position in polar coordinates; the target is the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerPolar<T: Scalar> {
    pub r: T,
    pub theta: Angle<T>,
}

impl<T: Scalar> AttackerPolar<T> {
    pub fn new(r: T, theta: T) -> Self {
        AttackerPolar {
            r,
            theta: Angle::new(theta),
        }
    }

    /// `θ_A − θ_T` wrapped to `(-π, π]`.
    pub fn rel_angle(&self, theta_t: T) -> T {
        signed_diff(self.theta.value(), theta_t)
    }
}

/// Full game state: Turret angle, both attackers, who is still in play, and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameState<T: Scalar> {
    pub theta_t: Angle<T>,
    pub attackers: [AttackerPolar<T>; 2],
    pub alive: [bool; 2],
    pub t: T,
}

impl<T: Scalar> GameState<T> {
    pub fn new(theta_t: T, a1: AttackerPolar<T>, a2: AttackerPolar<T>) -> Self {
        GameState {
            theta_t: Angle::new(theta_t),
            attackers: [a1, a2],
            alive: [true, true],
            t: T::zero(),
        }
    }

    pub fn attacker(&self, id: AttackerId) -> &AttackerPolar<T> {
        &self.attackers[id.index()]
    }

    pub fn is_alive(&self, id: AttackerId) -> bool {
        self.alive[id.index()]
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    /// Mirror image across the x-axis; CW and CCW swap roles.
    pub fn mirrored(&self) -> Self {
        let mut out = *self;
        out.theta_t = Angle::new(-self.theta_t.value());
        for a in out.attackers.iter_mut() {
            a.theta = Angle::new(-a.theta.value());
        }
        out
    }

    /// Same configuration rotated rigidly by `delta`.
    pub fn rotated(&self, delta: T) -> Self {
        let mut out = *self;
        out.theta_t = self.theta_t.rotated(delta);
        for a in out.attackers.iter_mut() {
            a.theta = a.theta.rotated(delta);
        }
        out
    }
}


/// Attacker velocity command: speed and heading measured from the inward
/// radial direction, positive headings turning counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttackerControl<T: Scalar> {
    pub speed: T,
    pub heading: T,
}

impl<T: Scalar> AttackerControl<T> {
    pub fn new(speed: T, heading: T) -> Self {
        AttackerControl { speed, heading }
    }

    pub fn idle() -> Self {
        AttackerControl {
            speed: T::zero(),
            heading: T::zero(),
        }
    }
}
