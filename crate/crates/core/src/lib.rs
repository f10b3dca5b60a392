//! A Turret guarding the unit circle against two attackers whose maximum
//! speed is one of two known values, without knowing which.
//!
//! The crate computes the complete-information winning regions for one and
//! two attackers at either speed, labels a state with the case it falls in
//! (no dilemma, guaranteed dilemma, avoidable or forceable dilemma), and
//! simulates the strategies that go with each case.
//!
//! Geometry is generic over [`scalar::Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` and `f32` instantiations.

pub mod circle;
pub mod classify;
pub mod error;
pub mod one_v_one;
pub mod regions;
pub mod scalar;
pub mod sim;
pub mod state;
pub mod strategies;
pub mod sweep;
pub mod two_v_one;
pub mod verify;

pub use classify::{classify, CaseLabel, Classification};
pub use error::{GameError, Result};
pub use scalar::Scalar;
pub use sim::simulate;
pub use state::{AttackerId, SpeedClass};

pub type GameState = state::GameState<f64>;
pub type GameStateF32 = state::GameState<f32>;
pub type AttackerPolar = state::AttackerPolar<f64>;
pub type AttackerPolarF32 = state::AttackerPolar<f32>;
pub type SpeedParams = state::SpeedParams<f64>;
pub type SpeedParamsF32 = state::SpeedParams<f32>;
pub type ArcSet = circle::ArcSet<f64>;
pub type ArcSetF32 = circle::ArcSet<f32>;
pub type RegionBundle = regions::RegionBundle<f64>;
pub type RegionBundleF32 = regions::RegionBundle<f32>;
pub type SimConfig = sim::SimConfig<f64>;
pub type SimConfigF32 = sim::SimConfig<f32>;
pub type Trajectory = sim::Trajectory<f64>;
pub type TrajectoryF32 = sim::Trajectory<f32>;
pub type SweepSpec = sweep::SweepSpec<f64>;
pub type SweepSpecF32 = sweep::SweepSpec<f32>;
