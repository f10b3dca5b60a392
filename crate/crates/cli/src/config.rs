use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use turret_core::regions::CurveReading;
use turret_core::sim::{SimConfig, Tolerances};
use turret_core::state::{AttackerPolar, GameState, SpeedClass, SpeedParams};
use turret_core::strategies::{AttackerPolicySpec, TurretPolicySpec};
use turret_core::sweep::{SweepRanges, SweepSpec};

/// Raised for anything wrong with the configuration document itself.
#[derive(Debug, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub speeds: Speeds,
    pub state: StateConfig,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub policies: Policies,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Speeds {
    pub nu_slow: f64,
    pub nu_fast: f64,
    #[serde(default = "default_true_nu")]
    pub true_nu: SpeedClass,
}

fn default_true_nu() -> SpeedClass {
    SpeedClass::Slow
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackerConfig {
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(rename = "theta_T")]
    pub theta_t: f64,
    pub attackers: [AttackerConfig; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            dt: 1e-3,
            t_max: 50.0,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Policies {
    /// One simulation per entry.
    pub turret: Vec<TurretPolicySpec>,
    pub attackers: AttackerPolicySpec,
    /// Also run the four open-loop commitments (guaranteed-dilemma states only).
    #[serde(default)]
    pub open_loop_table: bool,
}

impl Default for Policies {
    fn default() -> Self {
        Policies {
            turret: vec![TurretPolicySpec::SeekR2v1],
            attackers: AttackerPolicySpec::ForcingSwitch,
            open_loop_table: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub ranges: SweepRanges,
    pub steps: [usize; 2],
    #[serde(default)]
    pub curve_reading: CurveReading,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            ranges: SweepRanges::default(),
            steps: [200, 200],
            curve_reading: CurveReading::Derived,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
    /// File stem for trajectory CSVs and their JSON sidecars.
    pub trajectory: String,
    pub sweep: String,
    pub curves: String,
    pub regions: String,
    pub open_loop: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            dir: PathBuf::from("out"),
            trajectory: "trajectory".into(),
            sweep: "sweep.csv".into(),
            curves: "curves.json".into(),
            regions: "regions.json".into(),
            open_loop: "open_loop.json".into(),
        }
    }
}

impl Default for RunConfig {
    /// A force-dilemma state with forcing attackers.
    fn default() -> Self {
        RunConfig {
            speeds: Speeds {
                nu_slow: 0.25,
                nu_fast: 0.7,
                true_nu: SpeedClass::Slow,
            },
            state: StateConfig {
                theta_t: 0.0,
                attackers: [
                    AttackerConfig { r: 2.0, theta: 0.6 },
                    AttackerConfig { r: 1.5, theta: -1.05 },
                ],
            },
            sim: SimSection::default(),
            policies: Policies::default(),
            sweep: SweepSection::default(),
            output: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Convert every positional angle from degrees to radians.
    pub fn degrees_to_radians(&mut self) {
        let c = |x: &mut f64| *x = x.to_radians();
        c(&mut self.state.theta_t);
        for a in &mut self.state.attackers {
            c(&mut a.theta);
        }
        for x in &mut self.sweep.ranges.theta {
            c(x);
        }
    }

    /// Canonical JSON echo; parsing it back gives an equal config.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical echo with `output.dir` cleared, so the same
    /// run written to another directory keeps its hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        hex::encode(Sha256::digest(serde_json::to_vec(&c).expect("config serializes")))
    }

    pub fn params(&self) -> Result<SpeedParams<f64>, turret_core::GameError> {
        SpeedParams::new(self.speeds.nu_slow, self.speeds.nu_fast)
    }

    pub fn game_state(&self) -> GameState<f64> {
        let [a1, a2] = self.state.attackers;
        GameState::new(
            self.state.theta_t,
            AttackerPolar::new(a1.r, a1.theta),
            AttackerPolar::new(a2.r, a2.theta),
        )
    }

    pub fn sim_config(&self, turret: TurretPolicySpec) -> Result<SimConfig<f64>, turret_core::GameError> {
        let mut cfg = SimConfig::new(
            self.game_state(),
            self.params()?,
            self.speeds.true_nu,
            turret,
            self.policies.attackers,
        );
        cfg.dt = self.sim.dt;
        cfg.t_max = self.sim.t_max;
        cfg.seed = self.sim.seed;
        cfg.tolerances = self.sim.tolerances;
        cfg.track_regions = true;
        Ok(cfg)
    }

    /// Sweep of A2 positions around the configured Turret and A1.
    pub fn sweep_spec(&self) -> Result<SweepSpec<f64>, turret_core::GameError> {
        let [a1, _] = self.state.attackers;
        Ok(SweepSpec {
            params: self.params()?,
            theta_t: self.state.theta_t,
            a1: AttackerPolar::new(a1.r, a1.theta),
            ranges: self.sweep.ranges,
            steps: self.sweep.steps,
        })
    }

    /// Checks that need no computation beyond the document itself.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params().map_err(|e| ConfigError(e.to_string()))?;
        let finite = |x: f64| x.is_finite();
        let s = &self.state;
        if !finite(s.theta_t) || s.attackers.iter().any(|a| !finite(a.r) || !finite(a.theta)) {
            return Err(ConfigError("state angles and radii must be finite".into()));
        }
        if self.policies.turret.is_empty() {
            return Err(ConfigError("policies.turret needs at least one entry".into()));
        }
        let [nr, nt] = self.sweep.steps;
        let [r0, r1] = self.sweep.ranges.r;
        let [t0, t1] = self.sweep.ranges.theta;
        if nr == 0 || nt == 0 || !(r0 < r1) || !(t0 < t1) {
            return Err(ConfigError("sweep needs positive steps and increasing ranges".into()));
        }
        if r0 < 1.0 {
            return Err(ConfigError("sweep.ranges.r must start at or above 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_echo_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.echo()).unwrap(), c);
    }

    #[test]
    fn unknown_key_is_named() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::default().echo()).unwrap();
        v["speeds"]["nu_fsat"] = 0.5.into();
        let err = RunConfig::parse(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("nu_fsat"), "{err}");
    }

    #[test]
    fn degrees_convert_positions_only() {
        let mut c = RunConfig::default();
        c.state.theta_t = 90.0;
        c.sim.dt = 0.5;
        c.degrees_to_radians();
        assert!((c.state.theta_t - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.sim.dt, 0.5);
    }
}
