//! Self-checks against independent oracles, for the `verify` command.
//!
//! Each check samples configurations from a seeded generator, compares a
//! library quantity with a brute-force or closed-form oracle and reports the
//! worst discrepancy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, CaseLabel};
use crate::one_v_one::lb_boundary_rate;
use crate::regions::{theta_ub_rate, CurveReading};
use crate::sim::{simulate, SimConfig};
use crate::state::{AttackerPolar, GameState, SpeedClass, SpeedParams};
use crate::strategies::{AttackerPolicySpec, TurretPolicySpec};
use crate::sweep::{check_transitions, run_sweep, SweepSpec};
use crate::two_v_one::{dtheta_tilde_dtheta_t, runner_residual, solve_theta_tilde};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed discrepancy (or count, for counting checks).
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(name: &str, value: f64, tolerance: f64, samples: usize) -> Check {
    Check {
        name: name.to_string(),
        passed: value <= tolerance,
        value,
        tolerance,
        samples,
    }
}

/// Brute-force maximum of the boundary rate over `n` headings, with its argmax.
pub fn max_boundary_rate(r: f64, v: f64, nu: f64, n: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let phi = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / n as f64;
        let rate = lb_boundary_rate(r, phi, v, nu);
        if rate > best.0 {
            best = (rate, phi);
        }
    }
    best
}

/// First sign change of the runner residual on an `n`-point grid over
/// `[θ_rel, θ_rel + π]`, or `None` if there is none.
pub fn grid_theta_tilde(r: f64, theta_rel: f64, nu: f64, n: usize) -> Option<f64> {
    let h = std::f64::consts::PI / n as f64;
    let mut prev = runner_residual(theta_rel, r, theta_rel, nu);
    for k in 1..=n {
        let x = theta_rel + k as f64 * h;
        let g = runner_residual(x, r, theta_rel, nu);
        if prev < 0.0 && g >= 0.0 {
            // linear interpolation inside the bracketing cell
            return Some(x - h * g / (g - prev));
        }
        prev = g;
    }
    None
}

/// Draw a runner configuration with a capture outside the perimeter.
pub fn sample_runner(rng: &mut impl Rng) -> (f64, f64, f64) {
    loop {
        let r = rng.gen_range(1.05..5.0);
        let nu = rng.gen_range(0.05..0.95);
        let theta_rel = rng.gen_range(0.01..1.5);
        if let Ok(sol) = solve_theta_tilde(r, theta_rel, nu) {
            if sol.capture_radius / nu > 1.05 {
                return (r, theta_rel, nu);
            }
        }
    }
}

/// Golden-section refinement of the grid maximum on the neighbouring cells.
pub fn refine_boundary_rate(r: f64, v: f64, nu: f64, phi: f64, half_width: f64) -> (f64, f64) {
    let f = |x: f64| lb_boundary_rate(r, x, v, nu);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (phi - half_width, phi + half_width);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (f(x), x)
}

fn boundary_rate_sharpness(rng: &mut ChaCha8Rng, n: usize) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let r = rng.gen_range(1.0..5.0);
        let nu = rng.gen_range(1e-3..=1.0);
        let v = rng.gen_range(1e-3..=nu);
        let m = 10_000;
        let (_, phi) = max_boundary_rate(r, v, nu, m);
        let (max, _) = refine_boundary_rate(r, v, nu, phi, std::f64::consts::TAU / m as f64);
        worst = worst.max((max - v / nu).abs() / (v / nu));
    }
    check("boundary_rate_max_is_v_over_nu", worst, 1e-9, n)
}

/// Forcing play from a fixed force-dilemma state keeps the Turret at least
/// as far from both overlap regions as it started, for three Turret policies.
fn forcing_keeps_distance(seed: u64) -> Check {
    let p = SpeedParams::new(0.25_f64, 0.7).expect("valid speeds");
    let st = GameState::new(0.0, AttackerPolar::new(2.0, 0.6), AttackerPolar::new(1.5, -1.05));
    let policies = [
        TurretPolicySpec::SeekR2v1,
        TurretPolicySpec::SeekR1v1,
        TurretPolicySpec::RandomWalk {
            seed: Some(seed),
            interval: None,
        },
    ];
    let mut worst = f64::NEG_INFINITY;
    for turret in policies {
        let mut cfg = SimConfig::new(st, p, SpeedClass::Slow, turret, AttackerPolicySpec::ForcingSwitch);
        cfg.t_max = 20.0;
        cfg.seed = seed;
        let drop = simulate(&cfg).map_or(f64::INFINITY, |tr| {
            let d0 = tr.rows[0].d1().min(tr.rows[0].d2());
            let min = tr
                .rows
                .iter()
                .take_while(|row| row.state.alive_count() == 2 && row.r1v1_measure > 0.0 && row.r2v1_measure > 0.0)
                .map(|row| row.d1().min(row.d2()))
                .fold(f64::INFINITY, f64::min);
            d0 - min
        });
        worst = worst.max(drop);
    }
    check("forcing_keeps_distance_to_overlaps", worst, 1e-3, policies.len())
}

fn runner_root(rng: &mut ChaCha8Rng, n: usize) -> [Check; 2] {
    let (mut res, mut diff) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let (r, th, nu) = sample_runner(rng);
        let sol = solve_theta_tilde(r, th, nu).expect("sampled with a capture");
        res = res.max(runner_residual(sol.theta_tilde, r, th, nu).abs());
        let oracle = grid_theta_tilde(r, th, nu, 100_000).unwrap_or(f64::NAN);
        diff = diff.max((oracle - sol.theta_tilde).abs());
    }
    [
        check("theta_tilde_residual", res, 1e-10, n),
        check("theta_tilde_matches_grid_scan", diff, 1e-4, n),
    ]
}

fn derivative(rng: &mut ChaCha8Rng, n: usize) -> Check {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (r, th, nu) = sample_runner(rng);
        let th = th.max(2.0 * h);
        let up = solve_theta_tilde(r, th + h, nu).map(|s| s.theta_tilde);
        let dn = solve_theta_tilde(r, th - h, nu).map(|s| s.theta_tilde);
        let (Ok(up), Ok(dn), Ok(exact)) = (up, dn, dtheta_tilde_dtheta_t(r, th, nu)) else {
            worst = f64::INFINITY;
            continue;
        };
        // moving the Turret toward the Runner shrinks θ_rel
        let fd = -(up - dn) / (2.0 * h);
        let rel = (fd - exact).abs() / exact.abs();
        worst = worst.max(if exact < -1.0 { rel } else { f64::INFINITY });
    }
    check("dtheta_tilde_matches_finite_difference", worst, 1e-4, n)
}

fn ub_extremes(spec: &SweepSpec<f64>) -> Check {
    let p = spec.params;
    let a = p.alpha();
    let err = (theta_ub_rate(-a, a, &p) - 1.0)
        .abs()
        .max((theta_ub_rate(a, -a, &p) + 1.0).abs());
    check("upper_boundary_rate_extremes", err, 1e-12, 2)
}

/// Labels must not depend on where the Turret's zero angle is.
fn rotation_invariance(spec: &SweepSpec<f64>, rng: &mut ChaCha8Rng, n: usize) -> Check {
    let mut bad = 0usize;
    for _ in 0..n {
        let st = GameState::new(
            rng.gen_range(-3.0..3.0),
            AttackerPolar::new(rng.gen_range(1.0..3.0), rng.gen_range(-3.0..3.0)),
            AttackerPolar::new(rng.gen_range(1.0..3.0), rng.gen_range(-3.0..3.0)),
        );
        let c = classify(&st, &spec.params);
        let rotated = classify(&st.rotated(rng.gen_range(-3.0..3.0)), &spec.params);
        let witness_ok = match c.label {
            CaseLabel::MatchingDirections => c.witness.is_some(),
            l if l.is_dilemma_family() => c.witness.is_some(),
            _ => c.witness.is_none(),
        };
        if c.label != rotated.label || !witness_ok {
            bad += 1;
        }
    }
    // a handful of states land within rounding of a region edge
    check("labels_rotation_invariant", bad as f64, (n / 200) as f64, n)
}

fn sweep_curves(spec: &SweepSpec<f64>) -> Check {
    let mut grid = *spec;
    grid.steps = [100, 100];
    let res = run_sweep(&grid);
    let t = check_transitions(&res, CurveReading::Derived, 1.0);
    // geometries without any curve-described change pass with zero samples
    let mut c = check("label_changes_follow_curves", t.worst_cells, 1.0, t.checked);
    c.passed = t.within == t.checked;
    c
}

/// Run every check; `spec` supplies the speed pair and the sweep geometry.
pub fn run_verify(spec: &SweepSpec<f64>, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![boundary_rate_sharpness(&mut rng, 200)];
    checks.extend(runner_root(&mut rng, 200));
    checks.push(derivative(&mut rng, 100));
    checks.push(ub_extremes(spec));
    checks.push(rotation_invariance(spec, &mut rng, 2000));
    checks.push(sweep_curves(spec));
    checks.push(forcing_keeps_distance(seed));
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_scan_finds_known_root() {
        // r sin(x − 0.5) = 0.5 x at r = 2: checked against the library solver elsewhere,
        // here only that the scan brackets a genuine root.
        let x = grid_theta_tilde(2.0, 0.5, 0.5, 100_000).unwrap();
        assert!(runner_residual(x, 2.0, 0.5, 0.5).abs() < 1e-8);
    }

    #[test]
    fn max_rate_at_tangent_heading() {
        let (m, phi) = max_boundary_rate(2.0, 0.3, 0.6, 100_000);
        assert!((m - 0.5).abs() < 1e-8);
        assert!((phi - (0.3f64).asin()).abs() < 1e-4);
    }
}
