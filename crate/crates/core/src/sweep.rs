//! Label maps over a grid of second-attacker positions.
//!
//! The Turret and A1 are held fixed and A2 is placed at every cell centre of
//! an `(r, θ)` grid. Cells are classified in parallel; the result does not
//! depend on the thread count.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, CaseLabel, Classification};
use crate::one_v_one::w_1v1;
use crate::regions::{closed_form_boundaries, CurveReading};
use crate::scalar::Scalar;
use crate::state::{AttackerId, AttackerPolar, GameState, SpeedParams};
use crate::two_v_one::{region_2v1, CaptureOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRanges {
    pub r: [f64; 2],
    pub theta: [f64; 2],
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            r: [1.0, 3.0],
            theta: [-std::f64::consts::PI, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec<T: Scalar> {
    pub params: SpeedParams<T>,
    pub theta_t: T,
    pub a1: AttackerPolar<T>,
    pub ranges: SweepRanges,
    /// Number of cells along `r` and along `θ`.
    pub steps: [usize; 2],
}

impl<T: Scalar> SweepSpec<T> {
    pub fn r_step(&self) -> f64 {
        (self.ranges.r[1] - self.ranges.r[0]) / self.steps[0] as f64
    }

    pub fn theta_step(&self) -> f64 {
        (self.ranges.theta[1] - self.ranges.theta[0]) / self.steps[1] as f64
    }

    pub fn r_at(&self, i: usize) -> T {
        T::lit(self.ranges.r[0] + (i as f64 + 0.5) * self.r_step())
    }

    pub fn theta_at(&self, j: usize) -> T {
        T::lit(self.ranges.theta[0] + (j as f64 + 0.5) * self.theta_step())
    }

    pub fn radii(&self) -> Vec<T> {
        (0..self.steps[0]).map(|i| self.r_at(i)).collect()
    }

    pub fn state_at(&self, i: usize, j: usize) -> GameState<T> {
        GameState::new(
            self.theta_t,
            self.a1,
            AttackerPolar::new(self.r_at(i), self.theta_at(j)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub label: CaseLabel,
    pub witness: Option<CaptureOrder>,
}

#[derive(Debug, Clone)]
pub struct SweepResult<T: Scalar> {
    pub spec: SweepSpec<T>,
    /// Row-major over `(r index, θ index)`.
    pub cells: Vec<Cell>,
}

pub fn run_sweep<T: Scalar>(spec: &SweepSpec<T>) -> SweepResult<T> {
    let [nr, nt] = spec.steps;
    let cells = (0..nr * nt)
        .into_par_iter()
        .map(|k| {
            let c = classify(&spec.state_at(k / nt, k % nt), &spec.params);
            Cell {
                label: c.label,
                witness: c.witness,
            }
        })
        .collect();
    SweepResult { spec: *spec, cells }
}

impl<T: Scalar> SweepResult<T> {
    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[i * self.spec.steps[1] + j]
    }

    pub fn counts(&self) -> BTreeMap<CaseLabel, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.label).or_insert(0) += 1;
        }
        m
    }

    /// Sizes of the 8-connected components of each label, largest first.
    pub fn components(&self) -> BTreeMap<CaseLabel, Vec<usize>> {
        let [nr, nt] = self.spec.steps;
        let mut seen = vec![false; self.cells.len()];
        let mut out: BTreeMap<CaseLabel, Vec<usize>> = BTreeMap::new();
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if seen[start] {
                continue;
            }
            let label = self.cells[start].label;
            seen[start] = true;
            stack.push(start);
            let mut size = 0;
            while let Some(k) = stack.pop() {
                size += 1;
                let (i, j) = (k / nt, k % nt);
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii < 0 || jj < 0 || ii >= nr as i64 || jj >= nt as i64 {
                            continue;
                        }
                        let kk = ii as usize * nt + jj as usize;
                        if !seen[kk] && self.cells[kk].label == label {
                            seen[kk] = true;
                            stack.push(kk);
                        }
                    }
                }
            }
            out.entry(label).or_default().push(size);
        }
        for sizes in out.values_mut() {
            sizes.sort_unstable_by(|a, b| b.cmp(a));
        }
        out
    }

    /// Label changes between `θ`-neighbours at the same radius, as
    /// `(r index, θ at the shared cell edge, lower label, upper label)`.
    pub fn theta_transitions(&self) -> Vec<(usize, f64, CaseLabel, CaseLabel)> {
        let [nr, nt] = self.spec.steps;
        let mut out = Vec::new();
        for i in 0..nr {
            for j in 0..nt.saturating_sub(1) {
                let (a, b) = (self.cell(i, j).label, self.cell(i, j + 1).label);
                if a != b {
                    let edge = self.spec.ranges.theta[0] + (j + 1) as f64 * self.spec.theta_step();
                    out.push((i, edge, a, b));
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W, preamble: &[String]) -> std::io::Result<()> {
        for line in preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "r,theta,label,witness_order")?;
        let nt = self.spec.steps[1];
        for (k, c) in self.cells.iter().enumerate() {
            let witness = c.witness.map(|o| o.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{}",
                self.spec.r_at(k / nt).to_f64_lossy(),
                self.spec.theta_at(k % nt).to_f64_lossy(),
                c.label,
                witness
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<[f64; 2]>,
}

pub const CURVE_NAMES: [&str; 8] = [
    "1v1 Slow",
    "1v1 Fast",
    "Runner (slow)",
    "Runner (fast)",
    "Penetrator (slow)",
    "R1v1 exist",
    "R1v1 degenerate",
    "R1v1 nominal",
];

/// Values of `θ` in `[lo, hi]` where `pred` flips, refined by bisection
/// from a scan with `n` samples.
fn crossings(lo: f64, hi: f64, n: usize, pred: impl Fn(f64) -> bool) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev = pred(lo);
    for k in 1..=n {
        let x = lo + k as f64 * h;
        let cur = pred(x);
        if cur != prev {
            let (mut a, mut b) = (prev_x, x);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if pred(m) == prev {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev_x = x;
        prev = cur;
    }
    out
}

/// Boundary curves in the `(r_A2, θ_A2)` plane of the sweep.
///
/// The one-attacker curves are closed form; the two-attacker curves are
/// located numerically as the loci where `θ_T` leaves the corresponding
/// region; the last two are the analytic avoid-dilemma boundaries.
pub fn boundary_curves<T: Scalar>(spec: &SweepSpec<T>, reading: CurveReading) -> Vec<Curve> {
    let p = spec.params;
    let tt = spec.theta_t.to_f64_lossy();
    let radii = spec.radii();
    let [lo, hi] = spec.ranges.theta;
    let one = |nu: T| -> Vec<[f64; 2]> {
        radii
            .iter()
            .filter_map(|&r| {
                let th = tt - w_1v1(r, nu).ok()?.to_f64_lossy();
                (lo..=hi).contains(&th).then_some([r.to_f64_lossy(), th])
            })
            .collect()
    };
    let two = |order: CaptureOrder, nu: T| -> Vec<[f64; 2]> {
        radii
            .par_iter()
            .flat_map_iter(|&r| {
                let pred = |th: f64| {
                    region_2v1(&spec.a1, &AttackerPolar::new(r, T::lit(th)), order, nu)
                        .contains(spec.theta_t)
                };
                crossings(lo, hi, spec.steps[1], pred)
                    .into_iter()
                    .map(move |th| [r.to_f64_lossy(), th])
            })
            .collect()
    };
    let a2_runs = CaptureOrder::runner_first(AttackerId::A2);
    let a1_runs = CaptureOrder::runner_first(AttackerId::A1);
    let app = closed_form_boundaries(&spec.a1, spec.theta_t, &p, &radii, reading);
    let analytic = |pts: Vec<[T; 2]>| -> Vec<[f64; 2]> {
        pts.into_iter()
            .map(|[r, th]| [r.to_f64_lossy(), th.to_f64_lossy()])
            .filter(|[_, th]| th.is_finite() && (lo..=hi).contains(th))
            .collect()
    };
    let pts = [
        one(p.nu_slow),
        one(p.nu_fast),
        two(a2_runs, p.nu_slow),
        two(a2_runs, p.nu_fast),
        two(a1_runs, p.nu_slow),
        analytic(app.existence),
        analytic(app.degenerate),
        analytic(app.nominal),
    ];
    CURVE_NAMES
        .iter()
        .zip(pts)
        .map(|(name, points)| Curve {
            name: name.to_string(),
            points,
        })
        .collect()
}

/// Distance in cell widths from `(r, θ)` to the nearest curve point at the
/// same radius row, or `None` when the curve has no point on that row.
pub fn row_distance_in_cells<T: Scalar>(
    spec: &SweepSpec<T>,
    curve: &Curve,
    i: usize,
    theta: f64,
) -> Option<f64> {
    let r = spec.r_at(i).to_f64_lossy();
    let tol = 1e-9 * spec.r_step().abs().max(1.0);
    curve
        .points
        .iter()
        .filter(|[pr, _]| (pr - r).abs() <= tol)
        .map(|[_, th]| (th - theta).abs() / spec.theta_step().abs())
        .min_by(|a, b| a.total_cmp(b))
}

/// Agreement between dilemma-family label changes and the analytic curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionCheck {
    pub checked: usize,
    pub within: usize,
    /// Largest distance in `θ` cells, over all checked transitions.
    pub worst_cells: f64,
}

impl TransitionCheck {
    pub fn all_within(&self) -> bool {
        self.checked > 0 && self.within == self.checked
    }
}

/// Compare the label changes that the avoid-dilemma curves describe with
/// those curves: changes between `GuaranteedDilemma` and a dilemma label
/// caused by `ℐ₁ᵥ₁(ν_fast)` appearing are checked against the existence
/// curve, and `AvoidDilemma`/`ForceDilemma` changes against the nearer of
/// the nominal and degenerate curves.
pub fn check_transitions<T: Scalar>(
    res: &SweepResult<T>,
    reading: CurveReading,
    max_cells: f64,
) -> TransitionCheck {
    use CaseLabel::*;
    let spec = &res.spec;
    let app = closed_form_boundaries(&spec.a1, spec.theta_t, &spec.params, &spec.radii(), reading);
    let h = spec.theta_step().abs();
    let at = |i: usize, j: usize| -> Classification { classify(&spec.state_at(i, j), &spec.params) };
    let row = |pts: &[[T; 2]], i: usize| pts[i][1].to_f64_lossy();
    let mut check = TransitionCheck {
        checked: 0,
        within: 0,
        worst_cells: 0.0,
    };
    for (i, edge, a, b) in res.theta_transitions() {
        let pair = (a.min(b), a.max(b));
        let curve_theta = match pair {
            (GuaranteedDilemma, AvoidDilemma) | (GuaranteedDilemma, ForceDilemma) => {
                let j = ((edge - spec.ranges.theta[0]) / spec.theta_step()).round() as usize;
                let (m0, m1) = (at(i, j - 1).memberships, at(i, j).memberships);
                if !(m0.i2_slow_empty && m1.i2_slow_empty) {
                    continue;
                }
                row(&app.existence, i)
            }
            (AvoidDilemma, ForceDilemma) => {
                let n = row(&app.nominal, i);
                let d = row(&app.degenerate, i);
                let dn = (n - edge).abs();
                let dd = (d - edge).abs();
                if dd.is_nan() || dn <= dd {
                    n
                } else {
                    d
                }
            }
            _ => continue,
        };
        let cells = (curve_theta - edge).abs() / h;
        let cells = if cells.is_nan() { f64::INFINITY } else { cells };
        check.checked += 1;
        if cells <= max_cells {
            check.within += 1;
        }
        check.worst_cells = check.worst_cells.max(cells);
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSpec<f64> {
        SweepSpec {
            params: SpeedParams::new(0.2, 0.7).unwrap(),
            theta_t: 0.0,
            a1: AttackerPolar::new(2.0, 0.6),
            ranges: SweepRanges::default(),
            steps: [20, 30],
        }
    }

    #[test]
    fn grid_uses_cell_centres() {
        let s = small();
        assert!((s.r_at(0) - 1.05).abs() < 1e-12);
        assert!((s.theta_at(29) - (-std::f64::consts::PI / 60.0)).abs() < 1e-12);
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = small();
        let a = run_sweep(&s);
        let b = run_sweep(&s);
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.cells.len(), 600);
        let total: usize = a.components().values().flatten().sum();
        assert_eq!(total, 600);
    }

    #[test]
    fn crossings_find_threshold() {
        let x = crossings(0.0, 1.0, 10, |x| x > 0.337);
        assert_eq!(x.len(), 1);
        assert!((x[0] - 0.337).abs() < 1e-12);
    }

    #[test]
    fn one_v_one_curve_is_closed_form() {
        let s = small();
        let curves = boundary_curves(&s, CurveReading::Derived);
        assert_eq!(curves.len(), CURVE_NAMES.len());
        let c = &curves[1];
        for [r, th] in &c.points {
            assert!((th + w_1v1(*r, 0.7).unwrap()).abs() < 1e-12);
        }
    }
}
