mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use turret_core::circle::ArcSet;
use turret_core::classify::{classify, open_loop_matrix};
use turret_core::regions::{build_regions, dilemma_distances};
use turret_core::sim::simulate;
use turret_core::sweep::{boundary_curves, check_transitions, run_sweep};
use turret_core::two_v_one::CaptureOrder;
use turret_core::verify::run_verify;
use turret_core::GameError;

use config::{ConfigError, RunConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "turret", version, about = "Turret vs. two attackers with unknown speed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override for `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Read angles in the config as degrees.
    #[arg(long, global = true)]
    degrees: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Print the case label and the memberships behind it.
    Classify,
    /// Simulate one run per Turret policy.
    Simulate,
    /// Label a grid of A2 positions and emit the boundary curves.
    Sweep,
    /// Write every winning region and reachability set for the state.
    Regions,
    /// Run the self-check suite.
    Verify,
}

#[derive(Debug, thiserror::Error)]
#[error("verification failed")]
struct VerifyFailed;

/// Output files and stdout documents share this header.
struct Header {
    hash: String,
}

impl Header {
    fn lines(&self) -> Vec<String> {
        vec![format!("turret {VERSION}"), format!("config_sha256 {}", self.hash)]
    }

    fn wrap<T: Serialize>(&self, body: &T) -> Value {
        let mut v = json!({ "version": VERSION, "config_hash": self.hash });
        if let Value::Object(extra) = serde_json::to_value(body).expect("output serializes") {
            v.as_object_mut().expect("object").extend(extra);
        }
        v
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(f), v)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Print a JSON document; a closed pipe downstream is not an error.
fn emit(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match serde_json::to_writer_pretty(&mut out, v).map_err(std::io::Error::from).and_then(|()| writeln!(out)) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn arcs(set: &ArcSet<f64>) -> Vec<[f64; 2]> {
    set.arcs().iter().map(|a| [a.lower(), a.upper()]).collect()
}

fn order_name(o: CaptureOrder) -> String {
    o.to_string()
}

fn require_outside(cfg: &RunConfig) -> Result<(), GameError> {
    for (k, a) in cfg.state.attackers.iter().enumerate() {
        if a.r < 1.0 {
            return Err(GameError::Precondition(format!(
                "attacker A{} starts inside the target (r = {})",
                k + 1,
                a.r
            )));
        }
    }
    Ok(())
}

fn cmd_classify(cfg: &RunConfig, h: &Header) -> Result<()> {
    require_outside(cfg)?;
    let c = classify(&cfg.game_state(), &cfg.params()?);
    let m = c.memberships;
    let pick = |flags: [bool; 2]| -> Vec<String> {
        CaptureOrder::BOTH
            .into_iter()
            .zip(flags)
            .filter(|(_, f)| *f)
            .map(|(o, _)| order_name(o))
            .collect()
    };
    let body = json!({
        "label": c.label,
        "memberships": m,
        "witnesses": {
            "order": c.witness.map(order_name),
            "runner": c.witness.map(|o| o.runner()),
            "matching_orders": pick(m.matching),
            "mismatched_orders": pick(m.mismatch),
        },
    });
    emit(&h.wrap(&body))?;
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, h: &Header, out: &Path) -> Result<()> {
    require_outside(cfg)?;
    let many = cfg.policies.turret.len() > 1;
    let mut summary = Vec::new();
    for (k, turret) in cfg.policies.turret.iter().enumerate() {
        let sim = cfg.sim_config(*turret)?;
        sim.validate()?;
        let tr = simulate(&sim)?;
        let stem = if many {
            format!("{}_{}_{}", cfg.output.trajectory, k, turret.name())
        } else {
            cfg.output.trajectory.clone()
        };
        let csv = out.join(format!("{stem}.csv"));
        let f = File::create(&csv).with_context(|| format!("cannot create {}", csv.display()))?;
        tr.write_csv(BufWriter::new(f), &h.lines())?;
        log::info!("wrote {}", csv.display());
        let side = out.join(format!("{stem}.json"));
        let mut doc = h.wrap(&tr.sidecar());
        let extra = json!({
            "turret": turret,
            "attackers": cfg.policies.attackers,
            "true_nu": cfg.speeds.true_nu,
        });
        if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
            d.extend(e);
        }
        write_json(&side, &doc)?;
        summary.push(json!({
            "turret": turret.name(),
            "J": tr.payoff,
            "t_final": tr.t_final,
            "csv": csv,
            "sidecar": side,
        }));
    }
    if cfg.policies.open_loop_table {
        let table = open_loop_matrix(&cfg.game_state(), &cfg.params()?, cfg.sim.dt, cfg.sim.t_max)?;
        let path = out.join(&cfg.output.open_loop);
        write_json(&path, &h.wrap(&table))?;
        summary.push(json!({ "open_loop": table, "file": path }));
    }
    emit(&h.wrap(&json!({ "runs": summary })))?;
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, h: &Header, out: &Path) -> Result<()> {
    let spec = cfg.sweep_spec()?;
    let res = run_sweep(&spec);
    let csv = out.join(&cfg.output.sweep);
    let f = File::create(&csv).with_context(|| format!("cannot create {}", csv.display()))?;
    res.write_csv(BufWriter::new(f), &h.lines())?;
    log::info!("wrote {}", csv.display());
    let curves = boundary_curves(&spec, cfg.sweep.curve_reading);
    let path = out.join(&cfg.output.curves);
    write_json(&path, &h.wrap(&json!({ "curves": curves })))?;
    let counts: Vec<_> = res.counts().into_iter().map(|(l, n)| json!({"label": l, "cells": n})).collect();
    let comps: Vec<_> = res
        .components()
        .into_iter()
        .map(|(l, c)| json!({"label": l, "components": c.len()}))
        .collect();
    let body = json!({
        "counts": counts,
        "components": comps,
        "transitions": check_transitions(&res, cfg.sweep.curve_reading, 1.0),
        "csv": csv,
        "curves": path,
    });
    emit(&h.wrap(&body))?;
    Ok(())
}

fn cmd_regions(cfg: &RunConfig, h: &Header, out: &Path) -> Result<()> {
    require_outside(cfg)?;
    let st = cfg.game_state();
    let b = build_regions(&st, &cfg.params()?);
    let d = dilemma_distances(cfg.state.theta_t, &b);
    let sets = json!({
        "R_A1_fast": arcs(&b.r_a1_fast),
        "R_A2_fast": arcs(&b.r_a2_fast),
        "R_A1_slow": arcs(&b.r_a1_slow),
        "R_A2_slow": arcs(&b.r_a2_slow),
        "R_A1A2_slow": arcs(&b.r_a1a2_slow),
        "R_A2A1_slow": arcs(&b.r_a2a1_slow),
        "R_A1A2_fast": arcs(&b.r_a1a2_fast),
        "R_A2A1_fast": arcs(&b.r_a2a1_fast),
        "I1v1_fast": arcs(&b.i1_fast),
        "U1v1_fast": arcs(&b.u1_fast),
        "U1v1_slow": arcs(&b.u1_slow),
        "I2v1_slow": arcs(&b.i2_slow),
        "U2v1_slow": arcs(&b.u2_slow),
        "U2v1_fast": arcs(&b.u2_fast),
        "R1v1": arcs(&b.r1v1),
        "R2v1": arcs(&b.r2v1),
    });
    let finite = |x: f64| x.is_finite().then_some(x);
    let body = json!({
        "label": classify(&st, &cfg.params()?).label,
        "sets": sets,
        "distances": {
            "d1": finite(d.d1),
            "d2": finite(d.d2),
            "theta_B1": d.theta_b1,
            "theta_B2": d.theta_b2,
        },
    });
    let path = out.join(&cfg.output.regions);
    let doc = h.wrap(&body);
    write_json(&path, &doc)?;
    emit(&doc)?;
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, h: &Header) -> Result<()> {
    let report = run_verify(&cfg.sweep_spec()?, cfg.sim.seed);
    emit(&h.wrap(&report))?;
    if report.passed {
        Ok(())
    } else {
        Err(VerifyFailed.into())
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.degrees {
        cfg.degrees_to_radians();
    }
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let h = Header { hash: cfg.hash() };
    let out = cfg.output.dir.clone();
    let writes = matches!(cli.command, Command::Simulate | Command::Sweep | Command::Regions);
    if writes {
        std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
        let echo = out.join("config.json");
        std::fs::write(&echo, cfg.echo()).with_context(|| format!("cannot write {}", echo.display()))?;
    }
    match cli.command {
        Command::Classify => cmd_classify(&cfg, &h),
        Command::Simulate => cmd_simulate(&cfg, &h, &out),
        Command::Sweep => cmd_sweep(&cfg, &h, &out),
        Command::Regions => cmd_regions(&cfg, &h, &out),
        Command::Verify => cmd_verify(&cfg, &h),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.is::<VerifyFailed>() {
        return 1;
    }
    if e.is::<ConfigError>() {
        return 2;
    }
    match e.downcast_ref::<GameError>() {
        Some(GameError::Precondition(_) | GameError::Domain { .. } | GameError::NoCapture { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
