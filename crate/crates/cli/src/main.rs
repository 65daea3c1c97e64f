//! `shadowlab`: run the reproduction experiments, sweep ball radii, and
//! verify trajectory files against actions and tolerances.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use shadowlab_core::numeric::{format_rational, parse_rational};
use shadowlab_core::pseudo::{max_defect, read_tsv_file, NumericMode, Pseudotrajectory};
use shadowlab_core::solver::{feasible_shadow, FeasibilityVerdict, ShadowingProblem};
use shadowlab_cli::actionfile::load_action;
use shadowlab_cli::config::{ExperimentId, RawConfig};
use shadowlab_cli::experiments::run_experiment;

#[derive(Parser)]
#[command(
    name = "shadowlab",
    version,
    about = "Exact shadowing experiments for linear actions of finitely generated groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment id, E1..E7.
    #[arg(long, short = 'e')]
    experiment: String,
    /// JSON config file; built-in defaults apply when omitted.
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    /// Directory receiving the report and CSV artifacts.
    #[arg(long, short = 'o', default_value = "shadowlab-out")]
    out: PathBuf,
    /// Record wall-clock timing in the report (makes the bytes run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Run a ball-radius sweep (E1, E3 or E4) over an inclusive range.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        /// Radius range `lo..hi`, inclusive on both ends.
        #[arg(long)]
        radius: String,
    },
    /// Inspect a trajectory file; optionally re-measure its defect and decide
    /// feasibility at a tolerance.
    Verify {
        /// Trajectory in the tab-separated on-disk format.
        #[arg(long, short = 't')]
        trajectory: PathBuf,
        /// Action descriptor (JSON matrices) to measure defects against.
        #[arg(long, short = 'a')]
        action: Option<PathBuf>,
        /// Tolerance for a feasibility verdict; needs --action and exact points.
        #[arg(long)]
        epsilon: Option<String>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run_cmd(args, None),
        Command::Sweep { args, radius } => run_cmd(args, Some(radius)),
        Command::Verify {
            trajectory,
            action,
            epsilon,
        } => verify_cmd(&trajectory, action.as_deref(), epsilon.as_deref()),
    }
}

fn run_cmd(args: RunArgs, sweep_range: Option<String>) -> Result<ExitCode> {
    let id: ExperimentId = args.experiment.parse()?;
    let mut raw = match &args.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    if let Some(range) = sweep_range {
        if !id.sweepable() {
            bail!("{id} has no radius sweep; sweeps exist for E1, E3 and E4");
        }
        let (lo, hi) = parse_range(&range)?;
        raw.radius_min = Some(lo);
        raw.radius_max = Some(hi);
    }
    let report = run_experiment(id, &raw, &args.out, args.timings)?;
    println!(
        "{id}: {} - {}",
        if report.pass { "PASS" } else { "FAIL" },
        report.expectation
    );
    for name in &report.artifacts {
        println!("  wrote {}", args.out.join(name).display());
    }
    println!(
        "  wrote {}",
        args.out
            .join(format!("{}_report.json", report.experiment.to_lowercase()))
            .display()
    );
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Parses `lo..hi` (inclusive) into a radius pair.
fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once("..")
        .with_context(|| format!("radius range must look like 4..14, got `{s}`"))?;
    let lo: u32 = lo.trim().parse().context("range start")?;
    let hi: u32 = hi.trim().parse().context("range end")?;
    if lo == 0 || lo > hi {
        bail!("radius range must satisfy 1 <= lo <= hi, got {lo}..{hi}");
    }
    Ok((lo, hi))
}

fn describe_mode(traj: &Pseudotrajectory) -> String {
    match traj.mode() {
        NumericMode::Exact => "exact".to_string(),
        NumericMode::Interval { precision_bits } => format!("float:{precision_bits}"),
    }
}

fn verify_cmd(
    trajectory: &std::path::Path,
    action_path: Option<&std::path::Path>,
    epsilon: Option<&str>,
) -> Result<ExitCode> {
    let traj = read_tsv_file(trajectory)?;
    let ball = traj.ball();
    println!("trajectory {}", trajectory.display());
    println!(
        "  group {} over {{{}}}, radius {}, {} points in dimension {}",
        ball.spec().describe(),
        ball.gens().labels().join(", "),
        ball.radius(),
        traj.points().len(),
        traj.dim(),
    );
    println!(
        "  mode {}, declared d {}, stored error bound {}",
        describe_mode(&traj),
        traj.declared_d()
            .map(format_rational)
            .unwrap_or_else(|| "-".to_string()),
        format_rational(traj.err_bound()),
    );

    let action = match action_path {
        Some(p) => Some(load_action(p)?),
        None => {
            if epsilon.is_some() {
                bail!("--epsilon needs --action to measure against");
            }
            None
        }
    };

    if let Some(action) = &action {
        let defect = max_defect(&traj, action)?;
        println!(
            "  max defect {} over {} interior edges ({} boundary edges unseen)",
            format_rational(&defect.max),
            defect.interior_edges,
            defect.boundary_skipped,
        );
        if let Some(edge) = &defect.worst {
            println!(
                "  worst edge: {} --{}--> {}",
                ball.element(edge.from),
                ball.gens().get(edge.gen).label,
                ball.element(edge.to),
            );
        }
        if !defect.err_bound.is_zero() {
            println!(
                "  defect certified only to within {}",
                format_rational(&defect.err_bound)
            );
        }
    }

    if let Some(eps) = epsilon {
        let eps = parse_rational(eps).context("--epsilon")?;
        let action = action.as_ref().expect("checked above");
        let problem = ShadowingProblem::new(action, &traj, eps.clone())?;
        match feasible_shadow(&problem)? {
            FeasibilityVerdict::Feasible(w) => {
                let coords: Vec<String> = w.point.coords().iter().map(format_rational).collect();
                println!(
                    "  feasible at epsilon {}: witness ({}) with {} tight constraints",
                    format_rational(&eps),
                    coords.join(", "),
                    w.tight_constraints,
                );
            }
            FeasibilityVerdict::Infeasible(cert) => {
                println!(
                    "  infeasible at epsilon {}; certificate:",
                    format_rational(&eps)
                );
                for plane in &cert.planes {
                    println!("    {plane}");
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
