//! The seven reproduction suites. Each submodule exposes a typed `run` over
//! its resolved config plus an `emit` that writes the report and CSV
//! artifacts; the dispatcher wires them to the command line.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use shadowlab_core::action::Point;
use shadowlab_core::group::{CayleyBall, GeneratingSet, GroupSpec};
use shadowlab_core::numeric::{format_rational, Rational};

use crate::config::{ExperimentId, RawConfig};
use crate::report::ExperimentReport;

pub mod e1;
pub mod e2;
pub mod e3;
pub mod e4;
pub mod e5;
pub mod e6;
pub mod e7;

/// Runs one experiment end to end and writes its artifacts under `out_dir`.
pub fn run_experiment(
    id: ExperimentId,
    raw: &RawConfig,
    out_dir: &Path,
    timings: bool,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = match id {
        ExperimentId::E1 => e1::emit(&e1::run(&crate::config::E1Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E2 => e2::emit(&e2::run(&crate::config::E2Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E3 => e3::emit(&e3::run(&crate::config::E3Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E4 => e4::emit(&e4::run(&crate::config::E4Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E5 => e5::emit(&e5::run(&crate::config::E5Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E6 => e6::emit(&e6::run(&crate::config::E6Config::resolve(raw)?)?, out_dir)?,
        ExperimentId::E7 => e7::emit(&e7::run(&crate::config::E7Config::resolve(raw)?)?, out_dir)?,
    };
    if timings {
        report.timing_ms = Some(started.elapsed().as_millis());
        report.write(out_dir)?;
    }
    Ok(report)
}

pub(crate) fn standard_ball(spec: &GroupSpec, radius: u32) -> Result<Arc<CayleyBall>> {
    let gens = GeneratingSet::standard(spec);
    Ok(Arc::new(CayleyBall::build(spec, &gens, radius)?))
}

pub(crate) fn cell(r: &Rational) -> String {
    format_rational(r)
}

/// Point rendered for a CSV cell: coordinates joined by `;` so the record
/// stays a single column.
pub(crate) fn point_cell(p: &Point) -> String {
    p.coords()
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(";")
}

/// Maps `f` over the seed range on worker threads, preserving seed order in
/// the output. Each seed's work is independent; failures surface in order.
pub(crate) fn map_seeds<T, F>(seed0: u64, count: u32, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let seeds: Vec<u64> = (0..u64::from(count)).map(|i| seed0 + i).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(seeds.len().max(1));
    let chunk = seeds.len().div_ceil(workers);
    let results: Vec<Result<Vec<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk.max(1))
            .map(|part| scope.spawn(|| part.iter().map(|&s| f(s)).collect::<Result<Vec<T>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("seed worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(seeds.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
