//! E5: commuting saddles on the plane. Each coset of the first generator's
//! subgroup yields a fiber shadowing box; the assembled per-coset points form
//! a near-trajectory whose defect shrinks as the fiber window doubles.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Result};
use serde::Serialize;
use shadowlab_core::action::{LinearAction, Point, RationalMatrix};
use shadowlab_core::group::{CayleyBall, GroupElement};
use shadowlab_core::numeric::{rat_i64, Rational};
use shadowlab_core::pseudo::{max_defect, perturbed_orbit, NumericMode, Pseudotrajectory};
use shadowlab_core::solver::{coherence_check, feasible_shadow, fiber_shadow_expanding, ShadowingProblem};

use super::{cell, map_seeds, standard_ball};
use crate::actionfile::plane_saddles;
use crate::config::{accumulated_tolerance, check_cap, E5Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

#[derive(Debug, Clone)]
pub struct E5Row {
    pub seed: u64,
    pub max_defect: Rational,
    pub feasible: bool,
    pub coherence_small: Rational,
    pub coherence_large: Rational,
    pub decreased: bool,
}

#[derive(Debug)]
pub struct E5Outcome {
    pub config: E5Config,
    pub epsilon: Rational,
    pub fiber_epsilon: Rational,
    pub window_small: u32,
    pub window_large: u32,
    pub rows: Vec<E5Row>,
    pub all_feasible: bool,
    pub all_decreased: bool,
    pub pass: bool,
}

/// Fiber shadowing point for the coset through q: the saddle expands the
/// first coordinate forward and the second backward, so each coordinate gets
/// a one-dimensional expanding solve over its half of the window.
fn fiber_point(
    traj: &Pseudotrajectory,
    a: &GroupElement,
    q: &GroupElement,
    window: u32,
    expansion: &RationalMatrix,
    fiber_epsilon: &Rational,
) -> Result<Point> {
    let ball = traj.ball();
    let mut forward = Vec::with_capacity(window as usize + 1);
    let mut backward = Vec::with_capacity(window as usize + 1);
    for k in 0..=i64::from(window) {
        let fwd = ball
            .index_of(&a.pow(k).multiply(q)?)
            .ok_or_else(|| anyhow!("fiber leaves the ball at a^{k}"))?;
        let bwd = ball
            .index_of(&a.pow(-k).multiply(q)?)
            .ok_or_else(|| anyhow!("fiber leaves the ball at a^-{k}"))?;
        forward.push(Point::one_d(traj.point(fwd).coord(0).clone()));
        backward.push(Point::one_d(traj.point(bwd).coord(1).clone()));
    }
    let box1 = fiber_shadow_expanding(expansion, &forward, fiber_epsilon)?;
    let box2 = fiber_shadow_expanding(expansion, &backward, fiber_epsilon)?;
    let c1 = box1
        .center()
        .ok_or_else(|| anyhow!("empty forward fiber box at {}", q.to_word()))?;
    let c2 = box2
        .center()
        .ok_or_else(|| anyhow!("empty backward fiber box at {}", q.to_word()))?;
    Ok(Point::two_d(c1.coord(0).clone(), c2.coord(0).clone()))
}

fn assembled_coherence(
    traj: &Pseudotrajectory,
    action: &LinearAction,
    reps: &Arc<CayleyBall>,
    a: &GroupElement,
    window: u32,
    expansion: &RationalMatrix,
    fiber_epsilon: &Rational,
) -> Result<Rational> {
    let points: Vec<Point> = (0..reps.len())
        .map(|i| fiber_point(traj, a, reps.element(i), window, expansion, fiber_epsilon))
        .collect::<Result<_>>()?;
    let assembled = Pseudotrajectory::from_points(
        Arc::clone(reps),
        points,
        NumericMode::Exact,
        None,
        Rational::from_integer(0.into()),
    )?;
    Ok(coherence_check(action, &assembled)?.max_defect)
}

pub fn run(cfg: &E5Config) -> Result<E5Outcome> {
    let action = plane_saddles()?;
    let spec = action.spec().clone();
    let ball = standard_ball(&spec, cfg.radius)?;
    check_cap("E5 ball", ball.len(), cfg.cap)?;
    let reps = standard_ball(&spec, 1)?;
    let a = spec.generator(0)?;
    let epsilon = accumulated_tolerance(&cfg.d, action.lipschitz(), cfg.radius);
    // The fiber sequences are d-pseudotrajectories of the saddle, whose
    // expanding rate is 2; the geometric tail bounds the true fiber point
    // within d/(2-1) of every pulled-back window term, so eps_f = d works.
    let fiber_epsilon = cfg.d.clone();
    let expansion = RationalMatrix::diagonal(&[rat_i64(2)])?;
    let (k_small, k_large) = (cfg.window, 2 * cfg.window);
    let x0 = Point::two_d(rat_i64(1), rat_i64(1));

    let rows = map_seeds(cfg.seed0, cfg.seeds, |seed| {
        let traj = perturbed_orbit(&action, ball.clone(), &x0, &cfg.d, seed)?;
        let measured = max_defect(&traj, &action)?.max;
        let problem = ShadowingProblem::new(&action, &traj, epsilon.clone())?;
        let feasible = feasible_shadow(&problem)?.is_feasible();
        let coherence_small =
            assembled_coherence(&traj, &action, &reps, &a, k_small, &expansion, &fiber_epsilon)?;
        let coherence_large =
            assembled_coherence(&traj, &action, &reps, &a, k_large, &expansion, &fiber_epsilon)?;
        let decreased = coherence_large < coherence_small;
        Ok(E5Row {
            seed,
            max_defect: measured,
            feasible,
            coherence_small,
            coherence_large,
            decreased,
        })
    })?;

    let all_feasible = rows.iter().all(|r| r.feasible);
    let all_decreased = rows.iter().all(|r| r.decreased);
    let pass = all_feasible && all_decreased;
    Ok(E5Outcome {
        config: cfg.clone(),
        epsilon,
        fiber_epsilon,
        window_small: k_small,
        window_large: k_large,
        rows,
        all_feasible,
        all_decreased,
        pass,
    })
}

#[derive(Serialize)]
struct E5Verdicts {
    epsilon: String,
    fiber_epsilon: String,
    window_small: u32,
    window_large: u32,
    seeds_run: usize,
    all_feasible: bool,
    all_decreased: bool,
}

pub fn emit(outcome: &E5Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E5Verdicts {
        epsilon: cell(&outcome.epsilon),
        fiber_epsilon: cell(&outcome.fiber_epsilon),
        window_small: outcome.window_small,
        window_large: outcome.window_large,
        seeds_run: outcome.rows.len(),
        all_feasible: outcome.all_feasible,
        all_decreased: outcome.all_decreased,
    };
    let mut report = ExperimentReport::new(
        "E5",
        "every seeded trajectory is shadowed, and the assembled fiber points get strictly more coherent when the window doubles",
        outcome.pass,
        &outcome.config,
        &verdicts,
    )?;
    let rows: Vec<Vec<String>> = outcome
        .rows
        .iter()
        .map(|r| {
            vec![
                r.seed.to_string(),
                cell(&r.max_defect),
                r.feasible.to_string(),
                cell(&r.coherence_small),
                cell(&r.coherence_large),
                r.decreased.to_string(),
            ]
        })
        .collect();
    let p = write_csv(
        out_dir,
        "e5_seeds.csv",
        &[
            "seed",
            "max_defect",
            "feasible",
            "coherence_small",
            "coherence_large",
            "decreased",
        ],
        &rows,
    )?;
    report.artifacts.push(artifact_name(out_dir, &p));
    report.write(out_dir)?;
    Ok(report)
}
