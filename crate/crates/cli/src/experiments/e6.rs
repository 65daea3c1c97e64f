//! E6: independence from the generating set. The enlarged set S' = S u
//! {(ab)^±1} is bilipschitz to S with constant 2, and every trajectory that
//! is d1-fine over S' re-verifies as a pseudotrajectory over S at the
//! amplified tolerance d1 * (1 + L' + ... + L'^(C-1)).

use std::path::Path;

use anyhow::{bail, Result};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use shadowlab_core::action::Point;
use shadowlab_core::group::{bilipschitz_constant, CayleyBall, GeneratingSet};
use shadowlab_core::numeric::{rat_i64, Rational};
use shadowlab_core::pseudo::{max_defect, max_defect_with, perturbed_orbit};

use super::{cell, map_seeds};
use crate::actionfile::free_saddle_shear;
use crate::config::{check_cap, E6Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

const S_PRIME_WORDS: [&str; 6] = ["a", "A", "b", "B", "ab", "BA"];

#[derive(Debug, Clone)]
pub struct E6Row {
    pub seed: u64,
    pub s_prime_defect: Rational,
    pub s_defect: Rational,
    pub within_bound: bool,
}

#[derive(Debug)]
pub struct E6Outcome {
    pub config: E6Config,
    pub constant: Rational,
    pub witness_word: String,
    pub witness_norms: (u32, u32),
    pub elements_checked: usize,
    /// Worst sup-operator norm over the S' maps.
    pub lipschitz_s_prime: Rational,
    pub amplified_d: Rational,
    pub rows: Vec<E6Row>,
    pub constant_is_two: bool,
    pub all_within: bool,
    pub pass: bool,
}

pub fn run(cfg: &E6Config) -> Result<E6Outcome> {
    let action = free_saddle_shear()?;
    let spec = action.spec().clone();
    let s = GeneratingSet::standard(&spec);
    let s_prime = GeneratingSet::from_words(&spec, &S_PRIME_WORDS)?;

    // S is a subset of S', so S'-norms never exceed S-norms and the S-ball
    // search radius bounds the S'-side BFS too.
    let bilip = bilipschitz_constant(&spec, &s, &s_prime, cfg.radius, cfg.radius)?;
    let constant_is_two = bilip.constant == rat_i64(2);

    let lipschitz_s_prime = (0..s_prime.len())
        .map(|i| action.matrix_of_named(&s_prime, i).map(|m| m.op_norm_sup()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .expect("nonempty generating set");
    let c_steps = bilip
        .constant
        .ceil()
        .to_integer()
        .to_u32()
        .ok_or_else(|| anyhow::anyhow!("bilipschitz constant out of range"))?;
    let mut amplified_d = Rational::zero();
    let mut pow = Rational::one();
    for _ in 0..c_steps {
        amplified_d += &pow;
        pow *= &lipschitz_s_prime;
    }
    amplified_d *= &cfg.d1;
    if amplified_d <= cfg.d1 {
        bail!("amplified tolerance did not grow; generating sets look degenerate");
    }

    let ball = std::sync::Arc::new(CayleyBall::build(&spec, &s_prime, cfg.trajectory_radius)?);
    check_cap("E6 ball", ball.len(), cfg.cap)?;
    let x0 = Point::two_d(rat_i64(1), rat_i64(1));
    let rows = map_seeds(cfg.seed0, cfg.seeds, |seed| {
        let traj = perturbed_orbit(&action, ball.clone(), &x0, &cfg.d1, seed)?;
        let s_prime_defect = max_defect(&traj, &action)?.max;
        let s_defect = max_defect_with(&traj, &action, GeneratingSet::standard(&spec))?.max;
        let within_bound = s_defect < amplified_d;
        Ok(E6Row {
            seed,
            s_prime_defect,
            s_defect,
            within_bound,
        })
    })?;

    let all_within = rows.iter().all(|r| r.within_bound);
    let pass = constant_is_two && all_within;
    Ok(E6Outcome {
        config: cfg.clone(),
        constant: bilip.constant,
        witness_word: bilip.witness_word,
        witness_norms: (bilip.witness_norm_s, bilip.witness_norm_s_prime),
        elements_checked: bilip.elements_checked,
        lipschitz_s_prime,
        amplified_d,
        rows,
        constant_is_two,
        all_within,
        pass,
    })
}

#[derive(Serialize)]
struct E6Verdicts {
    s_prime: Vec<String>,
    constant: String,
    witness_word: String,
    witness_norm_s: u32,
    witness_norm_s_prime: u32,
    elements_checked: usize,
    lipschitz_s_prime: String,
    amplified_d: String,
    seeds_run: usize,
    all_within: bool,
}

pub fn emit(outcome: &E6Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E6Verdicts {
        s_prime: S_PRIME_WORDS.iter().map(|s| s.to_string()).collect(),
        constant: cell(&outcome.constant),
        witness_word: outcome.witness_word.clone(),
        witness_norm_s: outcome.witness_norms.0,
        witness_norm_s_prime: outcome.witness_norms.1,
        elements_checked: outcome.elements_checked,
        lipschitz_s_prime: cell(&outcome.lipschitz_s_prime),
        amplified_d: cell(&outcome.amplified_d),
        seeds_run: outcome.rows.len(),
        all_within: outcome.all_within,
    };
    let mut report = ExperimentReport::new(
        "E6",
        "the two generating sets are bilipschitz with constant exactly 2, and every trajectory fine over the enlarged set stays below the amplified tolerance over the standard one",
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
                cell(&r.s_prime_defect),
                cell(&r.s_defect),
                cell(&outcome.amplified_d),
                r.within_bound.to_string(),
            ]
        })
        .collect();
    let p = write_csv(
        out_dir,
        "e6_seeds.csv",
        &[
            "seed",
            "s_prime_defect",
            "s_defect",
            "amplified_d",
            "within_bound",
        ],
        &rows,
    )?;
    report.artifacts.push(artifact_name(out_dir, &p));
    report.write(out_dir)?;
    Ok(report)
}
