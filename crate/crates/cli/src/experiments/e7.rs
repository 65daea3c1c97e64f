//! E7: commutator identities in the Heisenberg group. Pairs sampled from the
//! subgroup P generated by the commutator subgroup together with one extra
//! generator g have commutators with zero a- and b-exponents (membership in
//! the second term of the lower central series); in a class-2 group those
//! commutators in fact collapse to the identity.

use std::path::Path;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use shadowlab_core::group::{commutator, CayleyBall, Family, GeneratingSet, GroupSpec};

use crate::config::{check_cap, E7Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

#[derive(Debug, Clone)]
pub struct E7Pair {
    pub p1: String,
    pub p2: String,
    pub commutator: String,
    pub central: bool,
    pub identity: bool,
}

#[derive(Debug)]
pub struct E7Outcome {
    pub config: E7Config,
    pub generator_coords: (i64, i64, i64),
    pub ball_elements: usize,
    pub p_members: usize,
    pub pairs: Vec<E7Pair>,
    pub failures: usize,
    pub identity_commutators: usize,
    pub pass: bool,
}

/// Whether (i, j) is an integer multiple of (alpha, beta).
fn on_projection_line(i: i64, j: i64, alpha: i64, beta: i64) -> bool {
    if alpha == 0 && beta == 0 {
        return i == 0 && j == 0;
    }
    if alpha == 0 {
        return i == 0 && j % beta == 0;
    }
    if beta == 0 {
        return j == 0 && i % alpha == 0;
    }
    i % alpha == 0 && j % beta == 0 && i / alpha == j / beta
}

pub fn run(cfg: &E7Config) -> Result<E7Outcome> {
    let spec = GroupSpec::from_family(Family::Heisenberg)?;
    let gens = GeneratingSet::standard(&spec);
    let g = spec.parse_word(&cfg.g)?;
    let (alpha, beta, gamma) = g
        .heisenberg_coords()
        .expect("Heisenberg element carries coordinates");

    let ball = CayleyBall::build(&spec, &gens, cfg.radius)?;
    check_cap("E7 ball", ball.len(), cfg.cap)?;

    // P = <[G,G], g>. The commutator subgroup is the centre {c^t}, so an
    // element q g^m lies in P exactly when its (a, b)-exponent pair is an
    // integer multiple of g's.
    let members: Vec<usize> = (0..ball.len())
        .filter(|&i| {
            let (x, y, _) = ball
                .element(i)
                .heisenberg_coords()
                .expect("ball over Heisenberg");
            on_projection_line(x, y, alpha, beta)
        })
        .collect();
    if members.is_empty() {
        bail!("membership filter produced an empty subgroup slice");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed0);
    let mut pairs = Vec::with_capacity(cfg.pairs as usize);
    let mut failures = 0usize;
    let mut identity_commutators = 0usize;
    for _ in 0..cfg.pairs {
        let p1 = ball.element(members[rng.gen_range(0..members.len())]);
        let p2 = ball.element(members[rng.gen_range(0..members.len())]);
        let c = commutator(p1, p2)?;
        let (ci, cj, ck) = c.heisenberg_coords().expect("Heisenberg commutator");
        let central = ci == 0 && cj == 0;
        let identity = central && ck == 0;
        if !central {
            failures += 1;
        }
        if identity {
            identity_commutators += 1;
        }
        pairs.push(E7Pair {
            p1: p1.to_string(),
            p2: p2.to_string(),
            commutator: c.to_string(),
            central,
            identity,
        });
    }

    let pass = failures == 0;
    Ok(E7Outcome {
        config: cfg.clone(),
        generator_coords: (alpha, beta, gamma),
        ball_elements: ball.len(),
        p_members: members.len(),
        pairs,
        failures,
        identity_commutators,
        pass,
    })
}

#[derive(Serialize)]
struct E7Verdicts {
    g: String,
    generator_coords: (i64, i64, i64),
    ball_elements: usize,
    p_members: usize,
    pairs_checked: usize,
    failures: usize,
    identity_commutators: usize,
}

pub fn emit(outcome: &E7Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E7Verdicts {
        g: outcome.config.g.clone(),
        generator_coords: outcome.generator_coords,
        ball_elements: outcome.ball_elements,
        p_members: outcome.p_members,
        pairs_checked: outcome.pairs.len(),
        failures: outcome.failures,
        identity_commutators: outcome.identity_commutators,
    };
    let mut report = ExperimentReport::new(
        "E7",
        "every sampled commutator of subgroup pairs has zero a- and b-exponents",
        outcome.pass,
        &outcome.config,
        &verdicts,
    )?;
    let rows: Vec<Vec<String>> = outcome
        .pairs
        .iter()
        .map(|p| {
            vec![
                p.p1.clone(),
                p.p2.clone(),
                p.commutator.clone(),
                p.central.to_string(),
                p.identity.to_string(),
            ]
        })
        .collect();
    let path = write_csv(
        out_dir,
        "e7_pairs.csv",
        &["p1", "p2", "commutator", "central", "identity"],
        &rows,
    )?;
    report.artifacts.push(artifact_name(out_dir, &path));
    report.write(out_dir)?;
    Ok(report)
}
