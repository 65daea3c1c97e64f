//! E3: an expansive direction in a free-group action kills shadowing. The
//! two-branch pseudotrajectory pins the would-be shadow point to two
//! incompatible values; the sweep finds the radius where that bites.

use std::path::Path;

use anyhow::{bail, Result};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use shadowlab_core::action::Point;
use shadowlab_core::numeric::{rat, rat_i64, Rational};
use shadowlab_core::pseudo::{edge_defect_rows, free_two_branch, max_defect};
use shadowlab_core::solver::{feasible_shadow, ShadowingProblem};

use super::{cell, standard_ball};
use crate::actionfile::free_saddle_shear;
use crate::config::{check_cap, E3Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

#[derive(Debug, Clone, Serialize)]
pub struct E3Row {
    pub radius: u32,
    pub elements: usize,
    pub branch: usize,
    pub trunk: usize,
    pub feasible: bool,
    /// Tolerances below this margin are provably infeasible at this radius.
    pub margin: String,
    pub certificate_words: Vec<String>,
}

#[derive(Debug)]
pub struct E3Outcome {
    pub config: E3Config,
    /// Actual branch separation (9/10 of d1, strictly finer than d1).
    pub separation: Rational,
    pub max_defect: Rational,
    pub mu: Rational,
    pub rows: Vec<E3Row>,
    pub margins: Vec<Rational>,
    pub r_star: Option<u32>,
    pub stays_infeasible: bool,
    /// eps < margin(R) implied an infeasible verdict at every swept radius.
    pub margin_consistent: bool,
    pub edge_rows: Vec<(String, String, String, Rational)>,
    pub pass: bool,
}

pub fn run(cfg: &E3Config) -> Result<E3Outcome> {
    let action = free_saddle_shear()?;
    let spec = action.spec().clone();
    let g = spec.parse_word(&cfg.g)?;
    let q = spec.parse_word(&cfg.q)?;

    // The margin argument needs an explicit expansion rate along the
    // designated direction, so require a diagonal expanding block.
    let mg = action.matrix_of(&g)?;
    for r in 0..mg.dim() {
        for c in 0..mg.dim() {
            if r != c && !mg.entry(r, c).is_zero() {
                bail!("E3 needs the designated element to act diagonally, got a shear");
            }
        }
    }
    let mu = (0..mg.dim())
        .map(|i| mg.entry(i, i).abs())
        .max()
        .expect("nonempty diagonal");
    if mu <= Rational::one() {
        bail!("E3 needs an expanding designated direction (spectral radius > 1)");
    }

    let separation = rat(9, 10) * &cfg.d1;
    let omega0 = Point::two_d(Rational::zero(), Rational::zero());
    let omega = Point::two_d(separation.clone(), Rational::zero());

    let mut rows = Vec::new();
    let mut margins = Vec::new();
    let mut measured = Rational::zero();
    let mut edge_rows = Vec::new();
    let mut r_star = None;
    for radius in cfg.radius_min..=cfg.radius_max {
        let ball = standard_ball(&spec, radius)?;
        check_cap("E3 ball", ball.len(), cfg.cap)?;
        let (traj, shape) =
            free_two_branch(&action, ball.clone(), &g, &q, &cfg.d1, &omega0, &omega)?;
        if radius == cfg.radius_max {
            measured = max_defect(&traj, &action)?.max;
        }
        let problem = ShadowingProblem::new(&action, &traj, cfg.epsilon.clone())?;
        let verdict = feasible_shadow(&problem)?;
        if !verdict.is_feasible() && r_star.is_none() {
            r_star = Some(radius);
            edge_rows = edge_defect_rows(&traj, &action)?;
        }
        // Deepest branch pair sits at depth radius - 1; the shadow point
        // would have to approximate two centers separation * mu^(R-1) apart.
        let mut amp = Rational::one();
        for _ in 0..radius.saturating_sub(1) {
            amp *= &mu;
        }
        let margin = &separation * amp / rat_i64(2);
        rows.push(E3Row {
            radius,
            elements: ball.len(),
            branch: shape.branch_size,
            trunk: shape.trunk_size,
            feasible: verdict.is_feasible(),
            margin: cell(&margin),
            certificate_words: verdict
                .certificate()
                .map(|c| c.planes.iter().map(|p| p.provenance().word.clone()).collect())
                .unwrap_or_default(),
        });
        margins.push(margin);
    }
    let stays_infeasible = match r_star {
        None => true,
        Some(r) => rows.iter().all(|row| row.feasible == (row.radius < r)),
    };
    let margin_consistent = rows
        .iter()
        .zip(&margins)
        .all(|(row, m)| cfg.epsilon >= *m || !row.feasible);
    let pass = measured < cfg.d1
        && r_star.map(|r| r <= cfg.radius_max).unwrap_or(false)
        && stays_infeasible
        && margin_consistent;
    Ok(E3Outcome {
        config: cfg.clone(),
        separation,
        max_defect: measured,
        mu,
        rows,
        margins,
        r_star,
        stays_infeasible,
        margin_consistent,
        edge_rows,
        pass,
    })
}

#[derive(Serialize)]
struct E3Verdicts<'a> {
    separation: String,
    max_defect: String,
    expansion_rate: String,
    r_star: Option<u32>,
    stays_infeasible: bool,
    margin_consistent: bool,
    radii: &'a [E3Row],
}

pub fn emit(outcome: &E3Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E3Verdicts {
        separation: cell(&outcome.separation),
        max_defect: cell(&outcome.max_defect),
        expansion_rate: cell(&outcome.mu),
        r_star: outcome.r_star,
        stays_infeasible: outcome.stays_infeasible,
        margin_consistent: outcome.margin_consistent,
        radii: &outcome.rows,
    };
    let mut report = ExperimentReport::new(
        "E3",
        "the two-branch trajectory is finer than d1 yet infeasible at some swept radius, and every radius whose margin exceeds eps is infeasible",
        outcome.pass,
        &outcome.config,
        &verdicts,
    )?;
    let rows: Vec<Vec<String>> = outcome
        .rows
        .iter()
        .map(|r| {
            vec![
                r.radius.to_string(),
                r.elements.to_string(),
                r.branch.to_string(),
                r.trunk.to_string(),
                r.feasible.to_string(),
                r.margin.clone(),
                r.certificate_words.join(";"),
            ]
        })
        .collect();
    let p = write_csv(
        out_dir,
        "e3_radii.csv",
        &[
            "radius",
            "elements",
            "branch",
            "trunk",
            "feasible",
            "margin",
            "certificate_words",
        ],
        &rows,
    )?;
    report.artifacts.push(artifact_name(out_dir, &p));
    if !outcome.edge_rows.is_empty() {
        let edge_rows: Vec<Vec<String>> = outcome
            .edge_rows
            .iter()
            .map(|(f, g, t, d)| vec![f.clone(), g.clone(), t.clone(), cell(d)])
            .collect();
        let p = write_csv(
            out_dir,
            "e3_edges.csv",
            &["from", "generator", "to", "defect"],
            &edge_rows,
        )?;
        report.artifacts.push(artifact_name(out_dir, &p));
    }
    report.write(out_dir)?;
    Ok(report)
}
