//! E4: a direction that acts by a parabolic shear has no shadowing of its
//! own; lifting one of its drifting windows to the free group breaks
//! shadowing for the whole action.

use std::path::Path;

use anyhow::{bail, Result};
use num_traits::Zero;
use serde::Serialize;
use shadowlab_core::action::Point;
use shadowlab_core::numeric::{rat_i64, Rational};
use shadowlab_core::pseudo::{edge_defect_rows, lift_z_to_free, max_defect, ZWindow};
use shadowlab_core::solver::{feasible_shadow, ShadowingProblem};

use super::{cell, standard_ball};
use crate::actionfile::free_shear_saddle;
use crate::config::{check_cap, E4Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

#[derive(Debug, Clone, Serialize)]
pub struct E4Row {
    pub radius: u32,
    pub elements: usize,
    pub feasible: bool,
    pub margin: String,
    pub certificate_words: Vec<String>,
}

#[derive(Debug)]
pub struct E4Outcome {
    pub config: E4Config,
    /// Per-step drift of the window (d1 / 2).
    pub drift: Rational,
    pub window_defect: Rational,
    pub rows: Vec<E4Row>,
    pub margins: Vec<Rational>,
    pub r_star: Option<u32>,
    pub stays_infeasible: bool,
    pub margin_consistent: bool,
    pub edge_rows: Vec<(String, String, String, Rational)>,
    pub pass: bool,
}

/// The drifting window of the shear (x, y) -> (x, x + y): first coordinate
/// walks k*c, second integrates it to c*k*(k-1)/2, so each step of the shear
/// misses by exactly c in the first coordinate. No orbit of the shear (whose
/// first coordinate is constant) can track the walk once it outruns eps.
fn parabolic_window(k_max: u32, c: &Rational) -> Result<ZWindow> {
    let k_lo = -i64::from(k_max);
    let points: Vec<Point> = (k_lo..=i64::from(k_max))
        .map(|k| {
            let kq = rat_i64(k);
            let second = c * &kq * (&kq - rat_i64(1)) / rat_i64(2);
            Point::two_d(c * kq, second)
        })
        .collect();
    Ok(ZWindow::new(k_lo, points)?)
}

pub fn run(cfg: &E4Config) -> Result<E4Outcome> {
    let action = free_shear_saddle()?;
    let spec = action.spec().clone();
    let g = spec.parse_word(&cfg.g)?;
    if g.as_free_word().map(|w| w.len()) != Some(1) {
        bail!("E4 lifts along a single generator");
    }
    let drift = &cfg.d1 / rat_i64(2);
    let window = parabolic_window(cfg.radius_max, &drift)?;

    let mut rows = Vec::new();
    let mut margins = Vec::new();
    let mut window_defect = Rational::zero();
    let mut edge_rows = Vec::new();
    let mut r_star = None;
    for radius in cfg.radius_min..=cfg.radius_max {
        let ball = standard_ball(&spec, radius)?;
        check_cap("E4 ball", ball.len(), cfg.cap)?;
        let traj = lift_z_to_free(&action, ball.clone(), &g, &window)?;
        if radius == cfg.radius_max {
            window_defect = max_defect(&traj, &action)?.max;
        }
        let problem = ShadowingProblem::new(&action, &traj, cfg.epsilon.clone())?;
        let verdict = feasible_shadow(&problem)?;
        if !verdict.is_feasible() && r_star.is_none() {
            r_star = Some(radius);
            edge_rows = edge_defect_rows(&traj, &action)?;
        }
        // The window spans first-coordinate centers -R*c .. R*c inside the
        // ball; a single orbit offers one constant, so eps < R*c is hopeless.
        let margin = rat_i64(i64::from(radius)) * &drift;
        rows.push(E4Row {
            radius,
            elements: ball.len(),
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
    let pass = window_defect < cfg.d1
        && r_star.map(|r| r <= cfg.radius_max).unwrap_or(false)
        && stays_infeasible
        && margin_consistent;
    Ok(E4Outcome {
        config: cfg.clone(),
        drift,
        window_defect,
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
struct E4Verdicts<'a> {
    drift: String,
    window_defect: String,
    r_star: Option<u32>,
    stays_infeasible: bool,
    margin_consistent: bool,
    radii: &'a [E4Row],
}

pub fn emit(outcome: &E4Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E4Verdicts {
        drift: cell(&outcome.drift),
        window_defect: cell(&outcome.window_defect),
        r_star: outcome.r_star,
        stays_infeasible: outcome.stays_infeasible,
        margin_consistent: outcome.margin_consistent,
        radii: &outcome.rows,
    };
    let mut report = ExperimentReport::new(
        "E4",
        "the lifted parabolic window stays finer than d1 yet infeasible once the drift outruns eps, and the verdict never flips back",
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
                r.feasible.to_string(),
                r.margin.clone(),
                r.certificate_words.join(";"),
            ]
        })
        .collect();
    let p = write_csv(
        out_dir,
        "e4_radii.csv",
        &["radius", "elements", "feasible", "margin", "certificate_words"],
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
            "e4_edges.csv",
            &["from", "generator", "to", "defect"],
            &edge_rows,
        )?;
        report.artifacts.push(artifact_name(out_dir, &p));
    }
    report.write(out_dir)?;
    Ok(report)
}
