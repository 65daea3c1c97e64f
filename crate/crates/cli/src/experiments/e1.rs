//! E1: the hand-built pseudotrajectory on BS(1,n) that no orbit shadows.
//! Sweeps the ball radius, records where the verdict flips to infeasible,
//! and re-verifies every certificate.

use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;
use shadowlab_core::numeric::Rational;
use shadowlab_core::pseudo::{bs_counterexample, max_defect, CounterexampleParams, NumericMode};
use shadowlab_core::solver::{
    certificate_infeasible, feasible_shadow, shadow_constraints, HalfPlane, ShadowingProblem,
};

use super::{cell, standard_ball};
use crate::actionfile::bs_skew_action;
use crate::config::{check_cap, E1Config};
use crate::report::{artifact_name, write_csv, ExperimentReport};

#[derive(Debug, Clone, Serialize)]
pub struct E1Row {
    pub radius: u32,
    pub elements: usize,
    pub feasible: bool,
    pub certificate_words: Vec<String>,
}

#[derive(Debug)]
pub struct E1Outcome {
    pub config: E1Config,
    pub max_defect: Rational,
    pub defect_below_d: bool,
    pub rows: Vec<E1Row>,
    /// First swept radius with an infeasible verdict.
    pub r_star: Option<u32>,
    /// No feasible verdict at or above r_star.
    pub stays_infeasible: bool,
    /// Every certificate has at most three planes, is independently verified
    /// as contradictory, and every plane belongs to the constraint system.
    pub certificates_ok: bool,
    pub edge_rows: Vec<(String, String, String, Rational)>,
    pub pass: bool,
}

fn plane_in_system(plane: &HalfPlane, system: &[HalfPlane]) -> bool {
    system.iter().any(|hp| {
        hp.a() == plane.a()
            && hp.b() == plane.b()
            && hp.c() == plane.c()
            && hp.provenance() == plane.provenance()
    })
}

pub fn run(cfg: &E1Config) -> Result<E1Outcome> {
    let action = bs_skew_action(cfg.n, &cfg.lambda)?;
    let spec = action.spec().clone();
    let params = CounterexampleParams {
        lambda: cfg.lambda.clone(),
        d: cfg.d.clone(),
        mode: NumericMode::Exact,
    };
    let mut rows = Vec::new();
    let mut certificates_ok = true;
    let mut measured = Rational::from_integer(0.into());
    let mut edge_rows = Vec::new();
    let mut r_star = None;
    for radius in cfg.radius_min..=cfg.radius_max {
        let ball = standard_ball(&spec, radius)?;
        check_cap("E1 ball", ball.len(), cfg.cap)?;
        let traj = bs_counterexample(&params, ball.clone())?;
        if radius == cfg.radius_max {
            measured = max_defect(&traj, &action)?.max;
        }
        let problem = ShadowingProblem::new(&action, &traj, cfg.epsilon.clone())?;
        let verdict = feasible_shadow(&problem)?;
        let mut certificate_words = Vec::new();
        if let Some(cert) = verdict.certificate() {
            if r_star.is_none() {
                r_star = Some(radius);
                edge_rows = shadowlab_core::pseudo::edge_defect_rows(&traj, &action)?;
            }
            let system = shadow_constraints(&problem)?;
            if cert.len() > 3
                || !certificate_infeasible(&cert.planes)
                || cert.planes.iter().any(|p| !plane_in_system(p, &system))
            {
                certificates_ok = false;
            }
            certificate_words = cert
                .planes
                .iter()
                .map(|p| p.provenance().word.clone())
                .collect();
        }
        rows.push(E1Row {
            radius,
            elements: ball.len(),
            feasible: verdict.is_feasible(),
            certificate_words,
        });
    }
    if rows.is_empty() {
        bail!("empty radius sweep");
    }
    let stays_infeasible = match r_star {
        None => true,
        Some(r) => rows.iter().all(|row| row.feasible == (row.radius < r)),
    };
    let defect_below_d = measured < cfg.d;
    let pass = defect_below_d && r_star.is_some() && stays_infeasible && certificates_ok;
    Ok(E1Outcome {
        config: cfg.clone(),
        max_defect: measured,
        defect_below_d,
        rows,
        r_star,
        stays_infeasible,
        certificates_ok,
        edge_rows,
        pass,
    })
}

#[derive(Serialize)]
struct E1Verdicts<'a> {
    max_defect: String,
    defect_below_d: bool,
    r_star: Option<u32>,
    stays_infeasible: bool,
    certificates_ok: bool,
    radii: &'a [E1Row],
}

pub fn emit(outcome: &E1Outcome, out_dir: &Path) -> Result<ExperimentReport> {
    let verdicts = E1Verdicts {
        max_defect: cell(&outcome.max_defect),
        defect_below_d: outcome.defect_below_d,
        r_star: outcome.r_star,
        stays_infeasible: outcome.stays_infeasible,
        certificates_ok: outcome.certificates_ok,
        radii: &outcome.rows,
    };
    let mut report = ExperimentReport::new(
        "E1",
        "the pseudotrajectory stays finer than d yet becomes and remains infeasible past a swept radius, each time with a verified certificate of at most three constraints",
        outcome.pass,
        &outcome.config,
        &verdicts,
    )?;
    let radii_rows: Vec<Vec<String>> = outcome
        .rows
        .iter()
        .map(|r| {
            vec![
                r.radius.to_string(),
                r.elements.to_string(),
                r.feasible.to_string(),
                r.certificate_words.join(";"),
            ]
        })
        .collect();
    let p = write_csv(
        out_dir,
        "e1_radii.csv",
        &["radius", "elements", "feasible", "certificate_words"],
        &radii_rows,
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
            "e1_edges.csv",
            &["from", "generator", "to", "defect"],
            &edge_rows,
        )?;
        report.artifacts.push(artifact_name(out_dir, &p));
    }
    report.write(out_dir)?;
    Ok(report)
}
