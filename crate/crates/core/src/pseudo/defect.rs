//! Exact defect measurement over the interior edges of a ball.

use super::{PseudoError, Pseudotrajectory};
use crate::action::{LinearAction, RationalMatrix};
use crate::group::GeneratingSet;
use crate::numeric::{Rational};
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefectEdge {
    /// Ball index of the source element g.
    pub from: usize,
    /// Index into the generating set used for the scan.
    pub gen: usize,
    /// Ball index of the target element s*g.
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct DefectReport {
    /// Max over interior edges of dist(y_sg, f_s(y_g)); zero when the ball
    /// has no interior edges.
    pub max: Rational,
    pub worst: Option<DefectEdge>,
    pub interior_edges: usize,
    /// Edges leaving the ball, which the defect cannot see.
    pub boundary_skipped: usize,
    /// Certified slack when the trajectory stores midpoints: measured defects
    /// are within this bound of the ideal ones.
    pub err_bound: Rational,
}

/// Defect with respect to the ball's own generating set.
pub fn max_defect(
    traj: &Pseudotrajectory,
    action: &LinearAction,
) -> Result<DefectReport, PseudoError> {
    max_defect_with(traj, action, traj.ball().gens().clone())
}

/// Defect with respect to an arbitrary (possibly smaller) generating set;
/// edges whose endpoint leaves the stored ball are skipped and counted.
pub fn max_defect_with(
    traj: &Pseudotrajectory,
    action: &LinearAction,
    gens: GeneratingSet,
) -> Result<DefectReport, PseudoError> {
    let ball = traj.ball();
    if gens.family() != *ball.spec().family() || action.spec().family() != ball.spec().family() {
        return Err(PseudoError::Action(
            crate::action::ActionError::WrongFamily {
                expected: ball.spec().describe(),
                got: action.spec().describe(),
            },
        ));
    }
    if traj.dim() != action.dim() {
        return Err(PseudoError::DimensionMismatch);
    }
    let gen_mats: Vec<RationalMatrix> = (0..gens.len())
        .map(|i| action.matrix_of(&gens.get(i).element))
        .collect::<Result<_, _>>()?;
    let mut max = Rational::zero();
    let mut worst: Option<DefectEdge> = None;
    let mut interior = 0usize;
    let mut skipped = 0usize;
    for i in 0..ball.len() {
        for (si, ng) in gens.iter().enumerate() {
            let target = ng.element.multiply(ball.element(i))?;
            match ball.index_of(&target) {
                None => skipped += 1,
                Some(j) => {
                    interior += 1;
                    let pushed = gen_mats[si].apply(traj.point(i));
                    let defect = traj.point(j).sup_dist(&pushed);
                    if defect > max {
                        max = defect;
                        worst = Some(DefectEdge {
                            from: i,
                            gen: si,
                            to: j,
                        });
                    }
                }
            }
        }
    }
    let err_bound = if traj.err_bound().is_zero() {
        Rational::zero()
    } else {
        // A midpoint error of eta moves each defect by at most (1 + L) eta.
        let l = gen_mats
            .iter()
            .map(|m| m.op_norm_sup())
            .max()
            .expect("nonempty generating set");
        traj.err_bound() * (Rational::from_integer(1.into()) + l)
    };
    Ok(DefectReport {
        max,
        worst,
        interior_edges: interior,
        boundary_skipped: skipped,
        err_bound,
    })
}

/// Per-edge defects in scan order, as (from-word, generator label, to-word,
/// defect). Intended for CSV artifacts on modest balls.
pub fn edge_defect_rows(
    traj: &Pseudotrajectory,
    action: &LinearAction,
) -> Result<Vec<(String, String, String, Rational)>, PseudoError> {
    let ball = traj.ball();
    let gens = ball.gens();
    let gen_mats: Vec<RationalMatrix> = (0..gens.len())
        .map(|i| action.matrix_of(&gens.get(i).element))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for i in 0..ball.len() {
        for (si, ng) in gens.iter().enumerate() {
            let target = ng.element.multiply(ball.element(i))?;
            if let Some(j) = ball.index_of(&target) {
                let pushed = gen_mats[si].apply(traj.point(i));
                let defect = traj.point(j).sup_dist(&pushed);
                rows.push((
                    ball.element(i).to_word(),
                    ng.label.clone(),
                    ball.element(j).to_word(),
                    defect,
                ));
            }
        }
    }
    Ok(rows)
}
