//! Pseudotrajectories over Cayley balls.
//!
//! A pseudotrajectory assigns a point of Q^d to every element of a ball. The
//! defect of an edge (g, sg) is dist(y_sg, f_s(y_g)); a d-pseudotrajectory
//! keeps every defect below d. This module builds the families of
//! pseudotrajectories the experiments need, measures defects exactly, and
//! round-trips trajectories through a TSV format.

mod build;
mod defect;
mod io;

pub use build::{
    bs_counterexample, exact_orbit, free_two_branch, lift_z_to_free, perturbed_orbit,
    CounterexampleParams, TwoBranchReport, ZWindow,
};
pub use defect::{edge_defect_rows, max_defect, max_defect_with, DefectEdge, DefectReport};
pub use io::{read_tsv, read_tsv_file, write_tsv, write_tsv_file};

use crate::action::Point;
use crate::group::CayleyBall;
use crate::numeric::Rational;
use num_traits::Zero;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PseudoError {
    #[error(transparent)]
    Group(#[from] crate::group::GroupError),
    #[error(transparent)]
    Action(#[from] crate::action::ActionError),
    #[error(transparent)]
    Interval(#[from] crate::numeric::interval::IntervalError),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(String),
    #[error("scaling parameter {lambda} outside the admissible range ({reason})")]
    LambdaRange { lambda: String, reason: String },
    #[error("exact mode requires lambda = n; use the interval mode instead")]
    ExactNeedsIntegerExponent,
    #[error("branch letter `{0}` must be a single generator distinct from the leading letter of g")]
    BadBranchLetter(String),
    #[error("designated element must not be the identity")]
    IdentityDesignee,
    #[error("base points must be {0} apart at most (got {1})")]
    BranchSeparation(String, String),
    #[error("window indices [{lo}, {hi}] do not cover the scaled ball range [{need_lo}, {need_hi}]")]
    WindowTooShort {
        lo: i64,
        hi: i64,
        need_lo: i64,
        need_hi: i64,
    },
    #[error("trajectory file malformed at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("point dimensions are inconsistent")]
    DimensionMismatch,
}

/// How point coordinates were produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericMode {
    /// Every coordinate is exactly the intended value.
    Exact,
    /// Coordinates are midpoints of certified enclosures computed at the
    /// given binary precision; the trajectory carries the max half-width.
    Interval { precision_bits: u32 },
}

/// Points over a ball, together with the numeric pedigree needed to interpret
/// defect measurements.
#[derive(Debug, Clone)]
pub struct Pseudotrajectory {
    ball: Arc<CayleyBall>,
    points: Vec<Point>,
    mode: NumericMode,
    /// Tolerance the construction aimed for, when one exists.
    declared_d: Option<Rational>,
    /// Certified bound on the distance of each stored point from its ideal
    /// value; zero in exact mode.
    err_bound: Rational,
}

impl Pseudotrajectory {
    pub fn from_points(
        ball: Arc<CayleyBall>,
        points: Vec<Point>,
        mode: NumericMode,
        declared_d: Option<Rational>,
        err_bound: Rational,
    ) -> Result<Pseudotrajectory, PseudoError> {
        assert_eq!(ball.len(), points.len(), "one point per ball element");
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(PseudoError::DimensionMismatch);
        }
        Ok(Pseudotrajectory {
            ball,
            points,
            mode,
            declared_d,
            err_bound,
        })
    }

    pub fn ball(&self) -> &CayleyBall {
        &self.ball
    }

    pub fn ball_arc(&self) -> Arc<CayleyBall> {
        Arc::clone(&self.ball)
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn mode(&self) -> &NumericMode {
        &self.mode
    }

    pub fn declared_d(&self) -> Option<&Rational> {
        self.declared_d.as_ref()
    }

    pub fn err_bound(&self) -> &Rational {
        &self.err_bound
    }

    pub fn is_exact(&self) -> bool {
        self.mode == NumericMode::Exact && self.err_bound.is_zero()
    }

    /// The point attached to the identity.
    pub fn base_point(&self) -> &Point {
        &self.points[0]
    }
}
