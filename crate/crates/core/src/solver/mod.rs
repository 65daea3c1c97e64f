//! Exact feasibility of shadowing constraint systems.
//!
//! In the sup metric, asking for an orbit point x with
//! dist(f_g(x), y_g) <= eps for every g in a ball is asking that each
//! coordinate of M_g x stay within eps of the stored point, i.e. a finite
//! system of half-planes with rational data. This module decides such
//! systems exactly and, when they are infeasible, produces a certificate of
//! at most three half-planes whose joint emptiness is checked by an
//! independent positive-combination test rather than by the clipping code
//! that found them.
//!
//! Also here: a brute-force grid oracle used to cross-check verdicts, the
//! interval-shrinking solver for expanding diagonal maps along a single
//! fiber, and a coherence check that measures how far a family of fiberwise
//! solutions is from being one trajectory.

mod polygon;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::action::{ActionError, LinearAction, Point, RationalMatrix};
use crate::group::GroupError;
use crate::numeric::Rational;
use crate::pseudo::{max_defect, PseudoError, Pseudotrajectory};
use polygon::Polygon;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Pseudo(#[from] PseudoError),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveEpsilon(String),
    #[error("feasibility needs exact trajectory data; rerun the construction in exact mode")]
    TrajectoryNotExact,
    #[error("dimension mismatch between action, trajectory, and query points")]
    DimensionMismatch,
    #[error("grid step must be positive")]
    GridStepNonPositive,
    #[error("grid box has a lower corner above its upper corner")]
    GridBoxInverted,
    #[error("grid would have {points} points, over the cap of {cap}")]
    GridCapExceeded { points: u128, cap: usize },
    #[error("fiber window must contain at least one point")]
    WindowEmpty,
    #[error("fiber solving needs a diagonal matrix")]
    MatrixNotDiagonal,
    #[error("fiber solving needs every diagonal entry to have absolute value above one")]
    MatrixNotExpanding,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Where a constraint came from: the ball element, the coordinate, and the
/// side of the tolerance band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub word: String,
    pub coord: usize,
    pub upper: bool,
}

/// The closed half-plane a x1 + b x2 <= c (b = 0 in dimension one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    a: Rational,
    b: Rational,
    c: Rational,
    provenance: Provenance,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational, provenance: Provenance) -> HalfPlane {
        assert!(
            !a.is_zero() || !b.is_zero(),
            "half-plane normal must be nonzero"
        );
        HalfPlane { a, b, c, provenance }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Left-hand side at a point; a missing second coordinate reads as zero.
    pub fn eval(&self, p: &Point) -> Rational {
        let mut v = &self.a * p.coord(0);
        if p.dim() > 1 {
            v += &self.b * p.coord(1);
        }
        v
    }

    pub fn satisfied_by(&self, p: &Point) -> bool {
        self.eval(p) <= self.c
    }
}

impl std::fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}*x1 + {}*x2 <= {}  [g={}, coord {}, {}]",
            self.a,
            self.b,
            self.c,
            self.provenance.word,
            self.provenance.coord + 1,
            if self.provenance.upper { "upper" } else { "lower" },
        )
    }
}

/// A trajectory, the action it should shadow under, and the tolerance.
#[derive(Debug, Clone)]
pub struct ShadowingProblem<'a> {
    action: &'a LinearAction,
    traj: &'a Pseudotrajectory,
    epsilon: Rational,
}

impl<'a> ShadowingProblem<'a> {
    pub fn new(
        action: &'a LinearAction,
        traj: &'a Pseudotrajectory,
        epsilon: Rational,
    ) -> Result<Self, SolverError> {
        if !epsilon.is_positive() {
            return Err(SolverError::NonPositiveEpsilon(epsilon.to_string()));
        }
        if !traj.is_exact() {
            return Err(SolverError::TrajectoryNotExact);
        }
        if action.spec().family() != traj.ball().spec().family() {
            return Err(SolverError::Action(ActionError::WrongFamily {
                expected: traj.ball().spec().describe(),
                got: action.spec().describe(),
            }));
        }
        if action.dim() != traj.dim() {
            return Err(SolverError::DimensionMismatch);
        }
        Ok(ShadowingProblem {
            action,
            traj,
            epsilon,
        })
    }

    pub fn action(&self) -> &LinearAction {
        self.action
    }

    pub fn trajectory(&self) -> &Pseudotrajectory {
        self.traj
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }
}

/// The full constraint system, in ball order, coordinates inner,
/// upper side before lower. The first 2*dim constraints always describe the
/// tolerance box around the point stored at the identity.
pub fn shadow_constraints(problem: &ShadowingProblem) -> Result<Vec<HalfPlane>, SolverError> {
    let traj = problem.traj;
    let ball = traj.ball();
    let dim = problem.action.dim();
    let mats = crate::action::matrices_on_ball(problem.action, ball)?;
    let mut out = Vec::with_capacity(ball.len() * 2 * dim);
    for (i, m) in mats.iter().enumerate() {
        let word = ball.element(i).to_word();
        let y = traj.point(i);
        for coord in 0..dim {
            let row = m.row(coord);
            let a = row[0].clone();
            let b = if dim == 2 {
                row[1].clone()
            } else {
                Rational::zero()
            };
            out.push(HalfPlane::new(
                a.clone(),
                b.clone(),
                y.coord(coord) + &problem.epsilon,
                Provenance {
                    word: word.clone(),
                    coord,
                    upper: true,
                },
            ));
            out.push(HalfPlane::new(
                -a,
                -b,
                &problem.epsilon - y.coord(coord),
                Provenance {
                    word: word.clone(),
                    coord,
                    upper: false,
                },
            ));
        }
    }
    Ok(out)
}

/// A point satisfying every constraint, with the number of constraints that
/// hold with equality there.
#[derive(Debug, Clone)]
pub struct ShadowWitness {
    pub point: Point,
    pub tight_constraints: usize,
}

impl ShadowWitness {
    pub fn on_boundary(&self) -> bool {
        self.tight_constraints > 0
    }
}

/// Two or three half-planes from the system with empty joint intersection.
#[derive(Debug, Clone)]
pub struct InfeasibilityCertificate {
    pub planes: Vec<HalfPlane>,
}

impl InfeasibilityCertificate {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum FeasibilityVerdict {
    Feasible(ShadowWitness),
    Infeasible(InfeasibilityCertificate),
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Feasible(_))
    }

    pub fn witness(&self) -> Option<&ShadowWitness> {
        match self {
            FeasibilityVerdict::Feasible(w) => Some(w),
            FeasibilityVerdict::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&InfeasibilityCertificate> {
        match self {
            FeasibilityVerdict::Feasible(_) => None,
            FeasibilityVerdict::Infeasible(c) => Some(c),
        }
    }
}

/// Decide the constraint system exactly.
///
/// Feasible verdicts carry the lexicographically smallest vertex of the final
/// cell, re-substituted into every constraint before being returned.
/// Infeasible verdicts carry a certificate of at most three constraints,
/// validated with [`certificate_infeasible`].
pub fn feasible_shadow(problem: &ShadowingProblem) -> Result<FeasibilityVerdict, SolverError> {
    let constraints = shadow_constraints(problem)?;
    let verdict = match problem.action.dim() {
        1 => solve_interval(&constraints)?,
        2 => solve_polygon(&constraints)?,
        d => return Err(SolverError::Internal(format!("unsupported dimension {d}"))),
    };
    match verdict {
        FeasibilityVerdict::Feasible(mut w) => {
            if let Some(bad) = constraints.iter().find(|hp| !hp.satisfied_by(&w.point)) {
                return Err(SolverError::Internal(format!(
                    "witness fails constraint {bad}"
                )));
            }
            w.tight_constraints = constraints
                .iter()
                .filter(|hp| hp.eval(&w.point) == *hp.c())
                .count();
            Ok(FeasibilityVerdict::Feasible(w))
        }
        FeasibilityVerdict::Infeasible(cert) => {
            if !certificate_infeasible(&cert.planes) {
                return Err(SolverError::Internal(
                    "certificate rejected by the independent check".to_string(),
                ));
            }
            Ok(FeasibilityVerdict::Infeasible(cert))
        }
    }
}

fn solve_interval(constraints: &[HalfPlane]) -> Result<FeasibilityVerdict, SolverError> {
    let mut lo: Option<(Rational, usize)> = None;
    let mut hi: Option<(Rational, usize)> = None;
    for (k, hp) in constraints.iter().enumerate() {
        let a = hp.a();
        if a.is_zero() {
            return Err(SolverError::Internal(
                "one-dimensional constraint with zero coefficient".to_string(),
            ));
        }
        let bound = hp.c() / a;
        if a.is_positive() {
            if hi.as_ref().map_or(true, |(h, _)| bound < *h) {
                hi = Some((bound, k));
            }
        } else if lo.as_ref().map_or(true, |(l, _)| bound > *l) {
            lo = Some((bound, k));
        }
        if let (Some((l, li)), Some((h, hi_i))) = (&lo, &hi) {
            if l > h {
                let (first, second) = if li < hi_i { (*li, *hi_i) } else { (*hi_i, *li) };
                return Ok(FeasibilityVerdict::Infeasible(InfeasibilityCertificate {
                    planes: vec![constraints[first].clone(), constraints[second].clone()],
                }));
            }
        }
    }
    let (l, _) = lo.ok_or_else(|| {
        SolverError::Internal("no lower bound in a bounded system".to_string())
    })?;
    Ok(FeasibilityVerdict::Feasible(ShadowWitness {
        point: Point::one_d(l),
        tight_constraints: 0,
    }))
}

fn solve_polygon(constraints: &[HalfPlane]) -> Result<FeasibilityVerdict, SolverError> {
    if constraints.len() < 4 {
        return Err(SolverError::Internal(
            "two-dimensional system without the identity box".to_string(),
        ));
    }
    // The first four constraints are the box around the identity point;
    // x1 <= c0, -x1 <= c1, x2 <= c2, -x2 <= c3.
    debug_assert!(constraints[0].a().is_one() && constraints[0].b().is_zero());
    debug_assert!(constraints[2].a().is_zero() && constraints[2].b().is_one());
    let x_hi = constraints[0].c().clone();
    let x_lo = -constraints[1].c();
    let y_hi = constraints[2].c().clone();
    let y_lo = -constraints[3].c();
    if x_lo > x_hi || y_lo > y_hi {
        return Err(SolverError::Internal(
            "identity tolerance box is empty".to_string(),
        ));
    }
    let mut poly = Polygon::from_box(x_lo, x_hi, y_lo, y_hi);
    for (k, hp) in constraints.iter().enumerate().skip(4) {
        let next = poly.clip(hp.a(), hp.b(), hp.c());
        if next.is_empty() {
            return Ok(FeasibilityVerdict::Infeasible(shrink_certificate(
                constraints,
                k,
                &poly,
            )?));
        }
        poly = next;
    }
    let v = poly
        .lex_min_vertex()
        .ok_or_else(|| SolverError::Internal("empty feasible polygon survived".to_string()))?;
    Ok(FeasibilityVerdict::Feasible(ShadowWitness {
        point: Point::two_d(v.0, v.1),
        tight_constraints: 0,
    }))
}

/// When constraint `k` kills the cell, a small certificate always exists
/// among `k` and the constraints active at the vertex of the old cell that
/// comes closest to satisfying `k`: the killer plus one or two of them.
/// Candidates are tried in system order and validated independently.
fn shrink_certificate(
    constraints: &[HalfPlane],
    k: usize,
    before: &Polygon,
) -> Result<InfeasibilityCertificate, SolverError> {
    let killer = &constraints[k];
    let (min_val, vmin) = before
        .minimize(killer.a(), killer.b())
        .ok_or_else(|| SolverError::Internal("clipped an empty polygon".to_string()))?;
    debug_assert!(min_val > *killer.c());
    let vpoint = Point::two_d(vmin.0, vmin.1);
    let active: Vec<usize> = (0..k)
        .filter(|&i| constraints[i].eval(&vpoint) == *constraints[i].c())
        .collect();
    for &i in &active {
        let planes = vec![constraints[i].clone(), killer.clone()];
        if certificate_infeasible(&planes) {
            return Ok(InfeasibilityCertificate { planes });
        }
    }
    for (pos, &i) in active.iter().enumerate() {
        for &j in &active[pos + 1..] {
            let planes = vec![
                constraints[i].clone(),
                constraints[j].clone(),
                killer.clone(),
            ];
            if certificate_infeasible(&planes) {
                return Ok(InfeasibilityCertificate { planes });
            }
        }
    }
    Err(SolverError::Internal(
        "no two- or three-plane certificate at the minimizing vertex".to_string(),
    ))
}

fn cross(p: &HalfPlane, q: &HalfPlane) -> Rational {
    p.a() * q.b() - q.a() * p.b()
}

fn dot(p: &HalfPlane, q: &HalfPlane) -> Rational {
    p.a() * q.a() + p.b() * q.b()
}

/// Two antiparallel constraints whose bands fail to overlap.
fn pair_infeasible(p: &HalfPlane, q: &HalfPlane) -> bool {
    if !cross(p, q).is_zero() || !dot(p, q).is_negative() {
        return false;
    }
    // q's normal is -s times p's with s > 0; then s*c_p + c_q < 0 means
    // s*(p's bound) contradicts q's bound.
    let s = if !p.a().is_zero() {
        -(q.a() / p.a())
    } else {
        -(q.b() / p.b())
    };
    debug_assert!(s.is_positive());
    (&s * p.c() + q.c()).is_negative()
}

/// Independent emptiness check: the planes are jointly infeasible exactly
/// when some nonnegative combination of their normals vanishes while the
/// same combination of their bounds is negative. For two planes this is the
/// antiparallel-gap test; for three in general position the combination is
/// unique up to scale and is built from cross products.
pub fn certificate_infeasible(planes: &[HalfPlane]) -> bool {
    match planes {
        [p, q] => pair_infeasible(p, q),
        [p, q, r] => {
            let pairs = [(p, q, r), (p, r, q), (q, r, p)];
            for (u, v, _) in &pairs {
                if pair_infeasible(u, v) {
                    return true;
                }
            }
            for (u, v, other) in &pairs {
                if cross(u, v).is_zero() {
                    if dot(u, v).is_negative() {
                        // A proper slab; one more half-plane in any other
                        // direction still leaves points along the slab.
                        return false;
                    }
                    // Same direction: keep the tighter bound and fall back
                    // to the pair test against the remaining plane.
                    let s = if !u.a().is_zero() {
                        v.a() / u.a()
                    } else {
                        v.b() / u.b()
                    };
                    debug_assert!(s.is_positive());
                    let tight_c = std::cmp::min(u.c().clone(), v.c() / &s);
                    let merged = HalfPlane::new(
                        u.a().clone(),
                        u.b().clone(),
                        tight_c,
                        u.provenance.clone(),
                    );
                    return pair_infeasible(&merged, other);
                }
            }
            let l1 = cross(q, r);
            let l2 = cross(r, p);
            let l3 = cross(p, q);
            debug_assert!(
                (&l1 * p.a() + &l2 * q.a() + &l3 * r.a()).is_zero()
                    && (&l1 * p.b() + &l2 * q.b() + &l3 * r.b()).is_zero()
            );
            let all_pos = l1.is_positive() && l2.is_positive() && l3.is_positive();
            let all_neg = l1.is_negative() && l2.is_negative() && l3.is_negative();
            if !(all_pos || all_neg) {
                // The normals sit in an open half-plane, so marching in the
                // opposite direction satisfies everything eventually.
                return false;
            }
            let combined = &l1 * p.c() + &l2 * q.c() + &l3 * r.c();
            if all_pos {
                combined.is_negative()
            } else {
                combined.is_positive()
            }
        }
        _ => false,
    }
}

/// Scan an axis-aligned grid for a satisfying point; `None` means no grid
/// point works, which says nothing about off-grid points. The scan order is
/// lexicographic from the lower corner, so the result is deterministic.
pub fn grid_oracle(
    problem: &ShadowingProblem,
    step: &Rational,
    lower: &Point,
    upper: &Point,
    cap: usize,
) -> Result<Option<Point>, SolverError> {
    if !step.is_positive() {
        return Err(SolverError::GridStepNonPositive);
    }
    let dim = problem.action.dim();
    if lower.dim() != dim || upper.dim() != dim {
        return Err(SolverError::DimensionMismatch);
    }
    let mut counts = Vec::with_capacity(dim);
    for i in 0..dim {
        if lower.coord(i) > upper.coord(i) {
            return Err(SolverError::GridBoxInverted);
        }
        let steps = ((upper.coord(i) - lower.coord(i)) / step).floor().to_integer();
        let n = steps.to_u128().unwrap_or(u128::MAX).saturating_add(1);
        counts.push(n);
    }
    let total = counts
        .iter()
        .try_fold(1u128, |acc, &n| acc.checked_mul(n))
        .unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(SolverError::GridCapExceeded { points: total, cap });
    }
    let constraints = shadow_constraints(problem)?;
    let satisfied = |p: &Point| constraints.iter().all(|hp| hp.satisfied_by(p));
    let mut x = lower.coord(0).clone();
    for _ in 0..counts[0] {
        if dim == 1 {
            let p = Point::one_d(x.clone());
            if satisfied(&p) {
                return Ok(Some(p));
            }
        } else {
            let mut y = lower.coord(1).clone();
            for _ in 0..counts[1] {
                let p = Point::two_d(x.clone(), y.clone());
                if satisfied(&p) {
                    return Ok(Some(p));
                }
                y += step;
            }
        }
        x += step;
    }
    Ok(None)
}

/// Intersection of the pulled-back tolerance boxes along one fiber; may be
/// empty, in which case the raw (inverted) bounds are kept for reporting.
#[derive(Debug, Clone)]
pub struct AdmissibleBox {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl AdmissibleBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self, i: usize) -> &Rational {
        &self.lo[i]
    }

    pub fn hi(&self, i: usize) -> &Rational {
        &self.hi[i]
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn widths(&self) -> Option<Vec<Rational>> {
        if self.is_empty() {
            return None;
        }
        Some(self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect())
    }

    pub fn max_width(&self) -> Option<Rational> {
        self.widths().map(|w| {
            w.into_iter()
                .max()
                .expect("boxes have at least one coordinate")
        })
    }

    pub fn center(&self) -> Option<Point> {
        if self.is_empty() {
            return None;
        }
        let half = Rational::new(1.into(), 2.into());
        Some(Point::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(l, h)| (l + h) * &half)
                .collect(),
        ))
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= *p.coord(i) && *p.coord(i) <= self.hi[i])
    }
}

/// Solve the shadowing system along the orbit of a single expanding diagonal
/// map: the window lists z_0, z_1, ... with z_k standing at the k-th forward
/// image, and each pulled-back box [z_k - eps, z_k + eps] / lambda^k shrinks
/// geometrically, so the intersection is an explicit box.
pub fn fiber_shadow_expanding(
    mat: &RationalMatrix,
    window: &[Point],
    epsilon: &Rational,
) -> Result<AdmissibleBox, SolverError> {
    if !epsilon.is_positive() {
        return Err(SolverError::NonPositiveEpsilon(epsilon.to_string()));
    }
    if window.is_empty() {
        return Err(SolverError::WindowEmpty);
    }
    let dim = mat.dim();
    if window.iter().any(|p| p.dim() != dim) {
        return Err(SolverError::DimensionMismatch);
    }
    for r in 0..dim {
        for c in 0..dim {
            if r != c && !mat.entry(r, c).is_zero() {
                return Err(SolverError::MatrixNotDiagonal);
            }
        }
        if mat.entry(r, r).abs() <= Rational::one() {
            return Err(SolverError::MatrixNotExpanding);
        }
    }
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for j in 0..dim {
        let lam = mat.entry(j, j);
        let mut lam_pow = Rational::one();
        let mut cur_lo: Option<Rational> = None;
        let mut cur_hi: Option<Rational> = None;
        for (k, z) in window.iter().enumerate() {
            if k > 0 {
                lam_pow *= lam;
            }
            let mut l = (z.coord(j) - epsilon) / &lam_pow;
            let mut h = (z.coord(j) + epsilon) / &lam_pow;
            if lam_pow.is_negative() {
                std::mem::swap(&mut l, &mut h);
            }
            cur_lo = Some(cur_lo.map_or(l.clone(), |c| std::cmp::max(c, l)));
            cur_hi = Some(cur_hi.map_or(h.clone(), |c| std::cmp::min(c, h)));
        }
        lo.push(cur_lo.expect("window is nonempty"));
        hi.push(cur_hi.expect("window is nonempty"));
    }
    Ok(AdmissibleBox { lo, hi })
}

/// Worst mismatch between neighboring points of a trajectory, with the edge
/// spelled out in words.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub max_defect: Rational,
    /// (source word, generator label, target word) of a worst edge, when the
    /// defect is nonzero.
    pub worst_edge: Option<(String, String, String)>,
    pub interior_edges: usize,
}

/// Measure how far a family of per-fiber (or otherwise assembled) points is
/// from one coherent trajectory for the action.
pub fn coherence_check(
    action: &LinearAction,
    traj: &Pseudotrajectory,
) -> Result<CoherenceReport, SolverError> {
    let report = max_defect(traj, action)?;
    let ball = traj.ball();
    let worst_edge = report.worst.map(|e| {
        (
            ball.element(e.from).to_word(),
            ball.gens().get(e.gen).label.clone(),
            ball.element(e.to).to_word(),
        )
    });
    Ok(CoherenceReport {
        max_defect: report.max,
        worst_edge,
        interior_edges: report.interior_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{CayleyBall, GeneratingSet, GroupElement, GroupSpec};
    use crate::numeric::{rat, rat_i64};
    use crate::pseudo::{bs_counterexample, exact_orbit, CounterexampleParams, NumericMode};
    use std::sync::Arc;

    fn plane(a: i64, b: i64, c: Rational) -> HalfPlane {
        HalfPlane::new(
            rat_i64(a),
            rat_i64(b),
            c,
            Provenance {
                word: "e".to_string(),
                coord: 0,
                upper: true,
            },
        )
    }

    fn bs2_action() -> LinearAction {
        let spec = GroupSpec::parse("BS(1,2)").unwrap();
        let a = RationalMatrix::from_rows_2([
            [rat_i64(1), rat_i64(0)],
            [rat_i64(1), rat_i64(1)],
        ])
        .unwrap();
        let b = RationalMatrix::diagonal(&[rat_i64(2), rat_i64(4)]).unwrap();
        LinearAction::load(&spec, vec![a, b]).unwrap()
    }

    fn bs2_ball(radius: u32) -> Arc<CayleyBall> {
        let spec = GroupSpec::parse("BS(1,2)").unwrap();
        let gens = GeneratingSet::standard(&spec);
        Arc::new(CayleyBall::build(&spec, &gens, radius).unwrap())
    }

    fn z1_action(factor: i64) -> LinearAction {
        let spec = GroupSpec::parse("Z^1").unwrap();
        let m = RationalMatrix::diagonal(&[rat_i64(factor)]).unwrap();
        LinearAction::load(&spec, vec![m]).unwrap()
    }

    fn z1_ball(radius: u32) -> Arc<CayleyBall> {
        let spec = GroupSpec::parse("Z^1").unwrap();
        let gens = GeneratingSet::standard(&spec);
        Arc::new(CayleyBall::build(&spec, &gens, radius).unwrap())
    }

    #[test]
    fn pair_certificates() {
        // x <= 0 and x >= 1 clash; x <= 1 and x >= 0 do not.
        assert!(certificate_infeasible(&[
            plane(1, 0, rat_i64(0)),
            plane(-1, 0, rat_i64(-1)),
        ]));
        assert!(!certificate_infeasible(&[
            plane(1, 0, rat_i64(1)),
            plane(-1, 0, rat_i64(0)),
        ]));
        // Same direction twice is never a certificate.
        assert!(!certificate_infeasible(&[
            plane(1, 0, rat_i64(0)),
            plane(2, 0, rat_i64(-1)),
        ]));
    }

    #[test]
    fn triple_certificates() {
        // x <= 0, y <= 0, x + y >= 1.
        assert!(certificate_infeasible(&[
            plane(1, 0, rat_i64(0)),
            plane(0, 1, rat_i64(0)),
            plane(-1, -1, rat_i64(-1)),
        ]));
        // Same normals but a reachable corner.
        assert!(!certificate_infeasible(&[
            plane(1, 0, rat_i64(0)),
            plane(0, 1, rat_i64(0)),
            plane(-1, -1, rat_i64(5)),
        ]));
        // Normals in a half-plane: always feasible.
        assert!(!certificate_infeasible(&[
            plane(1, 0, rat_i64(0)),
            plane(0, 1, rat_i64(0)),
            plane(1, 1, rat_i64(-10)),
        ]));
        // Parallel pair reduction: x <= 3 and 2x <= 2 tighten to x <= 1,
        // which clashes with x >= 2.
        assert!(certificate_infeasible(&[
            plane(1, 0, rat_i64(3)),
            plane(2, 0, rat_i64(2)),
            plane(-1, 0, rat_i64(-2)),
        ]));
        // A proper slab plus a transverse plane is feasible.
        assert!(!certificate_infeasible(&[
            plane(1, 0, rat_i64(1)),
            plane(-1, 0, rat_i64(1)),
            plane(0, 1, rat_i64(-100)),
        ]));
    }

    #[test]
    fn exact_orbit_is_feasible() {
        let action = bs2_action();
        let ball = bs2_ball(3);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::two_d(rat(1, 7), rat(1, 9)))
            .unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
        let verdict = feasible_shadow(&problem).unwrap();
        let w = verdict.witness().expect("orbit shadows itself");
        let constraints = shadow_constraints(&problem).unwrap();
        assert!(constraints.iter().all(|hp| hp.satisfied_by(&w.point)));
        assert!(w.on_boundary());
    }

    #[test]
    fn identity_box_shape() {
        let action = bs2_action();
        let ball = bs2_ball(1);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::two_d(rat_i64(0), rat_i64(0)))
            .unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat(1, 2)).unwrap();
        let constraints = shadow_constraints(&problem).unwrap();
        assert_eq!(constraints.len(), ball.len() * 4);
        assert_eq!(constraints[0].provenance().word, "e");
        assert!(constraints[0].provenance().upper);
        assert_eq!(*constraints[0].a(), rat_i64(1));
        assert_eq!(*constraints[0].c(), rat(1, 2));
        assert_eq!(*constraints[1].a(), rat_i64(-1));
    }

    #[test]
    fn counterexample_infeasible_with_small_certificate() {
        let action = bs2_action();
        let ball = bs2_ball(6);
        let params = CounterexampleParams {
            lambda: rat_i64(2),
            d: rat(1, 10),
            mode: NumericMode::Exact,
        };
        let traj = bs_counterexample(&params, Arc::clone(&ball)).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
        let verdict = feasible_shadow(&problem).unwrap();
        let cert = verdict.certificate().expect("too spread out to shadow");
        assert!(cert.len() <= 3);
        assert!(certificate_infeasible(&cert.planes));
    }

    #[test]
    fn one_dimensional_witness_is_leftmost() {
        let action = z1_action(2);
        let ball = z1_ball(4);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::one_d(rat_i64(1))).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat(1, 2)).unwrap();
        let verdict = feasible_shadow(&problem).unwrap();
        // The tightest lower bound comes from the radius-4 endpoint:
        // |16x - 16| <= 1/2 gives x >= 1 - 1/32.
        let w = verdict.witness().unwrap();
        assert_eq!(w.point, Point::one_d(rat(31, 32)));
    }

    #[test]
    fn one_dimensional_spike_infeasible() {
        let ball = z1_ball(4);
        let action = z1_action(2);
        let mut points: Vec<Point> = ball
            .elements()
            .iter()
            .map(|_| Point::one_d(rat_i64(0)))
            .collect();
        let spike = ball.index_of(&GroupElement::abelian(vec![4])).unwrap();
        points[spike] = Point::one_d(rat_i64(1));
        let traj = Pseudotrajectory::from_points(
            Arc::clone(&ball),
            points,
            NumericMode::Exact,
            None,
            Rational::zero(),
        )
        .unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat(1, 100)).unwrap();
        let verdict = feasible_shadow(&problem).unwrap();
        let cert = verdict.certificate().expect("spike cannot be shadowed");
        assert_eq!(cert.len(), 2);
    }

    #[test]
    fn grid_oracle_agrees_on_fat_and_empty_regions() {
        let action = bs2_action();
        let params = CounterexampleParams {
            lambda: rat_i64(2),
            d: rat(1, 10),
            mode: NumericMode::Exact,
        };
        // Small ball: the region around the base point is fat, and the grid
        // hits it.
        let ball = bs2_ball(2);
        let traj = bs_counterexample(&params, Arc::clone(&ball)).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
        assert!(feasible_shadow(&problem).unwrap().is_feasible());
        let lower = Point::two_d(rat_i64(-1), rat_i64(-1));
        let upper = Point::two_d(rat_i64(1), rat_i64(1));
        let hit = grid_oracle(&problem, &rat(1, 4), &lower, &upper, 10_000).unwrap();
        assert!(hit.is_some());
        // Large ball: provably empty, so no grid point can satisfy it.
        let ball = bs2_ball(6);
        let traj = bs_counterexample(&params, Arc::clone(&ball)).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
        assert!(!feasible_shadow(&problem).unwrap().is_feasible());
        let hit = grid_oracle(&problem, &rat(1, 4), &lower, &upper, 10_000).unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn grid_cap_and_shape_errors() {
        let action = z1_action(2);
        let ball = z1_ball(1);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::one_d(rat_i64(0))).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
        let lo = Point::one_d(rat_i64(0));
        let hi = Point::one_d(rat_i64(1));
        assert!(matches!(
            grid_oracle(&problem, &rat(1, 1000), &lo, &hi, 10),
            Err(SolverError::GridCapExceeded { .. })
        ));
        assert!(matches!(
            grid_oracle(&problem, &rat_i64(0), &lo, &hi, 10),
            Err(SolverError::GridStepNonPositive)
        ));
        assert!(matches!(
            grid_oracle(&problem, &rat(1, 2), &hi, &lo, 10),
            Err(SolverError::GridBoxInverted)
        ));
    }

    #[test]
    fn fiber_box_for_flat_window() {
        let mat = RationalMatrix::diagonal(&[rat_i64(3), rat_i64(6)]).unwrap();
        let window: Vec<Point> = (0..6).map(|_| Point::zero(2)).collect();
        let boxed = fiber_shadow_expanding(&mat, &window, &rat_i64(1)).unwrap();
        assert!(!boxed.is_empty());
        assert_eq!(*boxed.lo(0), rat(-1, 243));
        assert_eq!(*boxed.hi(0), rat(1, 243));
        assert_eq!(*boxed.lo(1), rat(-1, 7776));
        assert_eq!(*boxed.hi(1), rat(1, 7776));
        assert_eq!(boxed.max_width().unwrap(), rat(2, 243));
        let c = boxed.center().unwrap();
        assert_eq!(c, Point::zero(2));
        assert!(boxed.contains(&c));
    }

    #[test]
    fn fiber_box_can_be_empty() {
        let mat = RationalMatrix::diagonal(&[rat_i64(3), rat_i64(6)]).unwrap();
        let window = vec![Point::zero(2), Point::two_d(rat_i64(10), rat_i64(0))];
        let boxed = fiber_shadow_expanding(&mat, &window, &rat_i64(1)).unwrap();
        assert!(boxed.is_empty());
        assert!(boxed.widths().is_none());
        assert!(boxed.center().is_none());
    }

    #[test]
    fn fiber_box_negative_eigenvalue() {
        let mat = RationalMatrix::diagonal(&[rat_i64(-2)]).unwrap();
        let window = vec![Point::one_d(rat_i64(0)), Point::one_d(rat_i64(0))];
        let boxed = fiber_shadow_expanding(&mat, &window, &rat_i64(1)).unwrap();
        assert_eq!(*boxed.lo(0), rat(-1, 2));
        assert_eq!(*boxed.hi(0), rat(1, 2));
    }

    #[test]
    fn fiber_rejects_bad_matrices() {
        let shear = RationalMatrix::from_rows_2([
            [rat_i64(2), rat_i64(1)],
            [rat_i64(0), rat_i64(2)],
        ])
        .unwrap();
        let window = vec![Point::zero(2)];
        assert!(matches!(
            fiber_shadow_expanding(&shear, &window, &rat_i64(1)),
            Err(SolverError::MatrixNotDiagonal)
        ));
        let slow = RationalMatrix::diagonal(&[rat_i64(1), rat_i64(3)]).unwrap();
        assert!(matches!(
            fiber_shadow_expanding(&slow, &window, &rat_i64(1)),
            Err(SolverError::MatrixNotExpanding)
        ));
    }

    #[test]
    fn coherent_orbit_has_zero_defect() {
        let action = bs2_action();
        let ball = bs2_ball(3);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::two_d(rat_i64(1), rat_i64(2)))
            .unwrap();
        let report = coherence_check(&action, &traj).unwrap();
        assert!(report.max_defect.is_zero());
        assert!(report.worst_edge.is_none());
        assert!(report.interior_edges > 0);
    }

    #[test]
    fn problem_validation() {
        let action = bs2_action();
        let ball = bs2_ball(2);
        let traj = exact_orbit(&action, Arc::clone(&ball), &Point::zero(2)).unwrap();
        assert!(matches!(
            ShadowingProblem::new(&action, &traj, rat_i64(0)),
            Err(SolverError::NonPositiveEpsilon(_))
        ));
        let sloppy = Pseudotrajectory::from_points(
            Arc::clone(&ball),
            traj.points().to_vec(),
            NumericMode::Interval { precision_bits: 64 },
            None,
            rat(1, 1000),
        )
        .unwrap();
        assert!(matches!(
            ShadowingProblem::new(&action, &sloppy, rat_i64(1)),
            Err(SolverError::TrajectoryNotExact)
        ));
    }
}
