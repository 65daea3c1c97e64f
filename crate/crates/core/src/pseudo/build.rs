//! Constructors for the pseudotrajectory families used by the experiments.

use super::{NumericMode, PseudoError, Pseudotrajectory};
use crate::action::{LinearAction, Point, RationalMatrix};
use crate::group::{CayleyBall, Family, GroupElement, Letter};
use crate::numeric::interval::{log_ratio_interval, pow_interval, RatInterval};
use crate::numeric::{rat_i64, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn check_family(ball: &CayleyBall, action: &LinearAction) -> Result<(), PseudoError> {
    if ball.spec().family() != action.spec().family() {
        return Err(PseudoError::Action(
            crate::action::ActionError::WrongFamily {
                expected: action.spec().describe(),
                got: ball.spec().describe(),
            },
        ));
    }
    Ok(())
}

/// The orbit of x0 evaluated along the ball's BFS tree; a 0-pseudotrajectory
/// by construction.
pub fn exact_orbit(
    action: &LinearAction,
    ball: Arc<CayleyBall>,
    x0: &Point,
) -> Result<Pseudotrajectory, PseudoError> {
    check_family(&ball, action)?;
    if x0.dim() != action.dim() {
        return Err(PseudoError::Action(
            crate::action::ActionError::PointDimension,
        ));
    }
    let gen_mats: Vec<RationalMatrix> = (0..ball.gens().len())
        .map(|i| action.matrix_of(&ball.gens().get(i).element))
        .collect::<Result<_, _>>()?;
    let mut points: Vec<Point> = Vec::with_capacity(ball.len());
    points.push(x0.clone());
    for i in 1..ball.len() {
        let edge = ball.parent(i).expect("tree edge");
        let p = gen_mats[edge.gen].apply(&points[edge.parent]);
        points.push(p);
    }
    Pseudotrajectory::from_points(ball, points, NumericMode::Exact, None, Rational::zero())
}

/// Noise amplitude drawn per coordinate: k / 2^21 with |k| <= 2^20, so raw
/// offsets live in [-1/2, 1/2] with exactly representable dyadic values.
fn unit_noise(rng: &mut ChaCha8Rng) -> Rational {
    let k: i64 = rng.gen_range(-(1 << 20)..=(1 << 20));
    Rational::new(k.into(), (1i64 << 21).into())
}

/// The orbit of x0 with independent noise on every non-identity element,
/// rescaled so the measured defect is exactly d/2. Deterministic in `seed`.
pub fn perturbed_orbit(
    action: &LinearAction,
    ball: Arc<CayleyBall>,
    x0: &Point,
    d: &Rational,
    seed: u64,
) -> Result<Pseudotrajectory, PseudoError> {
    if !d.is_positive() {
        return Err(PseudoError::NonPositiveTolerance(d.to_string()));
    }
    let exact = exact_orbit(action, Arc::clone(&ball), x0)?;
    let dim = action.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // A zero defect can only happen if every draw is zero; retry on the same
    // stream so the construction stays total without special cases.
    for _attempt in 0..64 {
        let mut raw: Vec<Point> = Vec::with_capacity(ball.len());
        raw.push(x0.clone());
        for i in 1..ball.len() {
            let noise = Point::new((0..dim).map(|_| unit_noise(&mut rng)).collect());
            raw.push(exact.point(i).add(&noise));
        }
        let raw_traj = Pseudotrajectory::from_points(
            Arc::clone(&ball),
            raw,
            NumericMode::Exact,
            None,
            Rational::zero(),
        )?;
        let measured = super::defect::max_defect(&raw_traj, action)?;
        if measured.max.is_zero() {
            continue;
        }
        // Defects are linear in the offsets from the exact orbit, so scaling
        // the offsets scales the max defect exactly onto d/2.
        let scale = d / (rat_i64(2) * &measured.max);
        let points: Vec<Point> = (0..ball.len())
            .map(|i| {
                let offset = raw_traj.point(i).sub(exact.point(i));
                exact.point(i).add(&offset.scale(&scale))
            })
            .collect();
        return Pseudotrajectory::from_points(
            ball,
            points,
            NumericMode::Exact,
            Some(d.clone()),
            Rational::zero(),
        );
    }
    unreachable!("random defect was zero 64 times in a row");
}

/// Parameters of the non-shadowable trajectory over BS(1,n).
#[derive(Debug, Clone)]
pub struct CounterexampleParams {
    /// Expansion rate of the first coordinate; must lie in (1, n].
    pub lambda: Rational,
    /// Target pseudotrajectory tolerance.
    pub d: Rational,
    pub mode: NumericMode,
}

impl CounterexampleParams {
    /// The Hölder exponent ln(lambda)/ln(n) as an enclosure.
    pub fn beta_interval(&self, n: u32, prec: u32) -> Result<RatInterval, PseudoError> {
        Ok(log_ratio_interval(
            &self.lambda,
            &rat_i64(i64::from(n)),
            prec,
        )?)
    }
}

/// The trajectory y_g = (d/3) (（1+beta) |x|^beta, sign(x) |x|^(1+beta))
/// evaluated at the skew-action coordinate x of g. Every b-edge is exact and
/// every a-edge has defect below d, yet no orbit shadows it once the ball is
/// deep enough.
///
/// For lambda = n the exponent beta is 1 and everything is rational; this is
/// the `Exact` mode. Other lambda in (1, n) require `Interval` mode, which
/// stores certified midpoints.
pub fn bs_counterexample(
    params: &CounterexampleParams,
    ball: Arc<CayleyBall>,
) -> Result<Pseudotrajectory, PseudoError> {
    let n = match ball.spec().family() {
        Family::BaumslagSolitar { n } => *n,
        _ => {
            return Err(PseudoError::Action(
                crate::action::ActionError::WrongFamily {
                    expected: "BS(1,n)".to_string(),
                    got: ball.spec().describe(),
                },
            ))
        }
    };
    if !params.d.is_positive() {
        return Err(PseudoError::NonPositiveTolerance(params.d.to_string()));
    }
    let n_rat = rat_i64(i64::from(n));
    if params.lambda <= Rational::one() {
        return Err(PseudoError::LambdaRange {
            lambda: params.lambda.to_string(),
            reason: "must exceed 1".to_string(),
        });
    }
    if params.lambda > n_rat {
        return Err(PseudoError::LambdaRange {
            lambda: params.lambda.to_string(),
            reason: format!("must not exceed n = {n}"),
        });
    }
    let third = &params.d / rat_i64(3);
    match &params.mode {
        NumericMode::Exact => {
            if params.lambda != n_rat {
                return Err(PseudoError::ExactNeedsIntegerExponent);
            }
            // beta = 1: y = (d/3) (2|x|, sign(x) x^2), and the level drops out:
            // for g = (t, m) the skew coordinate is x = t n^-m at level m, and
            // lambda^m |x| = |t| exactly.
            let points: Vec<Point> = ball
                .elements()
                .iter()
                .map(|g| {
                    let (_, t, _) = g.bs_coords().expect("BS ball");
                    let y1 = rat_i64(2) * &third * t.abs();
                    // sign(t) |t|^2 = t |t|
                    let y2 = &third * t * t.abs();
                    Point::two_d(y1, y2)
                })
                .collect();
            Pseudotrajectory::from_points(
                ball,
                points,
                NumericMode::Exact,
                Some(params.d.clone()),
                Rational::zero(),
            )
        }
        NumericMode::Interval { precision_bits } => {
            let prec = *precision_bits;
            let beta = params.beta_interval(n, prec)?;
            let one_plus_beta = beta.add(&RatInterval::point(Rational::one()));
            let mut err = Rational::zero();
            let mut points: Vec<Point> = Vec::with_capacity(ball.len());
            for g in ball.elements() {
                let (_, t, _) = g.bs_coords().expect("BS ball");
                let s = t.abs();
                let pw = pow_interval(&s, &beta, prec)?;
                let y1 = pw.mul(&one_plus_beta).scale(&third);
                // sign(t) |t|^(1+beta) = t * |t|^beta
                let y2 = pw.scale(&(&third * t));
                err = err.max(y1.half_width()).max(y2.half_width());
                points.push(Point::two_d(y1.midpoint(), y2.midpoint()));
            }
            Pseudotrajectory::from_points(
                ball,
                points,
                NumericMode::Interval {
                    precision_bits: prec,
                },
                Some(params.d.clone()),
                err,
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoBranchReport {
    /// True when the two base points coincide, making the construction an
    /// exact orbit.
    pub degenerate: bool,
    /// Elements whose normal form starts (innermost letter) with the branch
    /// generator.
    pub branch_size: usize,
    pub trunk_size: usize,
}

/// Two-branch pseudotrajectory over a free group: elements whose normal form
/// starts with the branch letter q follow the orbit of f_q^-1(omega), all
/// others follow f_q^-1(omega0). All defect concentrates on the edge pair
/// between e and q.
pub fn free_two_branch(
    action: &LinearAction,
    ball: Arc<CayleyBall>,
    g: &GroupElement,
    q: &GroupElement,
    d1: &Rational,
    omega0: &Point,
    omega: &Point,
) -> Result<(Pseudotrajectory, TwoBranchReport), PseudoError> {
    check_family(&ball, action)?;
    if !matches!(ball.spec().family(), Family::Free { .. }) {
        return Err(PseudoError::Action(
            crate::action::ActionError::WrongFamily {
                expected: "F(k)".to_string(),
                got: ball.spec().describe(),
            },
        ));
    }
    if !d1.is_positive() {
        return Err(PseudoError::NonPositiveTolerance(d1.to_string()));
    }
    let g_word = g.as_free_word().expect("free family");
    if g_word.is_empty() {
        return Err(PseudoError::IdentityDesignee);
    }
    let q_word = q.as_free_word().expect("free family");
    let q_letter: Letter = match q_word {
        [l] => *l,
        _ => return Err(PseudoError::BadBranchLetter(q.to_word())),
    };
    // The branch letter must differ from the first letter applied in g (and
    // from its inverse), i.e. live in a different generator direction.
    let leading = *g_word.last().expect("nonempty");
    if leading.gen == q_letter.gen {
        return Err(PseudoError::BadBranchLetter(q.to_word()));
    }
    let sep = omega0.sup_dist(omega);
    if &sep > d1 {
        return Err(PseudoError::BranchSeparation(
            d1.to_string(),
            sep.to_string(),
        ));
    }
    let mq_inv = action.matrix_of(q)?.inverse();
    let base_trunk = mq_inv.apply(omega0);
    let base_branch = mq_inv.apply(omega);
    let mats = crate::action::matrices_on_ball(action, &ball)?;
    let mut branch_size = 0usize;
    let points: Vec<Point> = (0..ball.len())
        .map(|i| {
            let word = ball.element(i).as_free_word().expect("free ball");
            let on_branch = word.last() == Some(&q_letter);
            if on_branch {
                branch_size += 1;
                mats[i].apply(&base_branch)
            } else {
                mats[i].apply(&base_trunk)
            }
        })
        .collect();
    let trunk_size = ball.len() - branch_size;
    let traj = Pseudotrajectory::from_points(
        ball,
        points,
        NumericMode::Exact,
        Some(d1.clone()),
        Rational::zero(),
    )?;
    Ok((
        traj,
        TwoBranchReport {
            degenerate: sep.is_zero(),
            branch_size,
            trunk_size,
        },
    ))
}

/// A finite orbit window over the integers: points x_k for k in
/// [start, start + len).
#[derive(Debug, Clone)]
pub struct ZWindow {
    start: i64,
    points: Vec<Point>,
}

impl ZWindow {
    pub fn new(start: i64, points: Vec<Point>) -> Result<ZWindow, PseudoError> {
        if points.is_empty() {
            return Err(PseudoError::Malformed {
                line: 0,
                msg: "empty window".to_string(),
            });
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(PseudoError::DimensionMismatch);
        }
        Ok(ZWindow { start, points })
    }

    pub fn k_min(&self) -> i64 {
        self.start
    }

    pub fn k_max(&self) -> i64 {
        self.start + self.points.len() as i64 - 1
    }

    pub fn at(&self, k: i64) -> Option<&Point> {
        if k < self.k_min() || k > self.k_max() {
            return None;
        }
        Some(&self.points[(k - self.start) as usize])
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

/// Lifts a pseudotrajectory window along <g> to the whole ball of a free
/// group. The spine w(rk + j) = s_j ... s_1 g^k (r = |g|) interpolates the
/// window with exact orbit segments between consecutive window points; every
/// other element t picks the decomposition t = v w(i) minimizing |v| (ties:
/// smaller |i|, then nonnegative i) and rides the spine via f_v.
///
/// Requires g cyclically reduced so the spine is a bi-infinite geodesic.
pub fn lift_z_to_free(
    action: &LinearAction,
    ball: Arc<CayleyBall>,
    g: &GroupElement,
    window: &ZWindow,
) -> Result<Pseudotrajectory, PseudoError> {
    check_family(&ball, action)?;
    let rank = match ball.spec().family() {
        Family::Free { rank } => *rank,
        _ => {
            return Err(PseudoError::Action(
                crate::action::ActionError::WrongFamily {
                    expected: "F(k)".to_string(),
                    got: ball.spec().describe(),
                },
            ))
        }
    };
    let word = g.as_free_word().expect("free family").to_vec();
    if word.is_empty() {
        return Err(PseudoError::IdentityDesignee);
    }
    if word.len() > 1 && word.first() == word.last().map(|l| l.opposite()).as_ref() {
        return Err(PseudoError::BadBranchLetter(format!(
            "{} is not cyclically reduced",
            g.to_word()
        )));
    }
    if window.dim() != action.dim() {
        return Err(PseudoError::DimensionMismatch);
    }
    let r = word.len() as i64;
    let radius = i64::from(ball.radius());
    let need = (radius + r - 1) / r;
    if window.k_min() > -need || window.k_max() < need {
        return Err(PseudoError::WindowTooShort {
            lo: window.k_min(),
            hi: window.k_max(),
            need_lo: -need,
            need_hi: need,
        });
    }

    // Letter matrices: s_j is word[r - j] (s_1 acts first).
    let letter_matrix = |l: Letter| -> Result<RationalMatrix, PseudoError> {
        let base = GroupElement::free(rank, vec![l]).expect("single letter");
        Ok(action.matrix_of(&base)?)
    };

    // Interpolated spine points z_i, i in [r k_min, r k_max].
    let i_lo = r * window.k_min();
    let i_hi = r * window.k_max();
    let len = (i_hi - i_lo + 1) as usize;
    let mut z: Vec<Option<Point>> = vec![None; len];
    let idx = |i: i64| (i - i_lo) as usize;
    for k in window.k_min()..=window.k_max() {
        z[idx(r * k)] = Some(window.at(k).expect("validated range").clone());
    }
    for k in window.k_min()..window.k_max() {
        for j in 1..r {
            let s_j = word[(r - j) as usize];
            let m = letter_matrix(s_j)?;
            let prev = z[idx(r * k + j - 1)].clone().expect("filled in order");
            z[idx(r * k + j)] = Some(m.apply(&prev));
        }
    }
    let z: Vec<Point> = z.into_iter().map(|p| p.expect("all indices covered")).collect();

    // Spine group elements w(i).
    let mut spine: Vec<GroupElement> = Vec::with_capacity(len);
    for i in i_lo..=i_hi {
        let k = i.div_euclid(r);
        let j = i.rem_euclid(r);
        let prefix = GroupElement::free(rank, word[(r - j) as usize..].to_vec())
            .expect("subword of a reduced word");
        spine.push(prefix.multiply(&g.pow(k))?);
    }

    let mut points: Vec<Point> = Vec::with_capacity(ball.len());
    for t in ball.elements() {
        let mut best: Option<((usize, u64, bool), usize)> = None;
        for (si, w_i) in spine.iter().enumerate() {
            let v = t.multiply(&w_i.inverse())?;
            let vlen = v.as_free_word().expect("free").len();
            let i = i_lo + si as i64;
            let key = (vlen, i.unsigned_abs(), i < 0);
            if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                best = Some((key, si));
            }
        }
        let (_, si) = best.expect("spine nonempty");
        let v = t.multiply(&spine[si].inverse())?;
        points.push(action.matrix_of(&v)?.apply(&z[si]));
    }
    Pseudotrajectory::from_points(ball, points, NumericMode::Exact, None, Rational::zero())
}
