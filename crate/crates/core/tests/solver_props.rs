//! Solver guarantees under variation: grid-oracle agreement, monotonicity in
//! the tolerance and the radius, and soundness of witnesses and
//! certificates against the raw constraint system.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use shadowlab_core::action::{LinearAction, Point, RationalMatrix};
use shadowlab_core::group::{CayleyBall, GeneratingSet, GroupElement, GroupSpec};
use shadowlab_core::numeric::{rat, rat_i64, Rational};
use shadowlab_core::pseudo::{
    bs_counterexample, exact_orbit, perturbed_orbit, CounterexampleParams, NumericMode,
    Pseudotrajectory,
};
use shadowlab_core::solver::{
    certificate_infeasible, feasible_shadow, fiber_shadow_expanding, grid_oracle,
    shadow_constraints, FeasibilityVerdict, HalfPlane, ShadowingProblem,
};

fn plane_action() -> LinearAction {
    let spec = GroupSpec::parse("Z^2").unwrap();
    let a = RationalMatrix::diagonal(&[rat_i64(2), rat(1, 2)]).unwrap();
    let b = RationalMatrix::diagonal(&[rat_i64(3), rat(1, 3)]).unwrap();
    LinearAction::load(&spec, vec![a, b]).unwrap()
}

fn plane_ball(radius: u32) -> Arc<CayleyBall> {
    let spec = GroupSpec::parse("Z^2").unwrap();
    let gens = GeneratingSet::standard(&spec);
    Arc::new(CayleyBall::build(&spec, &gens, radius).unwrap())
}

fn bs2_action() -> LinearAction {
    let spec = GroupSpec::parse("BS(1,2)").unwrap();
    let a = RationalMatrix::from_rows_2([[rat_i64(1), rat_i64(0)], [rat_i64(1), rat_i64(1)]])
        .unwrap();
    let b = RationalMatrix::diagonal(&[rat_i64(2), rat_i64(4)]).unwrap();
    LinearAction::load(&spec, vec![a, b]).unwrap()
}

fn bs2_ball(radius: u32) -> Arc<CayleyBall> {
    let spec = GroupSpec::parse("BS(1,2)").unwrap();
    let gens = GeneratingSet::standard(&spec);
    Arc::new(CayleyBall::build(&spec, &gens, radius).unwrap())
}

/// Max distance of a trajectory from the orbit of x0; any eps above this
/// makes x0 a witness, anything the solver rejects must exceed it.
fn orbit_distance(action: &LinearAction, traj: &Pseudotrajectory, x0: &Point) -> Rational {
    let orbit = exact_orbit(action, traj.ball_arc(), x0).unwrap();
    traj.points()
        .iter()
        .zip(orbit.points())
        .map(|(p, q)| p.sup_dist(q))
        .max()
        .unwrap()
}

fn cert_plane_in_system(plane: &HalfPlane, system: &[HalfPlane]) -> bool {
    system.iter().any(|hp| {
        hp.a() == plane.a()
            && hp.b() == plane.b()
            && hp.c() == plane.c()
            && hp.provenance() == plane.provenance()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_are_sound_and_grid_consistent(
        seed in 0u64..5_000,
        num in 1i64..=8,
        eps_scale in prop::sample::select(vec![1i64, 2, 8, 64]),
    ) {
        let action = plane_action();
        let ball = plane_ball(3);
        let d = Rational::new(num.into(), 64.into());
        let x0 = Point::two_d(rat(1, 2), rat(-1, 4));
        let traj = perturbed_orbit(&action, Arc::clone(&ball), &x0, &d, seed).unwrap();
        let slack = orbit_distance(&action, &traj, &x0);
        let eps = &slack * Rational::new(eps_scale.into(), 4.into());
        if eps.is_zero() {
            return Ok(());
        }
        let problem = ShadowingProblem::new(&action, &traj, eps.clone()).unwrap();
        let verdict = feasible_shadow(&problem).unwrap();
        let system = shadow_constraints(&problem).unwrap();
        match &verdict {
            FeasibilityVerdict::Feasible(w) => {
                prop_assert!(system.iter().all(|hp| hp.satisfied_by(&w.point)));
            }
            FeasibilityVerdict::Infeasible(cert) => {
                // eps_scale/4 < 1 is the only way to lose feasibility of x0.
                prop_assert!(eps < slack);
                prop_assert!(cert.len() >= 2 && cert.len() <= 3);
                prop_assert!(certificate_infeasible(&cert.planes));
                for p in &cert.planes {
                    prop_assert!(cert_plane_in_system(p, &system));
                }
            }
        }
        // The grid anchored at x0 must agree: x0 itself is a grid point, so
        // a feasible eps >= slack guarantees a hit, and infeasibility
        // guarantees a miss.
        let lower = x0.sub(&Point::two_d(rat_i64(1), rat_i64(1)));
        let upper = x0.add(&Point::two_d(rat_i64(1), rat_i64(1)));
        let hit = grid_oracle(&problem, &rat(1, 4), &lower, &upper, 200).unwrap();
        if eps >= slack {
            prop_assert!(hit.is_some());
        }
        if !verdict.is_feasible() {
            prop_assert!(hit.is_none());
        }
        if let Some(p) = hit {
            prop_assert!(system.iter().all(|hp| hp.satisfied_by(&p)));
        }
    }

    #[test]
    fn tolerance_monotonicity(seed in 0u64..5_000) {
        let action = bs2_action();
        let ball = bs2_ball(3);
        let traj = perturbed_orbit(
            &action,
            Arc::clone(&ball),
            &Point::two_d(rat(1, 5), rat(2, 7)),
            &rat(1, 4),
            seed,
        )
        .unwrap();
        let mut last_feasible = false;
        for eps in [rat(1, 1000), rat(1, 100), rat(1, 10), rat_i64(1), rat_i64(10)] {
            let problem = ShadowingProblem::new(&action, &traj, eps).unwrap();
            let feasible = feasible_shadow(&problem).unwrap().is_feasible();
            prop_assert!(feasible || !last_feasible, "feasibility must not flip back");
            last_feasible = feasible;
        }
        prop_assert!(last_feasible, "a huge tolerance is always feasible");
    }

    #[test]
    fn fiber_boxes_contain_the_source_and_shrink(
        lam_num in prop::sample::select(vec![3i64, 2, 4, -2]),
        x0_num in -8i64..=8,
        noise in -4i64..=4,
    ) {
        let lam = rat_i64(lam_num);
        let mat = RationalMatrix::diagonal(&[lam.clone()]).unwrap();
        let x0 = Rational::new(x0_num.into(), 5.into());
        let eps = rat(1, 8);
        // Window: z_k = lam^k x0 + noise_k with |noise_k| <= 1/16 <= eps.
        let mut window = Vec::new();
        let mut pow = Rational::new(1.into(), 1.into());
        for k in 0..6 {
            if k > 0 {
                pow *= &lam;
            }
            let wobble = Rational::new(noise.into(), 64.into());
            window.push(Point::one_d(&pow * &x0 + wobble));
        }
        let boxed = fiber_shadow_expanding(&mat, &window, &eps).unwrap();
        // The noise stays below eps, so the true source point is admissible.
        prop_assert!(!boxed.is_empty());
        prop_assert!(boxed.contains(&Point::one_d(x0)));
        // Width shrinks like 2 eps / |lam|^K for the last window entry.
        let mut lampow = Rational::new(1.into(), 1.into());
        for _ in 0..5 {
            lampow *= &lam;
        }
        let bound = rat_i64(2) * &eps / lampow.abs();
        prop_assert!(boxed.max_width().unwrap() <= bound);
    }
}

#[test]
fn radius_monotonicity_on_the_counterexample() {
    let action = bs2_action();
    let params = CounterexampleParams {
        lambda: rat_i64(2),
        d: rat(1, 10),
        mode: NumericMode::Exact,
    };
    let eps = rat_i64(1);
    let mut first_infeasible: Option<u32> = None;
    let mut verdicts = Vec::new();
    for radius in 1..=8u32 {
        let ball = bs2_ball(radius);
        let traj = bs_counterexample(&params, Arc::clone(&ball)).unwrap();
        let problem = ShadowingProblem::new(&action, &traj, eps.clone()).unwrap();
        let feasible = feasible_shadow(&problem).unwrap().is_feasible();
        if !feasible && first_infeasible.is_none() {
            first_infeasible = Some(radius);
        }
        verdicts.push(feasible);
    }
    let flip = first_infeasible.expect("the counterexample defeats eps = 1 eventually");
    assert!(flip <= 6, "expected infeasibility by radius 6, got {flip}");
    // Once infeasible, always infeasible: constraints only accumulate.
    for (i, feasible) in verdicts.iter().enumerate() {
        let radius = i as u32 + 1;
        assert_eq!(*feasible, radius < flip, "verdict at radius {radius}");
    }
}

#[test]
fn certificate_words_point_at_deep_elements() {
    // The witnesses of infeasibility live deep in the ball, where the
    // expansion has amplified the profile past eps; with the second
    // coordinate quadrupling per b-step they all read that coordinate.
    let action = bs2_action();
    let ball = bs2_ball(7);
    let params = CounterexampleParams {
        lambda: rat_i64(2),
        d: rat(1, 10),
        mode: NumericMode::Exact,
    };
    let traj = bs_counterexample(&params, Arc::clone(&ball)).unwrap();
    let problem = ShadowingProblem::new(&action, &traj, rat_i64(1)).unwrap();
    let verdict = feasible_shadow(&problem).unwrap();
    let cert = verdict.certificate().expect("infeasible at radius 7");
    let spec = ball.spec();
    for p in &cert.planes {
        let g = spec.parse_word(&p.provenance().word).unwrap();
        let idx = ball.index_of(&g).expect("certificate words come from the ball");
        assert!(ball.norm(idx) >= 4, "certificate uses a shallow element {}", p);
        assert_eq!(p.provenance().coord, 1, "expected the expanding coordinate");
    }
}

#[test]
fn witness_respects_an_explicit_tube() {
    // Exact orbit, tiny eps: the solver's witness must reproduce the base
    // point up to eps in every pulled-back coordinate.
    let action = plane_action();
    let ball = plane_ball(4);
    let x0 = Point::two_d(rat(3, 7), rat(-2, 9));
    let traj = exact_orbit(&action, Arc::clone(&ball), &x0).unwrap();
    let eps = rat(1, 1000);
    let problem = ShadowingProblem::new(&action, &traj, eps.clone()).unwrap();
    let verdict = feasible_shadow(&problem).unwrap();
    let w = verdict.witness().expect("orbit is feasible at any eps");
    // |16 (x - x0)_1| <= eps from the a^4 element pins x within eps/16.
    let diff = w.point.sub(&x0);
    assert!(diff.coord(0).abs() <= &eps / rat_i64(16));
    assert!(diff.coord(1).abs() <= &eps / rat_i64(81) * rat_i64(81) / rat_i64(16));
}

#[test]
fn infeasible_spike_certificate_survives_reordering() {
    // Certificates are verified by a positive-combination identity that
    // does not care about plane order.
    let ball = plane_ball(3);
    let action = plane_action();
    let mut points: Vec<Point> = ball.elements().iter().map(|_| Point::zero(2)).collect();
    let spike = ball
        .index_of(&GroupElement::abelian(vec![3, 0]))
        .unwrap();
    points[spike] = Point::two_d(rat_i64(1), rat_i64(0));
    let traj = Pseudotrajectory::from_points(
        Arc::clone(&ball),
        points,
        NumericMode::Exact,
        None,
        Rational::zero(),
    )
    .unwrap();
    let problem = ShadowingProblem::new(&action, &traj, rat(1, 50)).unwrap();
    let verdict = feasible_shadow(&problem).unwrap();
    let cert = verdict.certificate().expect("spiked plane trajectory");
    let mut planes = cert.planes.clone();
    planes.reverse();
    assert!(certificate_infeasible(&planes));
}
