use super::*;
use crate::field::{CoefficientSet, LinearField};
use approx::assert_relative_eq;
use proptest::prelude::*;

fn desk_env() -> NavEnv {
    let region = Region::square(-5.0, 165.0, 150_000.0);
    let field = Arc::new(LinearField::desk(region.frame()));
    let config = EnvConfig {
        max_distance_m: 10_000.0,
        success_radius_m: 2_000.0,
        ..EnvConfig::default()
    };
    NavEnv::with_sampled_bounds(field, region, config, 2020.0).unwrap()
}

fn task(env: &NavEnv, from: (f64, f64), to: (f64, f64)) -> TaskSpec {
    let f = env.frame();
    TaskSpec {
        origin: f.to_geo(from.0, from.1),
        destination: f.to_geo(to.0, to.1),
        epoch: 2020.0,
        seed: 1,
    }
}

#[test]
fn reset_is_deterministic_and_starts_at_f_three() {
    let mut env = desk_env();
    let t = task(&env, (-30_000.0, -10_000.0), (20_000.0, 25_000.0));
    let a = env.reset(t).unwrap();
    let f0 = env.trace().unwrap().rows[0].f;
    let b = env.reset(t).unwrap();
    assert_eq!(a, b);
    assert_relative_eq!(f0, 3.0, max_relative = 1e-12);
    assert_eq!(a.last_distance, 0.0);
    assert_eq!(a.last_yaw, 0.0);
}

#[test]
fn initial_heading_points_at_target_in_linear_field() {
    let mut env = desk_env();
    let t = task(&env, (-30_000.0, -10_000.0), (20_000.0, 25_000.0));
    env.reset(t).unwrap();
    let theta = env.pose().unwrap().theta;
    assert_relative_eq!(theta, f64::atan2(35_000.0, 50_000.0), epsilon = 1e-6);
}

#[test]
fn step_toward_target_reduces_objective() {
    let mut env = desk_env();
    let t = task(&env, (0.0, 0.0), (40_000.0, 0.0));
    env.reset(t).unwrap();
    // Heading already points east; go straight.
    let out = env.step(NavAction::raw(10_000.0, 0.0)).unwrap();
    assert!(out.info.objective < 3.0);
    // Recompute from scratch.
    let field = env.field().clone();
    let cur = field.elements(&out.info.position, 2020.0).unwrap();
    let tgt = field.elements(&t.destination, 2020.0).unwrap();
    let org = field.elements(&t.origin, 2020.0).unwrap();
    let f = objective(&cur.nav_triple(), &tgt.nav_triple(), &org.nav_triple()).value;
    assert_relative_eq!(out.info.objective, f, max_relative = 1e-12);
    assert!(!out.done);
}

#[test]
fn reaching_the_destination_succeeds() {
    let mut env = desk_env();
    let t = task(&env, (0.0, 0.0), (9_000.0, 0.0));
    env.reset(t).unwrap();
    let out = env.step(NavAction::raw(9_000.0, 0.0)).unwrap();
    assert!(out.done && out.info.success && out.terminal);
    assert!(out.info.objective < 1e-12);
    assert!(out.reward > 200.0);
    assert!(env.step(NavAction::raw(1.0, 0.0)).is_err());
}

#[test]
fn zero_distance_actions_time_out() {
    let mut env = desk_env();
    let t = task(&env, (0.0, 0.0), (40_000.0, 10_000.0));
    env.reset(t).unwrap();
    let n_max = env.config().reward.n_max;
    let mut last = None;
    for k in 0..n_max {
        let out = env.step(NavAction::raw(0.0, 0.1)).unwrap();
        assert_eq!(out.done, k + 1 == n_max);
        last = Some(out);
    }
    let last = last.unwrap();
    assert!(last.info.timeout && !last.info.success && !last.terminal);
    assert_eq!(env.trace().unwrap().rows.len(), n_max + 1);
    assert!(matches!(env.step(NavAction::raw(0.0, 0.0)), Err(Error::Usage(_))));
}

#[test]
fn leaving_the_region_terminates() {
    let mut env = desk_env();
    let t = task(&env, (70_000.0, 0.0), (30_000.0, 0.0));
    env.reset(t).unwrap();
    // Turn around (two half-turns) and drive east off the map.
    env.step(NavAction::raw(0.0, FRAC_PI_2)).unwrap();
    env.step(NavAction::raw(0.0, FRAC_PI_2)).unwrap();
    let out = env.step(NavAction::raw(10_000.0, 0.0)).unwrap();
    assert!(out.info.out_of_region && out.done && !out.info.success);
}

#[test]
fn invalid_tasks_are_rejected() {
    let mut env = desk_env();
    let t = task(&env, (0.0, 0.0), (0.0, 0.0));
    assert!(matches!(env.reset(t), Err(Error::Task(_))));
    let t = task(&env, (0.0, 0.0), (500_000.0, 0.0));
    assert!(matches!(env.reset(t), Err(Error::Task(_))));
    assert!(env.step(NavAction::raw(0.0, 0.0)).is_err());
}

#[test]
fn paper_task_reset_matches_quoted_elements() {
    let field = Arc::new(CoefficientSet::igrf13());
    let mut env =
        NavEnv::with_sampled_bounds(field, Region::PAPER, EnvConfig::default(), 2020.0).unwrap();
    let t = TaskSpec {
        origin: GeoPosition::new(-2.0, 162.0).unwrap(),
        destination: GeoPosition::new(-8.0, 164.0).unwrap(),
        epoch: 2020.0,
        seed: 0,
    };
    let s = env.reset(t).unwrap();
    assert!((s.d_cur.to_degrees() - 8.019).abs() < 0.5);
    assert!((s.i_cur.to_degrees() + 16.150).abs() < 0.5);
    assert!((s.bh_cur - 35_467.990).abs() < 300.0);
    assert!((s.d_tgt.to_degrees() - 9.228).abs() < 0.5);
    assert!((s.i_tgt.to_degrees() + 26.923).abs() < 0.5);
    assert!((s.bh_tgt - 35_199.415).abs() < 300.0);
    let u = env.normalized_state(&s);
    assert!(u.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn distance_criterion_uses_true_range() {
    let mut env = desk_env();
    env.config_mut().success_criterion = SuccessCriterion::Distance;
    let t = task(&env, (0.0, 0.0), (20_000.0, 0.0));
    env.reset(t).unwrap();
    let out = env.step(NavAction::raw(10_000.0, 0.0)).unwrap();
    assert!(!out.info.success);
    let out = env.step(NavAction::raw(8_500.0, 0.0)).unwrap();
    assert!(out.info.success);
    assert_relative_eq!(out.info.distance_to_target_m, 1_500.0, epsilon = 1e-6);
}

#[test]
fn threshold_region_has_target_radius_scale() {
    let mut env = desk_env();
    let t = task(&env, (-20_000.0, -20_000.0), (25_000.0, 15_000.0));
    env.reset(t).unwrap();
    let zeta = env.threshold().unwrap();
    // Area of the success region is π·mean(ρ²) over boundary directions, so
    // the RMS boundary radius equals the configured 2 km.
    let field = env.field().clone();
    let f = *env.frame();
    let tgt = field.elements(&t.destination, 2020.0).unwrap().nav_triple();
    let org = field.elements(&t.origin, 2020.0).unwrap().nav_triple();
    let mut radii = Vec::new();
    for k in 0..360 {
        let a = (k as f64).to_radians();
        // bisection on radius along direction a
        let (mut lo, mut hi) = (0.0, 50_000.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let p = f.to_geo(25_000.0 + mid * a.cos(), 15_000.0 + mid * a.sin());
            let e = field.elements(&p, 2020.0).unwrap().nav_triple();
            if objective(&e, &tgt, &org).value < zeta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        radii.push(lo);
    }
    let rms = (radii.iter().map(|r: &f64| r * r).sum::<f64>() / radii.len() as f64).sqrt();
    assert!((rms - 2_000.0).abs() < 40.0, "rms radius {rms}");
}

#[test]
fn following_theoretical_heading_closes_distance() {
    let mut env = desk_env();
    env.config_mut().reward.n_max = 200;
    let t = task(&env, (-50_000.0, 30_000.0), (40_000.0, -35_000.0));
    env.reset(t).unwrap();
    let step_len = 3_000.0;
    let mut dist = env.trace().unwrap().origin_xy;
    let target = env.trace().unwrap().target_xy;
    let mut d_prev = (target.0 - dist.0).hypot(target.1 - dist.1);
    let mut lambda = env.trace().unwrap().rows[0].lambda_prime_rad;
    while d_prev > step_len {
        let theta = env.pose().unwrap().theta;
        let yaw = wrap_angle(lambda - theta);
        let out = env.step(NavAction::raw(step_len, yaw)).unwrap();
        dist = (out.info.pose.x, out.info.pose.y);
        let d = (target.0 - dist.0).hypot(target.1 - dist.1);
        assert!(d < d_prev, "distance grew from {d_prev} to {d}");
        d_prev = d;
        lambda = out.info.lambda_prime;
        if out.done {
            break;
        }
    }
}

proptest! {
    #[test]
    fn normalization_is_a_bijection_on_bounds(u in proptest::array::uniform8(0.0f64..=1.0)) {
        let env = desk_env();
        let b = env.bounds();
        let s = b.denormalize(&u);
        let back = b.normalize(&s);
        for k in 0..STATE_DIM {
            prop_assert!((back[k] - u[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn action_clamping_respects_bounds(d in -1e6f64..1e6, y in -10.0f64..10.0) {
        let a = NavAction::new(d, y, 50_000.0);
        prop_assert!((0.0..=50_000.0).contains(&a.distance));
        prop_assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&a.yaw));
    }

    #[test]
    fn objective_is_nonnegative_and_zero_only_at_target(
        c in proptest::array::uniform3(-1.0f64..1.0),
        t in proptest::array::uniform3(-1.0f64..1.0),
        o in proptest::array::uniform3(-1.0f64..1.0),
    ) {
        let f = objective(&c, &t, &o).value;
        prop_assert!(f >= 0.0);
        if c != t {
            prop_assert!(f > 0.0);
        }
    }

    #[test]
    fn alignment_term_is_bounded(theta in -20.0f64..20.0, lp in -20.0f64..20.0, pf in 0.0f64..5.0, cf in 0.0f64..5.0) {
        let cfg = RewardConfig::default();
        let pose = VehiclePose { x: 0.0, y: 0.0, theta, step_index: 30 };
        let r = compute_reward(pf, cf, &pose, lp, &cfg, false);
        prop_assert!(r.alignment.abs() <= cfg.zeta3 * 0.75 * std::f64::consts::PI + 1e-12);
        prop_assert_eq!(r.destination, 0.0);
        let w = angular_distance(theta, lp);
        prop_assert!((0.0..=std::f64::consts::PI).contains(&w));
    }
}

#[test]
fn previous_yaw_mode_turns_from_the_last_yaw() {
    let mut env = desk_env();
    env.config_mut().heading_mode = HeadingMode::PreviousYaw;
    let t = task(&env, (0.0, 0.0), (40_000.0, 30_000.0));
    env.reset(t).unwrap();
    assert_eq!(env.pose().unwrap().theta, 0.0);
    env.step(NavAction::raw(5_000.0, 0.3)).unwrap();
    env.step(NavAction::raw(5_000.0, 0.2)).unwrap();
    let rows = &env.trace().unwrap().rows;
    let dir = |k: usize| (rows[k].y_m - rows[k - 1].y_m).atan2(rows[k].x_m - rows[k - 1].x_m);
    assert_relative_eq!(dir(1), 0.3, epsilon = 1e-9);
    assert_relative_eq!(dir(2), 0.5, epsilon = 1e-9);
}

#[test]
fn accumulated_mode_turns_from_the_running_heading() {
    let mut env = desk_env();
    let t = task(&env, (0.0, 0.0), (40_000.0, 30_000.0));
    env.reset(t).unwrap();
    let theta0 = env.pose().unwrap().theta;
    env.step(NavAction::raw(5_000.0, 0.3)).unwrap();
    env.step(NavAction::raw(5_000.0, 0.2)).unwrap();
    let rows = &env.trace().unwrap().rows;
    let dir = (rows[2].y_m - rows[1].y_m).atan2(rows[2].x_m - rows[1].x_m);
    assert_relative_eq!(dir, theta0 + 0.5, epsilon = 1e-9);
}
