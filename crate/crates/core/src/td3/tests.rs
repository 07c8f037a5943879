use std::sync::Arc;

use ndarray::{Array1, Array2};

use super::*;
use crate::env::{EnvConfig, STATE_DIM};
use crate::field::LinearField;
use crate::geo::Region;
use crate::seed::rng_for;

fn small_config() -> Td3Config {
    Td3Config {
        hidden: vec![32, 32],
        batch_size: 16,
        warmup_steps: 64,
        buffer_capacity: 5_000,
        window: 10,
        ..Td3Config::default()
    }
}

fn agent(cfg: &Td3Config) -> Td3Agent {
    Td3Agent::new(cfg, &mut rng_for(5, "agent"))
}

fn zero(net: &mut Mlp) {
    for l in net.layers_mut() {
        l.weight.fill(0.0);
        l.bias.fill(0.0);
    }
}

fn random_batch(n: usize, seed: u64) -> Batch {
    let mut r = rng_for(seed, "batch");
    let ts: Vec<Transition> = (0..n)
        .map(|k| Transition {
            state: std::array::from_fn(|_| r.random_range(0.0..1.0)),
            action: std::array::from_fn(|_| r.random_range(-1.0..1.0)),
            reward: r.random_range(-5.0..5.0),
            next_state: std::array::from_fn(|_| r.random_range(0.0..1.0)),
            done: k % 3 == 0,
            id: k as u64,
        })
        .collect();
    Batch::from_transitions(&ts)
}

use rand::Rng;

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

fn desk_tasks() -> crate::eval::TaskDistribution {
    crate::eval::TaskDistribution {
        min_separation_m: 40_000.0,
        max_separation_m: 80_000.0,
        epoch: 2020.0,
    }
}

#[test]
fn targets_start_equal_to_online_networks() {
    let a = agent(&small_config());
    assert_eq!(a.actor, a.actor_target);
    assert_eq!(a.critics, a.critic_targets);
    assert_ne!(a.critics[0], a.critics[1]);
}

#[test]
fn greedy_selection_is_deterministic_and_exploration_is_bounded() {
    let a = agent(&small_config());
    let mut r = rng_for(0, "sel");
    let s = [0.3; STATE_DIM];
    assert_eq!(
        a.select_action(&s, false, &mut r).unwrap(),
        a.select_action(&s, false, &mut r).unwrap()
    );
    for _ in 0..2_000 {
        let u = a.select_action(&s, true, &mut r).unwrap();
        let act = NavAction::from_normalized(u, 10_000.0);
        assert!(u.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!((0.0..=10_000.0).contains(&act.distance));
        assert!(act.yaw.abs() <= std::f64::consts::FRAC_PI_2);
    }
}

#[test]
fn zero_actor_gives_midpoint_action() {
    let mut a = agent(&small_config());
    zero(&mut a.actor);
    let u = a.select_action(&[0.5; STATE_DIM], false, &mut rng_for(0, "z")).unwrap();
    assert_eq!(u, [0.0, 0.0]);
    let act = NavAction::from_normalized(u, 10_000.0);
    assert_eq!((act.distance, act.yaw), (5_000.0, 0.0));
}

#[test]
fn target_action_without_noise_is_the_target_actor_output() {
    let cfg = Td3Config {
        policy_noise: 0.0,
        ..small_config()
    };
    let a = agent(&cfg);
    let b = random_batch(20, 1);
    let out = a.target_action(&b.next_states, &mut rng_for(0, "t")).unwrap();
    assert_eq!(out, a.actor_target.predict(&b.next_states).unwrap());
}

#[test]
fn smoothing_noise_is_clipped_normal() {
    let mut a = agent(&small_config());
    zero(&mut a.actor_target);
    let n = 100_000;
    let s = Array2::zeros((n / 2, STATE_DIM));
    let out = a.target_action(&s, &mut rng_for(1, "noise")).unwrap();
    assert!(out.iter().all(|v| v.abs() <= 0.2));
    let var = out.mapv(|v| v * v).mean().unwrap();
    // clip(N(0, σ²), ±2σ): Var = σ²[(2Φ(2) − 1) − 4φ(2)] + 4σ²·2(1 − Φ(2)).
    let (cdf, pdf): (f64, f64) = (0.977_249_868_051_820_8, 0.053_990_966_513_188_06);
    let expect = 0.01 * ((2.0 * cdf - 1.0) - 4.0 * pdf + 8.0 * (1.0 - cdf));
    assert!((var.sqrt() - expect.sqrt()).abs() < 0.001, "{} vs {}", var.sqrt(), expect.sqrt());
}

#[test]
fn target_formula_identities() {
    let one = |v: f64| Array1::from_vec(vec![v]);
    let y = compute_targets(&one(5.0), &one(3.0), &one(1.0), &one(0.0), 0.5);
    assert_eq!(y[0], 2.5);
    let y = compute_targets(&one(5.0), &one(3.0), &one(1.0), &one(1.0), 0.5);
    assert_eq!(y[0], 1.0);
    let q1 = Array1::from_vec(vec![1.0, -2.0, 7.0]);
    let q2 = Array1::from_vec(vec![0.5, 4.0, 7.5]);
    let r = Array1::from_vec(vec![0.1, 0.2, 0.3]);
    let d = Array1::from_vec(vec![0.0, 1.0, 0.0]);
    assert_eq!(
        compute_targets(&q1, &q2, &r, &d, 0.9),
        compute_targets(&q2, &q1, &r, &d, 0.9)
    );
}

#[test]
fn identical_critics_reduce_to_single_critic_targets() {
    let mut a = agent(&small_config());
    a.critic_targets[1] = a.critic_targets[0].clone();
    let b = random_batch(32, 2);
    let y = a.targets(&b, &mut rng_for(3, "y")).unwrap();
    let a2 = a.target_action(&b.next_states, &mut rng_for(3, "y")).unwrap();
    let x = ndarray::concatenate(ndarray::Axis(1), &[b.next_states.view(), a2.view()]).unwrap();
    let q = a.critic_targets[0].predict(&x).unwrap();
    for i in 0..b.len() {
        let single = b.rewards[i] + 0.995 * (1.0 - b.dones[i]) * q[[i, 0]];
        assert_eq!(y[i], single);
    }
}

#[test]
fn critic_loss_is_plain_mse_and_exact_critic_is_untouched() {
    let mut a = agent(&small_config());
    let b = random_batch(2, 4);
    let x = ndarray::concatenate(ndarray::Axis(1), &[b.states.view(), b.actions.view()]).unwrap();
    let q0 = a.critics[0].predict(&x).unwrap();
    let q1 = a.critics[1].predict(&x).unwrap();
    let y = Array1::from_vec(vec![1.5, -0.5]);
    let losses = a.critic_update(&b, &y).unwrap();
    let mse = |q: &Array2<f64>| ((q[[0, 0]] - 1.5).powi(2) + (q[[1, 0]] + 0.5).powi(2)) / 2.0;
    assert!((losses[0] - mse(&q0)).abs() < 1e-12);
    assert!((losses[1] - mse(&q1)).abs() < 1e-12);

    let mut a = agent(&small_config());
    zero(&mut a.critics[0]);
    zero(&mut a.critics[1]);
    let before = a.critics.clone();
    let losses = a.critic_update(&b, &Array1::zeros(2)).unwrap();
    assert_eq!(losses, [0.0, 0.0]);
    assert_eq!(a.critics, before);
}

#[test]
fn critic_loss_falls_on_a_frozen_batch() {
    let mut a = agent(&small_config());
    let b = random_batch(64, 5);
    let y = a.targets(&b, &mut rng_for(0, "f")).unwrap();
    let first = a.critic_update(&b, &y).unwrap();
    let mut last = first;
    for _ in 0..100 {
        last = a.critic_update(&b, &y).unwrap();
    }
    assert!(last[0] < first[0] && last[1] < first[1], "{first:?} -> {last:?}");
}

#[test]
fn policy_delay_cadence() {
    for delay in [1usize, 2, 3] {
        let cfg = Td3Config {
            policy_delay: delay,
            ..small_config()
        };
        let mut a = agent(&cfg);
        let b = random_batch(16, 6);
        let mut r = rng_for(0, "d");
        for k in 1..=12u64 {
            let before = a.actor_target.clone();
            let stats = a.update(&b, &mut r).unwrap();
            let due = k % delay as u64 == 0;
            assert_eq!(stats.actor_objective.is_some(), due);
            assert_eq!(a.actor_target != before, due);
            assert_eq!(a.update_count(), k);
            assert_eq!(a.actor_updates(), k / delay as u64);
        }
    }
}

#[test]
fn actor_moves_toward_critic_optimum() {
    let mut a = agent(&small_config());
    let mut r = rng_for(7, "fit");
    // Fit critic 1 to Q(s, a) = −‖a‖².
    for _ in 0..1_500 {
        let b = random_batch(64, r.random());
        let y = b.actions.map_axis(ndarray::Axis(1), |row| -row.dot(&row));
        a.critic_update(&b, &y).unwrap();
    }
    let b = random_batch(128, 99);
    let norm = |a: &Td3Agent| {
        let out = a.actor.predict(&b.states).unwrap();
        out.mapv(|v| v * v).sum() / b.len() as f64
    };
    let start = norm(&a);
    let mut objectives = Vec::new();
    for _ in 0..200 {
        objectives.push(a.actor_update(&b).unwrap());
    }
    assert!(norm(&a) < 0.5 * start, "{} -> {}", start, norm(&a));
    // Frozen critic: windowed mean of Q keeps rising.
    let first: f64 = objectives[..20].iter().sum::<f64>() / 20.0;
    let last: f64 = objectives[180..].iter().sum::<f64>() / 20.0;
    assert!(last >= first);
}

#[test]
fn zero_episodes_leave_everything_untouched() {
    let mut t = Trainer::new(desk_env(), &small_config(), desk_tasks(), 3).unwrap();
    let before = t.agent().clone();
    t.run(0, |_, _| Ok(())).unwrap();
    assert!(t.log().rows.is_empty());
    assert_eq!(t.agent(), &before);
}

#[test]
fn training_is_reproducible_and_resumable() {
    let cfg = small_config();
    let run = |n| {
        let mut t = Trainer::new(desk_env(), &cfg, desk_tasks(), 11).unwrap();
        t.run(n, |_, _| Ok(())).unwrap();
        t
    };
    let a = run(12);
    let b = run(12);
    let (mut la, mut lb) = (Vec::new(), Vec::new());
    a.log().write_csv(&mut la).unwrap();
    b.log().write_csv(&mut lb).unwrap();
    assert_eq!(la, lb);
    assert_eq!(a.checkpoint().encode(), b.checkpoint().encode());
    assert!(a.agent().update_count() > 0);
    assert_eq!(a.log().rows.len(), 12);

    let mut resumed = Trainer::resume(desk_env(), &cfg, desk_tasks(), &a.checkpoint()).unwrap();
    resumed.run(3, |_, _| Ok(())).unwrap();
    let eps: Vec<u64> = resumed.log().rows.iter().map(|r| r.episode).collect();
    assert_eq!(eps, vec![13, 14, 15]);

    let other = Td3Config {
        gamma: 0.9,
        ..cfg.clone()
    };
    assert!(Trainer::resume(desk_env(), &other, desk_tasks(), &a.checkpoint()).is_err());
}

#[test]
fn invalid_config_lists_every_violation() {
    let cfg = Td3Config {
        gamma: 1.5,
        policy_delay: 0,
        batch_size: 100,
        buffer_capacity: 10,
        ..Td3Config::default()
    };
    let v = cfg.violations();
    assert_eq!(v.len(), 3, "{v:?}");
    assert!(matches!(
        Trainer::new(desk_env(), &cfg, desk_tasks(), 0),
        Err(Error::Config(_))
    ));
}

#[test]
fn reward_clip_bounds_stored_rewards_only() {
    let cfg = Td3Config {
        reward_clip: Some([-1.0, 1.0]),
        ..small_config()
    };
    // The first episode lies inside warmup, so both runs see the same actions.
    let run = |cfg: &Td3Config| {
        let mut t = Trainer::new(desk_env(), cfg, desk_tasks(), 5).unwrap();
        t.run(1, |_, _| Ok(())).unwrap();
        t
    };
    let clipped = run(&cfg);
    let raw = run(&small_config());
    assert!(clipped.buffer().iter().all(|tr| (-1.0..=1.0).contains(&tr.reward)));
    assert!(raw.buffer().iter().any(|tr| tr.reward.abs() > 1.0));
    assert_eq!(clipped.log().rows[0].ret, raw.log().rows[0].ret);

    let bad = Td3Config {
        reward_clip: Some([1.0, -1.0]),
        ..small_config()
    };
    assert!(bad.violations().iter().any(|m| m.contains("reward_clip")));
}
