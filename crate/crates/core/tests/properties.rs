use geonav::env::{objective, EpisodeTrace, TraceRow};
use geonav::eval::{
    compute_metrics, generate_tasks, read_task_endpoints, write_tasks_csv, TaskDistribution,
};
use geonav::geo::{normalize_longitude, LocalFrame, Region};
use geonav::neural::{Activation, Checkpoint, Mlp};
use geonav::seed::{derive_seed, rng_for};
use proptest::prelude::*;

fn row(step: usize, x: f64, y: f64, theta: f64, l: f64, success: bool) -> TraceRow {
    TraceRow {
        step,
        lat: 0.0,
        lon: 0.0,
        x_m: x,
        y_m: y,
        theta_rad: theta,
        l_m: l,
        psi_rad: 0.0,
        f: 0.0,
        reward: 0.0,
        lambda_prime_rad: theta,
        done: false,
        success,
    }
}

/// Random walk from the origin; the last row carries the success flag.
fn walk(target: (f64, f64), moves: &[(f64, f64)], success: bool) -> EpisodeTrace {
    let mut t = EpisodeTrace::new((0.0, 0.0), target, 1.0);
    let (mut x, mut y) = (0.0, 0.0);
    t.rows.push(row(0, x, y, 0.0, 0.0, false));
    for (k, &(l, th)) in moves.iter().enumerate() {
        x += l * th.cos();
        y += l * th.sin();
        t.rows.push(row(k + 1, x, y, th, l, success && k + 1 == moves.len()));
    }
    t
}

proptest! {
    #[test]
    fn longitude_normalisation_is_idempotent(lon in -1e4f64..1e4) {
        let n = normalize_longitude(lon);
        prop_assert!((-180.0..180.0).contains(&n) || n == 180.0);
        prop_assert_eq!(normalize_longitude(n), n);
    }

    #[test]
    fn local_frame_round_trips(lat in -60.0f64..60.0, lon in -179.0f64..179.0,
                               dx in -2e5f64..2e5, dy in -2e5f64..2e5) {
        let frame = LocalFrame::new(lat, lon);
        let p = frame.to_geo(dx, dy);
        let (x, y) = frame.to_local(&p);
        prop_assert!((x - dx).abs() < 1e-6 && (y - dy).abs() < 1e-6);
    }

    #[test]
    fn objective_is_nonnegative_and_scale_free(
        c in prop::array::uniform3(-1.0f64..1.0),
        t in prop::array::uniform3(-1.0f64..1.0),
        o in prop::array::uniform3(-1.0f64..1.0),
        s in 0.1f64..10.0,
    ) {
        let f = objective(&c, &t, &o).value;
        prop_assert!(f >= 0.0);
        // D is compared modulo 2π, so scale only I and B_H.
        let sc = |v: [f64; 3]| [v[0], v[1] * s, v[2] * s];
        let g = objective(&c, &t, &o);
        let h = objective(&sc(c), &sc(t), &sc(o));
        if !g.floored && !h.floored {
            prop_assert!((g.value - h.value).abs() <= 1e-9 * g.value.max(1.0));
        }
    }

    #[test]
    fn spl_never_exceeds_sr_and_smoothness_is_bounded(
        walks in prop::collection::vec(
            (prop::collection::vec((0.0f64..20_000.0, -3.2f64..3.2), 1..12), any::<bool>(),
             1_000.0f64..80_000.0, -3.2f64..3.2),
            1..8),
    ) {
        let traces: Vec<EpisodeTrace> = walks
            .iter()
            .map(|(moves, ok, d, a)| walk((d * a.cos(), d * a.sin()), moves, *ok))
            .collect();
        let m = compute_metrics(&traces).unwrap();
        prop_assert!(m.spl <= m.sr + 1e-12);
        for r in &m.records {
            prop_assert!((0.0..=180.0).contains(&r.smoothness_deg));
        }
    }

    #[test]
    fn checkpoints_round_trip(sizes in prop::collection::vec(1usize..6, 2..5), seed in any::<u64>()) {
        let net = Mlp::new(&sizes, Activation::Relu, Activation::Tanh, &mut rng_for(seed, "net"));
        let ck = Checkpoint {
            config_hash: seed,
            networks: vec![("actor".into(), net.clone())],
            counters: vec![("episodes".into(), seed / 3)],
            ..Checkpoint::default()
        };
        let back = Checkpoint::decode(&ck.encode()).unwrap();
        prop_assert_eq!(back.network("actor"), Some(&net));
        prop_assert_eq!(back.counter("episodes"), Some(seed / 3));
        prop_assert_eq!(back.encode(), ck.encode());
    }

    #[test]
    fn seed_derivation_separates_tags(master in any::<u64>()) {
        prop_assert_ne!(derive_seed(master, "a"), derive_seed(master, "b"));
        prop_assert_eq!(derive_seed(master, "a"), derive_seed(master, "a"));
    }
}

#[test]
fn generated_tasks_stay_inside_the_region_and_round_trip() {
    let region = Region::square(-5.0, 165.0, 150_000.0);
    let dist = TaskDistribution {
        min_separation_m: 40_000.0,
        max_separation_m: 80_000.0,
        epoch: 2020.0,
    };
    let tasks = generate_tasks(&region, 200, &dist, 17).unwrap();
    let frame = region.frame();
    for t in &tasks {
        assert!(region.contains(&t.origin) && region.contains(&t.destination));
        let d = geonav::geo::planar_distance(&frame, &t.origin, &t.destination);
        assert!((40_000.0..=80_000.0).contains(&d), "{d}");
    }
    let mut csv = Vec::new();
    write_tasks_csv(&tasks, &region, &mut csv).unwrap();
    let ends = read_task_endpoints(csv.as_slice()).unwrap();
    for (t, (o, d)) in tasks.iter().zip(ends) {
        assert_eq!(frame.to_local(&t.origin), o);
        assert_eq!(frame.to_local(&t.destination), d);
    }
}
