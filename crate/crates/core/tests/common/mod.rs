//! Measurements shared by the integration tests and the acceptance report.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use geonav::env::{angular_distance, objective, theoretical_heading, EnvConfig, Heading, NavEnv};
use geonav::eval::{generate_tasks, TaskDistribution};
use geonav::field::{CoefficientSet, DipoleField, FieldSource, GradientVector, LinearField};
use geonav::geo::{GeoPosition, LocalFrame, Region};
use geonav::seed::rng_for;
use rand::Rng;

/// Independent synthesis (ppigrf, geocentric, r = 6371.2 km + altitude):
/// `(lat, lon, alt_km, epoch, [bx, by, bz])` in nT. All but the first use
/// definitive epochs, where every model generation agrees; the reference
/// carries newer 2020 coefficients than the bundled table.
pub const REFERENCE_POINTS: [(f64, f64, f64, f64, [f64; 3]); 5] = [
    (-2.0, 162.0, 0.0, 2020.0, [35256.5430, 4944.7579, -10207.8126]),
    (45.0, -75.0, 10.0, 2015.0, [17443.7338, -4293.1628, 50711.4384]),
    (-60.0, 30.0, 100.0, 2000.0, [12880.2421, -10383.5908, -30017.9047]),
    (80.0, 120.0, 0.0, 1995.0, [2471.2582, 132.6474, 57862.2020]),
    (0.0, 0.0, 0.0, 1965.0, [27948.1445, -5584.5435, -12159.5862]),
];

/// Largest per-component deviation from [`REFERENCE_POINTS`], nT.
pub fn max_reference_error_nt() -> f64 {
    reference_error_nt(&REFERENCE_POINTS)
}

/// Same, over the definitive-epoch points only.
pub fn max_definitive_error_nt() -> f64 {
    reference_error_nt(&REFERENCE_POINTS[1..])
}

fn reference_error_nt(points: &[(f64, f64, f64, f64, [f64; 3])]) -> f64 {
    let igrf = CoefficientSet::igrf13();
    points
        .iter()
        .map(|&(lat, lon, alt, epoch, r)| {
            let pos = GeoPosition::with_altitude(lat, lon, alt).unwrap();
            let v = igrf.evaluate(&pos, epoch).unwrap();
            [v.bx - r[0], v.by - r[1], v.bz - r[2]]
                .iter()
                .fold(0.0f64, |m, d| m.max(d.abs()))
        })
        .fold(0.0, f64::max)
}

/// Largest relative violation of the element identities at `n` random
/// points, epochs and altitudes, scaled by total intensity.
pub fn max_identity_error(n: usize) -> f64 {
    let igrf = CoefficientSet::igrf13();
    let mut rng = rng_for(1, "identities");
    let mut worst = 0.0f64;
    for _ in 0..n {
        let pos = GeoPosition::with_altitude(
            rng.random_range(-89.0..89.0),
            rng.random_range(-180.0..180.0),
            rng.random_range(0.0..600.0),
        )
        .unwrap();
        let e = igrf.elements(&pos, rng.random_range(1900.0..2025.0)).unwrap();
        let errs = [
            e.bx - e.b_h * e.d.cos(),
            e.by - e.b_h * e.d.sin(),
            e.bz - e.b_f * e.i.sin(),
            e.b_h - e.b_f * e.i.cos(),
            e.b_h - e.bx.hypot(e.by),
            e.b_f - (e.bx * e.bx + e.by * e.by + e.bz * e.bz).sqrt(),
        ];
        worst = errs.iter().fold(worst, |m, d| m.max(d.abs() / e.b_f));
    }
    worst
}

/// Largest relative gap between the IGRF engine holding only the 2020
/// axial-dipole term and the closed-form dipole.
pub fn max_dipole_error() -> f64 {
    let igrf = CoefficientSet::igrf13();
    let k = igrf.epochs().iter().position(|&e| e == 2020.0).unwrap();
    let g10 = igrf.g(k, 1, 0);
    let axial = CoefficientSet::from_terms(vec![2020.0], &[vec![(1, 0, g10, 0.0)]], None).unwrap();
    let dipole = DipoleField::new(g10);
    let mut rng = rng_for(2, "dipole");
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let pos = GeoPosition::with_altitude(
            rng.random_range(-89.9..89.9),
            rng.random_range(-180.0..180.0),
            rng.random_range(0.0..1000.0),
        )
        .unwrap();
        let a = axial.evaluate(&pos, 2020.0).unwrap();
        let b = dipole.vector(&pos, 2020.0).unwrap();
        let scale = b.magnitude();
        for d in [a.bx - b.bx, a.by - b.by, a.bz - b.bz] {
            worst = worst.max(d.abs() / scale);
        }
    }
    worst
}

/// Quoted `(lat, lon, D°, I°, B_H nT)` at the trial origin and destination.
pub const ANCHORS: [(f64, f64, f64, f64, f64); 2] = [
    (-2.0, 162.0, 8.019, -16.150, 35467.990),
    (-8.0, 164.0, 9.228, -26.923, 35199.415),
];

/// Worst `(angle error °, B_H error nT)` over both anchors at `epoch`.
pub fn anchor_errors(epoch: f64) -> (f64, f64) {
    let igrf = CoefficientSet::igrf13();
    ANCHORS.iter().fold((0.0f64, 0.0f64), |(da, db), &(lat, lon, d, i, bh)| {
        let e = igrf.elements(&GeoPosition::new(lat, lon).unwrap(), epoch).unwrap();
        let angle = (e.d.to_degrees() - d).abs().max((e.i.to_degrees() - i).abs());
        (da.max(angle), db.max((e.b_h - bh).abs()))
    })
}

/// First epoch on a 0.1-year grid over [2015, 2025] where both anchors
/// match within 0.5° and 300 nT, with its errors.
pub fn matching_anchor_epoch() -> Option<(f64, f64, f64)> {
    (0..=100).map(|k| 2015.0 + 0.1 * k as f64).find_map(|epoch| {
        let (da, db) = anchor_errors(epoch);
        (da <= 0.5 && db <= 300.0).then_some((epoch, da, db))
    })
}

fn random_slope<R: Rng>(rng: &mut R) -> GradientVector {
    GradientVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Largest angular gap between the I/B_H heading and the true bearing in
/// random uniform-gradient fields.
pub fn max_heading_error(n: usize) -> f64 {
    let mut rng = rng_for(3, "heading");
    let mut worst = 0.0f64;
    for _ in 0..n {
        let slopes = [random_slope(&mut rng), random_slope(&mut rng), random_slope(&mut rng)];
        let field = LinearField::new(LocalFrame::new(-5.0, 165.0), [0.1, -0.3, 35_000.0], slopes);
        let (x0, y0) = (rng.random_range(-5e4..5e4), rng.random_range(-5e4..5e4));
        let (x1, y1) = (rng.random_range(-5e4..5e4), rng.random_range(-5e4..5e4));
        let c = field.triple_at_xy(x0, y0);
        let t = field.triple_at_xy(x1, y1);
        let h = theoretical_heading([c[1], c[2]], [t[1], t[2]], [slopes[1], slopes[2]]);
        let Heading::Valid(h) = h else {
            panic!("degenerate random configuration");
        };
        worst = worst.max(angular_distance(h, (y1 - y0).atan2(x1 - x0)));
    }
    worst
}

/// Largest gap between `λ′(R g) − λ′(g)` and the rotation angle. Rotating
/// gradients and displacement together leaves the parameter values
/// unchanged, so only the gradients move.
pub fn max_equivariance_error(n: usize) -> f64 {
    let mut rng = rng_for(4, "equivariance");
    let mut worst = 0.0f64;
    for _ in 0..n {
        let g = [random_slope(&mut rng), random_slope(&mut rng)];
        let cur = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let tgt = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let alpha = rng.random_range(-PI..PI);
        let (s, c) = alpha.sin_cos();
        let rot = |v: GradientVector| GradientVector::new(c * v.gx - s * v.gy, s * v.gx + c * v.gy);
        let (Heading::Valid(a), Heading::Valid(b)) = (
            theoretical_heading(cur, tgt, g),
            theoretical_heading(cur, tgt, [rot(g[0]), rot(g[1])]),
        ) else {
            panic!("degenerate random configuration");
        };
        worst = worst.max(angular_distance(b, a + alpha));
    }
    worst
}

pub fn desk_region() -> Region {
    Region::square(-5.0, 165.0, 150_000.0)
}

pub fn desk_tasks() -> TaskDistribution {
    TaskDistribution {
        min_separation_m: 40_000.0,
        max_separation_m: 80_000.0,
        epoch: 2020.0,
    }
}

pub fn desk_env() -> NavEnv {
    let region = desk_region();
    let config = EnvConfig {
        max_distance_m: 10_000.0,
        success_radius_m: 2_000.0,
        ..EnvConfig::default()
    };
    NavEnv::with_sampled_bounds(Arc::new(LinearField::desk(region.frame())), region, config, 2020.0)
        .unwrap()
}

/// Largest deviations from `F = 3` at reset, `F = 0` at the destination
/// and `F = 0.75` halfway, over `n` desk tasks.
pub fn objective_errors(n: usize) -> [f64; 3] {
    let mut env = desk_env();
    let field = LinearField::desk(desk_region().frame());
    let frame = desk_region().frame();
    let tasks = generate_tasks(&desk_region(), n, &desk_tasks(), 5).unwrap();
    let mut worst = [0.0f64; 3];
    for t in &tasks {
        env.reset(*t).unwrap();
        let f0 = env.trace().unwrap().rows[0].f;
        let (x0, y0) = frame.to_local(&t.origin);
        let (x1, y1) = frame.to_local(&t.destination);
        let org = field.triple_at_xy(x0, y0);
        let tgt = field.triple_at_xy(x1, y1);
        let mid = field.triple_at_xy((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let errs = [
            (f0 - 3.0).abs(),
            objective(&tgt, &tgt, &org).value.abs(),
            (objective(&mid, &tgt, &org).value - 0.75).abs(),
        ];
        for k in 0..3 {
            worst[k] = worst[k].max(errs[k]);
        }
    }
    worst
}
