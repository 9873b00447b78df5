//! Seeded synthetic fixtures: looping tracks, random-walk ensembles and
//! random polylines. All generators are deterministic for a given seed.

use crate::geom::Vec2;
use crate::msd::{ExtractionMethod, RandomSubTrajectory};
use crate::trajectory::Trajectory;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// A directional track that draws `n_loops` loops along its way. With
/// `alternate` the loop orientation flips each period, tracing a chain of
/// figure-eight lobes; otherwise all loops coil the same way. A small
/// seeded jitter removes geometric degeneracies.
#[allow(clippy::too_many_arguments)]
pub fn looping_track(
    id: &str,
    n_loops: usize,
    alternate: bool,
    points_per_loop: usize,
    radius: f64,
    advance: f64,
    jitter: f64,
    seed: u64,
    frame_interval: f64,
) -> Trajectory {
    let mut r = rng(seed);
    let total = n_loops * points_per_loop + 1;
    let mut points = Vec::with_capacity(total);
    for t in 0..total {
        let loop_index = (t / points_per_loop).min(n_loops - 1);
        let orient = if alternate && loop_index % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let theta = 2.0 * std::f64::consts::PI * t as f64 / points_per_loop as f64;
        let x = advance * t as f64 + radius * theta.sin() + jitter * normal(&mut r);
        let y = orient * radius * (theta.cos() - 1.0) + jitter * normal(&mut r);
        points.push(Vec2::new(x, y));
    }
    let times: Vec<f64> = (0..total).map(|i| i as f64 * frame_interval).collect();
    Trajectory::new(id, points, times, frame_interval).unwrap()
}

/// Figure-eight fixture: two loops of alternating orientation.
pub fn figure_eight(id: &str, points_per_loop: usize, radius: f64, frame_interval: f64) -> Trajectory {
    looping_track(
        id,
        2,
        true,
        points_per_loop / 2,
        radius,
        radius * 0.22,
        radius * 0.01,
        8,
        frame_interval,
    )
}

/// Triple-loop fixture: three loops coiling the same way.
pub fn triple_loop(id: &str, points_per_loop: usize, radius: f64, frame_interval: f64) -> Trajectory {
    looping_track(
        id,
        3,
        false,
        points_per_loop,
        radius,
        radius * 0.22,
        radius * 0.01,
        1815,
        frame_interval,
    )
}

/// Random open polyline that crosses itself: a wandering walk whose heading
/// diffuses while occasionally curling hard.
pub fn random_self_crossing_polyline(rng: &mut ChaCha8Rng, n_points: usize, step: f64) -> Vec<Vec2> {
    let mut points = Vec::with_capacity(n_points);
    let mut pos = Vec2::ZERO;
    let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut curl = 0.0f64;
    points.push(pos);
    for i in 1..n_points {
        if i % 37 == 0 {
            // switch between drifting and curling behavior
            curl = if rng.gen_bool(0.5) {
                rng.gen_range(0.5..1.1) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
            } else {
                0.0
            };
        }
        heading += curl + 0.35 * normal(rng);
        let len = step * rng.gen_range(0.4..1.0);
        pos += Vec2::new(heading.cos(), heading.sin()) * len;
        points.push(pos);
    }
    points
}

/// Gentle random open curve with bounded turning (useful where the scheme
/// must stay in its smooth regime).
pub fn random_open_curve(rng: &mut ChaCha8Rng, n_points: usize, step: f64) -> Vec<Vec2> {
    let mut points = Vec::with_capacity(n_points);
    let mut pos = Vec2::ZERO;
    let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    points.push(pos);
    for _ in 1..n_points {
        heading += rng.gen_range(-0.35..0.35);
        let len = step * rng.gen_range(0.6..1.4);
        pos += Vec2::new(heading.cos(), heading.sin()) * len;
        points.push(pos);
    }
    points
}

fn walk_to_sub(id: String, points: Vec<Vec2>, frame_interval: f64) -> RandomSubTrajectory {
    let times: Vec<f64> = (0..points.len())
        .map(|i| i as f64 * frame_interval)
        .collect();
    RandomSubTrajectory::new(
        id,
        points,
        times,
        frame_interval,
        ExtractionMethod::DisappearedSegments,
        0,
    )
    .expect("generated walk has enough points")
}

/// Ensemble of 2D Brownian walkers with diffusion coefficient `d`
/// (micrometers squared per minute). The expected MSD is `4 d t`.
pub fn brownian_ensemble(
    seed: u64,
    walkers: usize,
    steps: usize,
    d: f64,
    frame_interval: f64,
) -> Vec<RandomSubTrajectory> {
    let mut r = rng(seed);
    let sigma = (2.0 * d * frame_interval).sqrt();
    (0..walkers)
        .map(|w| {
            let mut pos = Vec2::new(normal(&mut r) * 5.0, normal(&mut r) * 5.0);
            let mut pts = Vec::with_capacity(steps + 1);
            pts.push(pos);
            for _ in 0..steps {
                pos += Vec2::new(sigma * normal(&mut r), sigma * normal(&mut r));
                pts.push(pos);
            }
            walk_to_sub(format!("bm-{w}"), pts, frame_interval)
        })
        .collect()
}

/// Ensemble of straight-line walkers with random speed and direction.
pub fn ballistic_ensemble(
    seed: u64,
    walkers: usize,
    steps: usize,
    speed_range: (f64, f64),
    frame_interval: f64,
) -> Vec<RandomSubTrajectory> {
    let mut r = rng(seed);
    (0..walkers)
        .map(|w| {
            let speed = r.gen_range(speed_range.0..speed_range.1);
            let angle = r.gen_range(0.0..std::f64::consts::TAU);
            let v = Vec2::new(angle.cos(), angle.sin()) * speed;
            let origin = Vec2::new(normal(&mut r) * 3.0, normal(&mut r) * 3.0);
            let pts: Vec<Vec2> = (0..=steps)
                .map(|i| origin + v * (i as f64 * frame_interval))
                .collect();
            walk_to_sub(format!("bal-{w}"), pts, frame_interval)
        })
        .collect()
}

/// Brownian walkers confined to a reflecting square box of side
/// `box_side`; their MSD saturates, giving a subdiffusive fitted slope.
pub fn confined_ensemble(
    seed: u64,
    walkers: usize,
    steps: usize,
    d: f64,
    box_side: f64,
    frame_interval: f64,
) -> Vec<RandomSubTrajectory> {
    let mut r = rng(seed);
    let sigma = (2.0 * d * frame_interval).sqrt();
    let reflect = |mut v: f64| -> f64 {
        loop {
            if v < 0.0 {
                v = -v;
            } else if v > box_side {
                v = 2.0 * box_side - v;
            } else {
                return v;
            }
        }
    };
    (0..walkers)
        .map(|w| {
            let mut pos = Vec2::new(
                r.gen_range(0.0..box_side),
                r.gen_range(0.0..box_side),
            );
            let mut pts = Vec::with_capacity(steps + 1);
            pts.push(pos);
            for _ in 0..steps {
                pos = Vec2::new(
                    reflect(pos.x + sigma * normal(&mut r)),
                    reflect(pos.y + sigma * normal(&mut r)),
                );
                pts.push(pos);
            }
            walk_to_sub(format!("conf-{w}"), pts, frame_interval)
        })
        .collect()
}

/// A track mixing directional runs with jittery knots, the texture the
/// smoothing pipeline is built for.
pub fn directional_with_knots(
    id: &str,
    seed: u64,
    n_points: usize,
    frame_interval: f64,
) -> Trajectory {
    let mut r = rng(seed);
    let mut pos = Vec2::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
    let mut heading: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let mut points = Vec::with_capacity(n_points);
    points.push(pos);
    let mut knot_left = 0usize;
    for i in 1..n_points {
        if knot_left == 0 && i % 23 == 0 && r.gen_bool(0.6) {
            knot_left = r.gen_range(8..14);
        }
        let (turn_scale, step) = if knot_left > 0 {
            knot_left -= 1;
            (1.6, 0.45)
        } else {
            (0.12, 1.3)
        };
        heading += turn_scale * normal(&mut r);
        pos += Vec2::new(heading.cos(), heading.sin()) * step * r.gen_range(0.7..1.3);
        points.push(pos);
    }
    let times: Vec<f64> = (0..n_points).map(|i| i as f64 * frame_interval).collect();
    Trajectory::new(id, points, times, frame_interval).unwrap()
}

/// The bundled synthetic dataset driven by one seed: a handful of
/// directional tracks with knots plus the two loop fixtures.
pub fn demo_tracks(seed: u64, frame_interval: f64) -> Vec<Trajectory> {
    let mut tracks = Vec::new();
    for i in 0..4 {
        tracks.push(directional_with_knots(
            &format!("track-{i}"),
            seed.wrapping_add(i as u64),
            70,
            frame_interval,
        ));
    }
    tracks.push(figure_eight("track-eight", 36, 2.0, frame_interval));
    tracks.push(triple_loop("track-loops", 14, 1.4, frame_interval));
    tracks
}
