//! Self-intersection detection on background grids, point thinning, and the
//! adaptive smoothing-parameter ramp.
//!
//! Detection is O(n): two pixel grids of cell size `2*hbar`, the second
//! shifted by `hbar` in both axes, are marked in a first pass and walked in
//! a second. Two grid points landing in the same cell more than four
//! indices apart flag a self-intersecting part. Reported spans are merged
//! so that each maximal span contains all overlapping detections.

use crate::geom::Vec2;
use crate::ledger::SegmentLedger;
use crate::trajectory::DiscreteCurve;
use std::collections::HashMap;

/// Indices `i1 < i2` bounding a self-intersecting part of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectionSpan {
    pub i1: usize,
    pub i2: usize,
}

/// Work counters for the linear-cost assertion.
#[derive(Debug, Clone, Copy, Default)]
pub struct DetectionStats {
    /// Cell mark/stamp operations performed across both grids.
    pub cell_ops: usize,
}

#[derive(Clone, Copy)]
enum Cell {
    Marked,
    Stamped(usize),
}

struct BackgroundGrid {
    cell_size: f64,
    offset: f64,
    cells: HashMap<(i64, i64), Cell>,
}

impl BackgroundGrid {
    fn new(cell_size: f64, offset: f64, capacity: usize) -> Self {
        BackgroundGrid {
            cell_size,
            offset,
            cells: HashMap::with_capacity(capacity),
        }
    }

    fn key(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x - self.offset) / self.cell_size).floor() as i64,
            ((p.y - self.offset) / self.cell_size).floor() as i64,
        )
    }
}

/// Detects self-intersections of the polyline in O(n) grid operations.
///
/// A span is reported when a point lands in a cell whose most recent
/// stamp is more than four indices old; unions from both grids are merged
/// into maximal spans.
pub fn detect_self_intersections(points: &[Vec2], hbar: f64) -> Vec<IntersectionSpan> {
    detect_self_intersections_with_stats(points, hbar).0
}

pub fn detect_self_intersections_with_stats(
    points: &[Vec2],
    hbar: f64,
) -> (Vec<IntersectionSpan>, DetectionStats) {
    let mut stats = DetectionStats::default();
    if points.len() < 2 {
        return (Vec::new(), stats);
    }
    let mut raw: Vec<IntersectionSpan> = Vec::new();
    for grid_offset in [0.0, hbar] {
        let mut grid = BackgroundGrid::new(2.0 * hbar, grid_offset, points.len());
        // First pass: mark occupied cells.
        for &p in points {
            grid.cells.insert(grid.key(p), Cell::Marked);
            stats.cell_ops += 1;
        }
        // Second pass: stamp indices in visiting order and report revisits.
        for (i, &p) in points.iter().enumerate() {
            let key = grid.key(p);
            stats.cell_ops += 1;
            match grid.cells.get_mut(&key) {
                Some(cell @ Cell::Marked) => *cell = Cell::Stamped(i),
                Some(Cell::Stamped(prev)) => {
                    if i - *prev > 4 {
                        raw.push(IntersectionSpan { i1: *prev, i2: i });
                    }
                    grid.cells.insert(key, Cell::Stamped(i));
                }
                None => unreachable!("cell marked in first pass"),
            }
        }
    }
    (merge_spans(raw), stats)
}

/// Merges overlapping spans transitively into maximal ones.
fn merge_spans(mut spans: Vec<IntersectionSpan>) -> Vec<IntersectionSpan> {
    if spans.is_empty() {
        return spans;
    }
    spans.sort_by_key(|s| (s.i1, s.i2));
    let mut merged: Vec<IntersectionSpan> = Vec::with_capacity(spans.len());
    for s in spans {
        match merged.last_mut() {
            Some(last) if s.i1 <= last.i2 => last.i2 = last.i2.max(s.i2),
            _ => merged.push(s),
        }
    }
    merged
}

/// Removes every second interior grid point when the mean element length
/// has dropped below `hbar / 2`. Fixed endpoints and ledger segment
/// endpoints always survive; ledger indices are remapped to the thinned
/// curve. Returns true when points were removed.
pub fn thin_points(curve: &mut DiscreteCurve, ledger: &mut SegmentLedger, hbar: f64) -> bool {
    if curve.points.len() < 3 || curve.mean_element_length() >= hbar / 2.0 {
        return false;
    }
    let last = curve.last_index();
    let mut protected = vec![false; curve.points.len()];
    protected[0] = true;
    protected[last] = true;
    for idx in ledger.endpoint_indices() {
        protected[idx] = true;
    }

    let mut keep = vec![true; curve.points.len()];
    for i in 1..last {
        if i % 2 == 1 && !protected[i] {
            keep[i] = false;
        }
    }
    if keep.iter().all(|&k| k) {
        return false;
    }

    let mut index_map = vec![usize::MAX; curve.points.len()];
    let mut new_points = Vec::with_capacity(curve.points.len() / 2 + 2);
    for (i, (&k, &p)) in keep.iter().zip(curve.points.iter()).enumerate() {
        if k {
            index_map[i] = new_points.len();
            new_points.push(p);
        }
    }
    curve.points = new_points;
    ledger.remap_indices(&index_map);
    true
}

/// Per-point smoothing weights from detected spans: full strength inside
/// every span, linear six-point ramps on both sides, zero elsewhere.
/// Overlapping contributions combine by pointwise maximum.
pub fn adaptive_params(
    spans: &[IntersectionSpan],
    n_points: usize,
    delta_max: f64,
    lambda_max: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut delta = vec![0.0f64; n_points];
    let mut lambda = vec![0.0f64; n_points];
    let mut raise = |i: usize, frac: f64| {
        delta[i] = delta[i].max(frac * delta_max);
        lambda[i] = lambda[i].max(frac * lambda_max);
    };
    for span in spans {
        for i in span.i1..=span.i2.min(n_points - 1) {
            raise(i, 1.0);
        }
        for step in 1..=5usize {
            let frac = (6 - step) as f64 / 6.0;
            if span.i1 >= step {
                raise(span.i1 - step, frac);
            }
            let after = span.i2 + step;
            if after < n_points {
                raise(after, frac);
            }
        }
    }
    (delta, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{resample, Trajectory};

    fn curve_from(points: Vec<Vec2>) -> DiscreteCurve {
        DiscreteCurve { points, hbar: 1.0 }
    }

    fn circle_arc(n: usize, radius: f64, sweep: f64) -> Vec<Vec2> {
        (0..n)
            .map(|i| {
                let a = sweep * i as f64 / (n - 1) as f64;
                Vec2::new(radius * a.cos(), radius * a.sin())
            })
            .collect()
    }

    #[test]
    fn convex_arc_reports_nothing() {
        // Quarter circle, radius much larger than spacing: no revisits.
        let pts = circle_arc(100, 50.0, std::f64::consts::FRAC_PI_2);
        let spans = detect_self_intersections(&pts, 1.0);
        assert!(spans.is_empty());
    }

    #[test]
    fn figure_eight_reports_span_containing_crossing() {
        // Lemniscate-like figure eight sampled densely.
        let n = 200;
        let pts: Vec<Vec2> = (0..n)
            .map(|i| {
                let t = 0.13 + 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64;
                Vec2::new(6.0 * t.sin(), 3.0 * (2.0 * t).sin())
            })
            .collect();
        let spans = detect_self_intersections(&pts, 0.35);
        assert!(!spans.is_empty());
        // Every oracle crossing with enough index separation must be covered.
        let crossings = crate::testing::polyline_crossings(&pts);
        assert!(!crossings.is_empty());
        for (e1, e2) in crossings {
            if crate::testing::crossing_inner_gap(e1, e2) > 4 {
                assert!(
                    crate::testing::crossing_covered(&spans, e1, e2),
                    "spans {spans:?} miss crossing ({e1}, {e2})"
                );
            }
        }
        for s in &spans {
            assert!(s.i2 - s.i1 > 4);
        }
    }

    #[test]
    fn close_indices_not_reported() {
        // Points 0..3 share a cell but the index gap never exceeds 4.
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.1, 0.0),
            Vec2::new(0.2, 0.0),
            Vec2::new(0.1, 0.1),
        ];
        let spans = detect_self_intersections(&pts, 1.0);
        assert!(spans.is_empty());
    }

    #[test]
    fn merge_spans_transitively() {
        let merged = merge_spans(vec![
            IntersectionSpan { i1: 10, i2: 20 },
            IntersectionSpan { i1: 18, i2: 30 },
            IntersectionSpan { i1: 29, i2: 33 },
            IntersectionSpan { i1: 50, i2: 60 },
        ]);
        assert_eq!(
            merged,
            vec![
                IntersectionSpan { i1: 10, i2: 33 },
                IntersectionSpan { i1: 50, i2: 60 }
            ]
        );
    }

    #[test]
    fn thinning_identity_when_spacing_healthy() {
        let pts: Vec<Vec2> = (0..10).map(|i| Vec2::new(i as f64, 0.0)).collect();
        let mut curve = curve_from(pts.clone());
        let traj = Trajectory::new(
            "t",
            vec![Vec2::new(0.0, 0.0), Vec2::new(9.0, 0.0)],
            vec![0.0, 2.5],
            2.5,
        )
        .unwrap();
        let (_, mut ledger) = resample(&traj, 1.0);
        assert!(!thin_points(&mut curve, &mut ledger, 1.0));
        assert_eq!(curve.points, pts);
    }

    #[test]
    fn thinning_halves_dense_uniform_chain() {
        // 101 points spaced hbar/4: thinning removes the 50 odd interior
        // points, leaving 51 with spacing ~hbar/2.
        let hbar = 1.0;
        let traj = Trajectory::new(
            "t",
            vec![Vec2::new(0.0, 0.0), Vec2::new(25.0, 0.0)],
            vec![0.0, 2.5],
            2.5,
        )
        .unwrap();
        let (mut curve, mut ledger) = resample(&traj, 0.25);
        assert_eq!(curve.points.len(), 101);
        assert!(thin_points(&mut curve, &mut ledger, hbar));
        assert_eq!(curve.points.len(), 51);
        let mean = curve.mean_element_length();
        assert!((mean - hbar / 2.0).abs() < 0.02, "mean {mean}");
        assert_eq!(ledger.segments()[0].end_index, 50);
    }

    #[test]
    fn thinning_preserves_ledger_endpoints() {
        let traj = Trajectory::new(
            "t",
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.05, 0.0),
                Vec2::new(2.0, 0.0),
            ],
            vec![0.0, 2.5, 5.0],
            2.5,
        )
        .unwrap();
        let (mut curve, mut ledger) = resample(&traj, 0.1);
        let mid_before = curve.points[ledger.segments()[0].end_index];
        assert!(thin_points(&mut curve, &mut ledger, 1.0));
        let seg = &ledger.segments()[0];
        assert_eq!(curve.points[seg.end_index], mid_before);
        assert_eq!(curve.points[0], Vec2::new(0.0, 0.0));
        assert_eq!(*curve.points.last().unwrap(), Vec2::new(2.0, 0.0));
    }

    #[test]
    fn adaptive_no_spans_all_zero() {
        let (delta, lambda) = adaptive_params(&[], 30, 0.01, 20.0);
        assert!(delta.iter().all(|&d| d == 0.0));
        assert!(lambda.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn adaptive_ramp_matches_piecewise_formula() {
        let spans = [IntersectionSpan { i1: 10, i2: 20 }];
        let (delta, lambda) = adaptive_params(&spans, 32, 0.01, 20.0);
        for i in 10..=20 {
            assert_eq!(delta[i], 0.01);
            assert_eq!(lambda[i], 20.0);
        }
        for k in 0..5usize {
            let expect = (1 + k) as f64 * 0.01 / 6.0;
            assert!((delta[5 + k] - expect).abs() < 1e-12, "ramp up at {}", 5 + k);
            let expect_l = (1 + k) as f64 * 20.0 / 6.0;
            assert!((lambda[5 + k] - expect_l).abs() < 1e-12);
            // symmetric decay after i2 = 20
            assert!((delta[25 - k] - expect).abs() < 1e-12, "ramp down at {}", 25 - k);
        }
        assert_eq!(delta[4], 0.0);
        assert_eq!(delta[26], 0.0);
    }

    #[test]
    fn adaptive_overlap_takes_pointwise_max() {
        let spans = [
            IntersectionSpan { i1: 10, i2: 14 },
            IntersectionSpan { i1: 18, i2: 22 },
        ];
        let (delta, _) = adaptive_params(&spans, 40, 0.012, 20.0);
        for i in 0..40 {
            let mut expect: f64 = 0.0;
            for s in &spans {
                let v = if i >= s.i1 && i <= s.i2 {
                    1.0
                } else if i < s.i1 && s.i1 - i <= 5 {
                    (6 - (s.i1 - i)) as f64 / 6.0
                } else if i > s.i2 && i - s.i2 <= 5 {
                    (6 - (i - s.i2)) as f64 / 6.0
                } else {
                    0.0
                };
                expect = expect.max(v * 0.012);
            }
            assert!((delta[i] - expect).abs() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn ramp_clipped_at_curve_ends() {
        let spans = [IntersectionSpan { i1: 2, i2: 27 }];
        let (delta, _) = adaptive_params(&spans, 30, 0.01, 20.0);
        assert_eq!(delta.len(), 30);
        assert!(delta[0] > 0.0);
        assert!(delta[29] > 0.0);
    }
}
