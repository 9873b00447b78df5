//! Velocity estimation on smoothed curves.
//!
//! Each live segment contributes one speed, its discrete length over its
//! time budget; grid points inside the segment get that speed along their
//! local element direction. Disappeared segments donate half their budget
//! to the nearest live segment on each side before speeds are formed.

use crate::geom::Vec2;
use crate::ledger::SegmentLedger;
use crate::trajectory::DiscreteCurve;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VelocityError {
    #[error("no live segments; velocity undefined for a fully random track")]
    NoLiveSegments,
}

/// A velocity sample at a grid point of the smoothed curve.
#[derive(Debug, Clone, Copy)]
pub struct VelocitySample {
    /// Position in micrometers.
    pub position: Vec2,
    /// Velocity in micrometers per minute.
    pub velocity: Vec2,
    /// 0-based index of the owning segment.
    pub segment: usize,
    pub grid_index: usize,
}

/// Moves the time budgets of disappeared segments onto their live
/// neighbors: half to the nearest live segment before, half to the nearest
/// live one after; a missing side donates its half to the other. The total
/// budget over live segments is conserved.
pub fn redistribute_time(ledger: &SegmentLedger) -> Result<Vec<f64>, VelocityError> {
    let segs = ledger.segments();
    if ledger.live_count() == 0 {
        return Err(VelocityError::NoLiveSegments);
    }
    let mut budgets: Vec<f64> = segs.iter().map(|s| s.duration).collect();
    for j in 0..segs.len() {
        if !segs[j].disappeared {
            continue;
        }
        let donated = segs[j].duration;
        budgets[j] = 0.0;
        let before = (0..j).rev().find(|&i| !segs[i].disappeared);
        let after = (j + 1..segs.len()).find(|&i| !segs[i].disappeared);
        match (before, after) {
            (Some(b), Some(a)) => {
                budgets[b] += donated / 2.0;
                budgets[a] += donated / 2.0;
            }
            (Some(b), None) => budgets[b] += donated,
            (None, Some(a)) => budgets[a] += donated,
            (None, None) => unreachable!("live_count() > 0"),
        }
    }
    Ok(budgets)
}

/// Velocity samples for every grid point of live segments. The speed of
/// segment `j` is its discrete length over its redistributed budget; the
/// direction at grid point `i` follows the element ending at `i`. The grid
/// point shared by two live segments keeps the earlier segment's sample;
/// the very first grid point uses its outgoing element's direction.
pub fn compute_velocities(
    curve: &DiscreteCurve,
    ledger: &SegmentLedger,
) -> Result<Vec<VelocitySample>, VelocityError> {
    let budgets = redistribute_time(ledger)?;
    let segs = ledger.segments();
    let mut samples = Vec::with_capacity(curve.points.len());
    let mut next_start = 0usize;

    for (j, seg) in segs.iter().enumerate() {
        if seg.disappeared {
            continue;
        }
        let speed = seg.discrete_length / budgets[j];
        let from = seg.start_index.max(next_start);
        for i in from..=seg.end_index {
            let dir_span = if i == 0 {
                curve.points[1] - curve.points[0]
            } else {
                curve.points[i] - curve.points[i - 1]
            };
            let len = dir_span.norm();
            if len <= 0.0 {
                continue; // collapsed element; skip the point
            }
            samples.push(VelocitySample {
                position: curve.points[i],
                velocity: dir_span * (speed / len),
                segment: j,
                grid_index: i,
            });
        }
        next_start = seg.end_index + 1;
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::SegmentState;
    use approx::assert_relative_eq;

    fn seg(start: usize, end: usize, discrete: f64, duration: f64, dead: bool) -> SegmentState {
        SegmentState {
            length: if dead { 0.0 } else { discrete },
            discrete_length: if dead { 0.0 } else { discrete },
            start_index: start,
            end_index: if dead { start } else { end },
            duration,
            disappeared: dead,
            original_start: Vec2::ZERO,
            original_end: Vec2::ZERO,
        }
    }

    #[test]
    fn redistribute_identity_without_disappearances() {
        let ledger = SegmentLedger::new(vec![
            seg(0, 3, 3.0, 2.5, false),
            seg(3, 6, 3.0, 2.5, false),
        ]);
        let budgets = redistribute_time(&ledger).unwrap();
        assert_eq!(budgets, vec![2.5, 2.5]);
    }

    #[test]
    fn redistribute_splits_half_each_way() {
        let ledger = SegmentLedger::new(vec![
            seg(0, 3, 3.0, 2.5, false),
            seg(3, 3, 0.0, 2.5, true),
            seg(3, 6, 3.0, 2.5, false),
        ]);
        let budgets = redistribute_time(&ledger).unwrap();
        assert_relative_eq!(budgets[0], 3.75);
        assert_eq!(budgets[1], 0.0);
        assert_relative_eq!(budgets[2], 3.75);
    }

    #[test]
    fn redistribute_run_of_three_conserves_total() {
        let ledger = SegmentLedger::new(vec![
            seg(0, 2, 2.0, 2.5, false),
            seg(2, 2, 0.0, 2.5, true),
            seg(2, 2, 0.0, 2.5, true),
            seg(2, 2, 0.0, 2.5, true),
            seg(2, 5, 2.0, 2.5, false),
        ]);
        let budgets = redistribute_time(&ledger).unwrap();
        let live_total: f64 = budgets[0] + budgets[4];
        assert!((live_total - 5.0 * 2.5).abs() < 1e-12);
        assert_relative_eq!(budgets[0], 2.5 + 3.0 * 1.25);
    }

    #[test]
    fn redistribute_boundary_disappearance_donates_forward() {
        let ledger = SegmentLedger::new(vec![
            seg(0, 0, 0.0, 2.5, true),
            seg(0, 4, 4.0, 2.5, false),
        ]);
        let budgets = redistribute_time(&ledger).unwrap();
        assert_relative_eq!(budgets[1], 5.0);
    }

    #[test]
    fn redistribute_errors_when_all_dead() {
        let ledger = SegmentLedger::new(vec![seg(0, 0, 0.0, 2.5, true)]);
        assert!(matches!(
            redistribute_time(&ledger),
            Err(VelocityError::NoLiveSegments)
        ));
    }

    #[test]
    fn straight_segment_constant_velocity() {
        let curve = DiscreteCurve {
            points: (0..=5).map(|i| Vec2::new(i as f64, 0.0)).collect(),
            hbar: 1.0,
        };
        let ledger = SegmentLedger::new(vec![seg(0, 5, 5.0, 2.5, false)]);
        let samples = compute_velocities(&curve, &ledger).unwrap();
        assert_eq!(samples.len(), 6);
        for s in &samples {
            assert_relative_eq!(s.velocity.x, 2.0, epsilon = 1e-12);
            assert_relative_eq!(s.velocity.y, 0.0);
        }
    }

    #[test]
    fn curved_segment_shares_speed_with_local_directions() {
        let pts: Vec<Vec2> = (0..=8)
            .map(|i| {
                let a = i as f64 * 0.2;
                Vec2::new(a.cos() * 4.0, a.sin() * 4.0)
            })
            .collect();
        let total: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        let curve = DiscreteCurve {
            points: pts,
            hbar: 1.0,
        };
        let ledger = SegmentLedger::new(vec![seg(0, 8, total, 2.5, false)]);
        let samples = compute_velocities(&curve, &ledger).unwrap();
        let speed = total / 2.5;
        for s in &samples {
            assert_relative_eq!(s.velocity.norm(), speed, epsilon = 1e-12);
        }
        // Directions follow the elements.
        let dir = (samples[3].velocity) / samples[3].velocity.norm();
        let elem = curve.points[3] - curve.points[2];
        let elem_dir = elem / elem.norm();
        assert_relative_eq!(dir.x, elem_dir.x, epsilon = 1e-12);
        assert_relative_eq!(dir.y, elem_dir.y, epsilon = 1e-12);
    }

    #[test]
    fn dead_middle_segment_inflates_neighbor_budgets() {
        let curve = DiscreteCurve {
            points: (0..=6).map(|i| Vec2::new(i as f64, 0.0)).collect(),
            hbar: 1.0,
        };
        let ledger = SegmentLedger::new(vec![
            seg(0, 3, 3.0, 2.5, false),
            seg(3, 3, 0.0, 2.5, true),
            seg(3, 6, 3.0, 2.5, false),
        ]);
        let samples = compute_velocities(&curve, &ledger).unwrap();
        // Budgets inflate to 3.75, so speeds drop below Ld / frame_interval.
        for s in &samples {
            assert_relative_eq!(s.velocity.norm(), 3.0 / 3.75, epsilon = 1e-12);
            assert!(s.velocity.norm() < 3.0 / 2.5);
        }
        // Shared grid point 3 belongs to the earlier live segment.
        let own: Vec<usize> = samples
            .iter()
            .filter(|s| s.grid_index == 3)
            .map(|s| s.segment)
            .collect();
        assert_eq!(own, vec![0]);
    }
}
