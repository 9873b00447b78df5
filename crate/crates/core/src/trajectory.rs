//! Raw trajectories and their resampling into discrete curves.
//!
//! A tracker records a cell position once per frame, so a trajectory is an
//! ordered polyline of time-stamped points. Consecutive recorded points
//! bound a *segment*; resampling inserts grid points inside each segment so
//! the numerical curve starts with a nearly uniform point distribution.
//! Spans between grid points are called *elements* to keep them distinct
//! from segments.

use crate::geom::Vec2;
use crate::ledger::{SegmentLedger, SegmentState};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("trajectory `{id}` has {len} points; at least 2 are required")]
    TooShort { id: String, len: usize },
    #[error("trajectory `{id}` has non-increasing times at index {index}")]
    NonIncreasingTimes { id: String, index: usize },
    #[error("trajectory `{id}` has {points} points but {times} times")]
    LengthMismatch {
        id: String,
        points: usize,
        times: usize,
    },
    #[error("trajectory `{id}` degenerated to a single point after merging duplicates")]
    Degenerate { id: String },
}

/// An ordered, time-stamped 2D track as recorded by a tracker.
///
/// Positions are in micrometers, times in minutes. Consecutive duplicate
/// points are merged at construction (their time budget folds into the
/// following segment) so every segment has positive length.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub id: String,
    pub points: Vec<Vec2>,
    pub times: Vec<f64>,
    /// Frame interval in minutes.
    pub frame_interval: f64,
    /// Number of consecutive duplicate points merged at construction.
    pub merged_duplicates: usize,
}

impl Trajectory {
    /// Builds a trajectory, validating invariants and collapsing duplicate
    /// consecutive points. A run of identical points keeps its first
    /// timestamp, so the run's time budget is summed into the segment that
    /// follows it.
    pub fn new(
        id: impl Into<String>,
        points: Vec<Vec2>,
        times: Vec<f64>,
        frame_interval: f64,
    ) -> Result<Self, TrajectoryError> {
        let id = id.into();
        if points.len() != times.len() {
            return Err(TrajectoryError::LengthMismatch {
                id,
                points: points.len(),
                times: times.len(),
            });
        }
        if points.len() < 2 {
            return Err(TrajectoryError::TooShort {
                id,
                len: points.len(),
            });
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(TrajectoryError::NonIncreasingTimes { id, index: i });
            }
        }

        let mut merged_points = Vec::with_capacity(points.len());
        let mut merged_times = Vec::with_capacity(times.len());
        let mut merged_duplicates = 0usize;
        for (p, t) in points.iter().zip(times.iter()) {
            match merged_points.last() {
                Some(&last) if last == *p => merged_duplicates += 1,
                _ => {
                    merged_points.push(*p);
                    merged_times.push(*t);
                }
            }
        }
        if merged_points.len() < 2 {
            return Err(TrajectoryError::Degenerate { id });
        }

        Ok(Trajectory {
            id,
            points: merged_points,
            times: merged_times,
            frame_interval,
            merged_duplicates,
        })
    }

    /// Number of segments (one less than the number of recorded points).
    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Length of segment `j` (0-based; segment `j` connects points `j` and `j+1`).
    pub fn segment_length(&self, j: usize) -> f64 {
        self.points[j].distance(self.points[j + 1])
    }

    /// Time budget of segment `j` in minutes.
    pub fn segment_duration(&self, j: usize) -> f64 {
        self.times[j + 1] - self.times[j]
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segment_count()).map(|j| self.segment_length(j)).sum()
    }
}

/// A resampled polyline undergoing evolution.
///
/// Grid points are indexed `0..=n+1` where `n` is the number of interior
/// (movable) points; the two endpoints stay fixed for the whole evolution.
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    pub points: Vec<Vec2>,
    /// Target resample spacing in micrometers.
    pub hbar: f64,
}

impl DiscreteCurve {
    /// Number of interior grid points (`n` in the scheme).
    pub fn interior_count(&self) -> usize {
        self.points.len() - 2
    }

    /// Index of the last grid point (`n + 1`).
    pub fn last_index(&self) -> usize {
        self.points.len() - 1
    }

    /// Element lengths aligned with grid indices: entry `i` holds
    /// `|x_i - x_{i-1}|` for `i >= 1`; entry 0 is unused and set to 0.
    pub fn element_lengths(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.points.len()];
        for i in 1..self.points.len() {
            h[i] = self.points[i].distance(self.points[i - 1]);
        }
        h
    }

    pub fn total_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Mean element length.
    pub fn mean_element_length(&self) -> f64 {
        self.total_length() / (self.points.len() - 1) as f64
    }
}

/// Resamples a trajectory into a discrete curve plus the ledger that tracks
/// each original segment on it.
///
/// Each segment of length `L` is split into `ceil(L / hbar)` equal
/// subintervals, so interior spacing never exceeds `hbar` and original
/// recorded points are preserved exactly as grid points.
pub fn resample(traj: &Trajectory, hbar: f64) -> (DiscreteCurve, SegmentLedger) {
    assert!(hbar > 0.0, "resample spacing must be positive");

    let mut points = Vec::new();
    let mut segments = Vec::with_capacity(traj.segment_count());
    points.push(traj.points[0]);

    for j in 0..traj.segment_count() {
        let a = traj.points[j];
        let b = traj.points[j + 1];
        let len = a.distance(b);
        let start_index = points.len() - 1;
        let pieces = (len / hbar).ceil().max(1.0) as usize;
        for s in 1..pieces {
            points.push(a.lerp(b, s as f64 / pieces as f64));
        }
        points.push(b);
        segments.push(SegmentState {
            length: len,
            discrete_length: len,
            start_index,
            end_index: points.len() - 1,
            duration: traj.segment_duration(j),
            disappeared: false,
            original_start: a,
            original_end: b,
        });
    }

    let curve = DiscreteCurve { points, hbar };
    let ledger = SegmentLedger::new(segments);
    (curve, ledger)
}
