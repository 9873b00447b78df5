//! Per-segment bookkeeping during curve evolution.
//!
//! The ledger follows each original segment as if there were no tangential
//! redistribution of points: its model length shrinks with the integrated
//! curvature flux over its elements, its endpoints are relocated on the
//! evolving curve by an arclength walk, and segments whose length reaches
//! zero are flagged as disappeared (the marker for random motion). The
//! ledger is also what anchors the evolving curve to the original one: the
//! attracting term pairs grid points with partner points on the original
//! segments.

use crate::geom::Vec2;
use crate::trajectory::DiscreteCurve;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("all segments disappeared; curve degenerated")]
    AllDisappeared,
    #[error("arclength walk overran curve length by {excess} (normalization broken)")]
    WalkOverrun { excess: f64 },
}

/// State of one original segment on the evolving curve.
#[derive(Debug, Clone)]
pub struct SegmentState {
    /// Model length `L_j`, evolved as if tangential velocity were absent.
    pub length: f64,
    /// Discrete length `Ld_j` after normalization against the actual curve.
    pub discrete_length: f64,
    /// Grid index of the segment's first endpoint on the evolving curve.
    pub start_index: usize,
    /// Grid index of the segment's last endpoint on the evolving curve.
    pub end_index: usize,
    /// Time budget in minutes (frame interval, possibly merged).
    pub duration: f64,
    pub disappeared: bool,
    /// Recorded endpoints of the segment on the original trajectory.
    pub original_start: Vec2,
    pub original_end: Vec2,
}

impl SegmentState {
    pub fn original_length(&self) -> f64 {
        self.original_start.distance(self.original_end)
    }

    pub fn original_midpoint(&self) -> Vec2 {
        (self.original_start + self.original_end) * 0.5
    }
}

#[derive(Debug, Clone)]
pub struct SegmentLedger {
    segments: Vec<SegmentState>,
}

/// Per-grid-point attracting data for one evolution step.
#[derive(Debug, Clone)]
pub struct AttractingField {
    /// Partner point on the original curve for every grid index.
    pub targets: Vec<Vec2>,
    /// Normal projection `w_i` of the attracting vector; zero at endpoints.
    pub w: Vec<f64>,
}

impl SegmentLedger {
    pub fn new(segments: Vec<SegmentState>) -> Self {
        SegmentLedger { segments }
    }

    pub fn segments(&self) -> &[SegmentState] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn live_count(&self) -> usize {
        self.segments.iter().filter(|s| !s.disappeared).count()
    }

    /// Grid indices that are segment endpoints (protected from thinning).
    pub fn endpoint_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = Vec::with_capacity(self.segments.len() + 1);
        idx.push(self.segments[0].start_index);
        for s in &self.segments {
            idx.push(s.end_index);
        }
        idx.dedup();
        idx
    }

    /// Rewrites endpoint grid indices after points were removed.
    /// `index_map[old]` gives the new index of a kept point.
    pub fn remap_indices(&mut self, index_map: &[usize]) {
        for s in &mut self.segments {
            s.start_index = index_map[s.start_index];
            s.end_index = index_map[s.end_index];
        }
    }

    /// Original segment index owning grid point `i` (shared endpoints go to
    /// the earlier segment).
    pub fn segment_of_grid_point(&self, i: usize) -> usize {
        for (j, s) in self.segments.iter().enumerate() {
            if i <= s.end_index {
                return j;
            }
        }
        self.segments.len() - 1
    }

    /// Evolves model segment lengths by one step of the discrete length law:
    /// the length change of segment `j` is `tau` times the sum of
    /// `h_i k_i beta_i` over its elements. Lengths falling below the mean
    /// element length collapse to zero and the segment is marked
    /// disappeared, permanently.
    pub fn evolve_lengths(&mut self, h: &[f64], k: &[f64], beta: &[f64], tau: f64) {
        let n_elems = h.len() - 1;
        let h_mean = h[1..].iter().sum::<f64>() / n_elems as f64;
        for s in &mut self.segments {
            if s.disappeared {
                s.length = 0.0;
                continue;
            }
            let mut flux = 0.0;
            for i in (s.start_index + 1)..=s.end_index {
                flux += h[i] * k[i] * beta[i];
            }
            s.length += tau * flux;
            if !(s.length >= h_mean) {
                // covers < h_mean, negative values and NaN
                s.length = 0.0;
                s.disappeared = true;
                s.end_index = s.start_index;
            }
        }
    }

    /// Rescales model lengths into discrete lengths so that their sum equals
    /// the actual total element length of the curve; the trailing live
    /// segment absorbs the floating-point residue.
    pub fn normalize_discrete_lengths(
        &mut self,
        curve: &DiscreteCurve,
    ) -> Result<(), LedgerError> {
        let total_model: f64 = self.segments.iter().map(|s| s.length).sum();
        if total_model <= 0.0 {
            return Err(LedgerError::AllDisappeared);
        }
        let total_h = curve.total_length();
        let mut assigned = 0.0;
        let mut last_live = None;
        for (j, s) in self.segments.iter_mut().enumerate() {
            let ratio = s.length / total_model;
            s.discrete_length = ratio * total_h;
            assigned += s.discrete_length;
            if !s.disappeared {
                last_live = Some(j);
            }
        }
        let j = last_live.expect("total_model > 0 implies a live segment");
        self.segments[j].discrete_length += total_h - assigned;
        Ok(())
    }

    /// Walks cumulative discrete lengths along the curve and pins each live
    /// segment's endpoint to the matching arclength position, moving the
    /// nearer grid point onto the exact position when the walk lands inside
    /// an element. Disappeared segments collapse onto their predecessor's
    /// endpoint. Afterwards every model length is reset to its discrete
    /// length.
    pub fn relocate_endpoints(&mut self, curve: &mut DiscreteCurve) -> Result<(), LedgerError> {
        let last = curve.last_index();
        let total_h = curve.total_length();
        let exact_eps = 1e-12 * total_h.max(1.0);
        let overrun_eps = 1e-9 * total_h.max(1.0);

        let last_live = self
            .segments
            .iter()
            .rposition(|s| !s.disappeared)
            .ok_or(LedgerError::AllDisappeared)?;

        let mut walk_idx = 0usize;
        let mut walk_cum = 0.0;
        let mut target_cum = 0.0;
        let mut prev_end = self.segments[0].start_index;

        for j in 0..self.segments.len() {
            if self.segments[j].disappeared {
                self.segments[j].start_index = prev_end;
                self.segments[j].end_index = prev_end;
                continue;
            }
            target_cum += self.segments[j].discrete_length;
            self.segments[j].start_index = prev_end;

            if j == last_live {
                // The trailing live segment always ends at the fixed endpoint.
                self.segments[j].end_index = last;
                prev_end = last;
                continue;
            }

            let end = loop {
                if walk_idx == last {
                    if target_cum - walk_cum > overrun_eps {
                        return Err(LedgerError::WalkOverrun {
                            excess: target_cum - walk_cum,
                        });
                    }
                    break last;
                }
                let elem = curve.points[walk_idx].distance(curve.points[walk_idx + 1]);
                let need = target_cum - walk_cum;
                if need > elem + exact_eps {
                    walk_cum += elem;
                    walk_idx += 1;
                    continue;
                }
                if (need - elem).abs() <= exact_eps {
                    // Lands exactly on the next grid point.
                    walk_idx += 1;
                    walk_cum = target_cum;
                    break walk_idx;
                }
                let t = (need / elem).clamp(0.0, 1.0);
                let xstar = curve.points[walk_idx].lerp(curve.points[walk_idx + 1], t);
                let near_is_left = need < elem - need;
                let left_ok = walk_idx != 0 && walk_idx != prev_end;
                let right_ok = walk_idx + 1 != last;
                let chosen = match (near_is_left, left_ok, right_ok) {
                    (true, true, _) => Some(walk_idx),
                    (true, false, true) => Some(walk_idx + 1),
                    (false, _, true) => Some(walk_idx + 1),
                    (false, true, false) => Some(walk_idx),
                    _ => None,
                };
                match chosen {
                    Some(p) if p == walk_idx => {
                        curve.points[walk_idx] = xstar;
                        walk_cum = target_cum;
                        break walk_idx;
                    }
                    Some(p) => {
                        curve.points[p] = xstar;
                        walk_idx += 1;
                        walk_cum = target_cum;
                        break walk_idx;
                    }
                    None => {
                        // Both candidates pinned; accept the left index.
                        walk_cum = target_cum;
                        break walk_idx;
                    }
                }
            };
            let end = end.max(prev_end);
            self.segments[j].end_index = end;
            prev_end = end;
        }

        for s in &mut self.segments {
            s.length = s.discrete_length;
        }
        Ok(())
    }

    /// Pairs every grid point with a partner on the original trajectory and
    /// projects the connecting vector on the discrete normal.
    ///
    /// Live segments distribute their grid-point count uniformly along the
    /// original segment; a maximal run of disappeared segments attracts its
    /// merged point to the run's center of mass (original midpoints weighted
    /// by original lengths).
    pub fn build_attracting_field(&self, curve: &DiscreteCurve) -> AttractingField {
        let n_pts = curve.points.len();
        let mut targets = curve.points.clone();

        for s in &self.segments {
            if s.disappeared {
                continue;
            }
            let count = s.end_index - s.start_index + 1;
            if count == 1 {
                targets[s.start_index] = s.original_midpoint();
                continue;
            }
            for t in 0..count {
                let frac = t as f64 / (count - 1) as f64;
                targets[s.start_index + t] = s.original_start.lerp(s.original_end, frac);
            }
        }

        // Disappeared runs override the merged point's target.
        let mut j = 0;
        while j < self.segments.len() {
            if !self.segments[j].disappeared {
                j += 1;
                continue;
            }
            let run_start = j;
            while j < self.segments.len() && self.segments[j].disappeared {
                j += 1;
            }
            let run = &self.segments[run_start..j];
            let total: f64 = run.iter().map(|s| s.original_length()).sum();
            let com = if total > 0.0 {
                run.iter()
                    .map(|s| s.original_midpoint() * s.original_length())
                    .fold(Vec2::ZERO, |a, b| a + b)
                    / total
            } else {
                run.iter()
                    .map(|s| s.original_midpoint())
                    .fold(Vec2::ZERO, |a, b| a + b)
                    / run.len() as f64
            };
            targets[run[0].end_index] = com;
        }

        let mut w = vec![0.0; n_pts];
        let h = curve.element_lengths();
        for i in 1..n_pts - 1 {
            let denom = h[i] + h[i + 1];
            if denom <= 0.0 {
                continue;
            }
            let normal = ((curve.points[i + 1] - curve.points[i - 1]) / denom).perp();
            w[i] = (targets[i] - curve.points[i]).dot(normal);
        }
        AttractingField { targets, w }
    }
}
