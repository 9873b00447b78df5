//! Random sub-trajectory extraction and mean-squared-displacement
//! statistics.
//!
//! Random parts of a track are found either from segments that disappeared
//! during smoothing or directly from self-intersecting parts of the
//! resampled original curve. The extracted sub-trajectories are analyzed
//! with three MSD estimators. The ensemble average (EAMSD) averages squared
//! displacements from each sub-trajectory's own first point; the time
//! average (TAMSD) slides a lag window over a single sub-trajectory; their
//! combination (EATAMSD) averages the time averages across the ensemble.
//! The log-log slope of MSD against lag time gives the exponent `alpha` and
//! the Hurst exponent `H = alpha / 2`: `H < 1/2` is subdiffusive, `1/2`
//! diffusive, `> 1/2` superdiffusive, `1` ballistic.

use crate::batch;
use crate::geom::Vec2;
use crate::intersect::detect_self_intersections;
use crate::ledger::SegmentLedger;
use crate::trajectory::{resample, Trajectory};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MsdError {
    #[error("sub-trajectory needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("point and time counts differ: {points} vs {times}")]
    LengthMismatch { points: usize, times: usize },
    #[error("no sub-trajectories supplied")]
    Empty,
    #[error("insufficient data: no lag passes the validity and ensemble filters")]
    InsufficientData,
    #[error("fewer than 2 positive MSD values; cannot fit a slope")]
    FitUnderdetermined,
}

/// Minimum number of recorded points a random sub-trajectory must keep.
pub const MIN_SUB_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionMethod {
    DisappearedSegments,
    SelfIntersections,
}

impl ExtractionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtractionMethod::DisappearedSegments => "disappeared",
            ExtractionMethod::SelfIntersections => "intersections",
        }
    }
}

/// A contiguous slice of a trajectory's recorded points classified as
/// random motion.
#[derive(Debug, Clone)]
pub struct RandomSubTrajectory {
    pub source_id: String,
    pub points: Vec<Vec2>,
    /// Absolute acquisition times in minutes.
    pub times: Vec<f64>,
    pub frame_interval: f64,
    pub method: ExtractionMethod,
    /// Index of the first recorded point within the source trajectory.
    pub start_point: usize,
}

impl RandomSubTrajectory {
    pub fn new(
        source_id: impl Into<String>,
        points: Vec<Vec2>,
        times: Vec<f64>,
        frame_interval: f64,
        method: ExtractionMethod,
        start_point: usize,
    ) -> Result<Self, MsdError> {
        if points.len() != times.len() {
            return Err(MsdError::LengthMismatch {
                points: points.len(),
                times: times.len(),
            });
        }
        if points.len() < MIN_SUB_POINTS {
            return Err(MsdError::TooFewPoints {
                min: MIN_SUB_POINTS,
                got: points.len(),
            });
        }
        Ok(RandomSubTrajectory {
            source_id: source_id.into(),
            points,
            times,
            frame_interval,
            method,
            start_point,
        })
    }

    /// Final lag index: observation span divided by the frame interval.
    pub fn final_lag(&self) -> usize {
        let span = self.times.last().unwrap() - self.times[0];
        (span / self.frame_interval).round() as usize
    }

    /// Positions slotted by lag index; slots without a sample stay `None`
    /// (merged duplicate points leave gaps in the recorded series).
    pub fn lag_positions(&self) -> Vec<Option<Vec2>> {
        let mut slots = vec![None; self.final_lag() + 1];
        for (p, t) in self.points.iter().zip(self.times.iter()) {
            let lag = ((t - self.times[0]) / self.frame_interval).round() as usize;
            slots[lag] = Some(*p);
        }
        slots
    }

    /// Largest lag for which the time average stays meaningful:
    /// `n <= (K + 1) / 4` in lag units, boundary included.
    pub fn max_valid_lag(&self) -> usize {
        (self.final_lag() + 1) / 4
    }
}

/// A mean-squared-displacement series with the sample count per abscissa
/// and an optional fitted log-log slope.
#[derive(Debug, Clone)]
pub struct MsdSeries {
    /// Time or lag time in minutes.
    pub abscissae: Vec<f64>,
    /// MSD in square micrometers.
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
    pub fit: Option<HurstFit>,
}

#[derive(Debug, Clone, Copy)]
pub struct HurstFit {
    /// Log-log slope of MSD against time.
    pub alpha: f64,
    /// Hurst exponent, `alpha / 2`.
    pub hurst: f64,
    /// Intercept of the fit in natural-log coordinates.
    pub intercept: f64,
}

/// Maximal runs of disappeared segments become sub-trajectories over the
/// recorded points they span, extended by one recorded point on each side
/// (clipped at the track ends). Runs yielding fewer than five points are
/// dropped.
pub fn extract_random_by_disappearance(
    ledger: &SegmentLedger,
    traj: &Trajectory,
) -> Vec<RandomSubTrajectory> {
    let mut out = Vec::new();
    let segs = ledger.segments();
    let last_point = traj.points.len() - 1;
    let mut j = 0;
    while j < segs.len() {
        if !segs[j].disappeared {
            j += 1;
            continue;
        }
        let run_start = j;
        while j < segs.len() && segs[j].disappeared {
            j += 1;
        }
        let run_end = j - 1; // inclusive segment index
        let first = run_start.saturating_sub(1);
        let last = (run_end + 2).min(last_point);
        let points = traj.points[first..=last].to_vec();
        let times = traj.times[first..=last].to_vec();
        if let Ok(sub) = RandomSubTrajectory::new(
            traj.id.clone(),
            points,
            times,
            traj.frame_interval,
            ExtractionMethod::DisappearedSegments,
            first,
        ) {
            out.push(sub);
        }
    }
    out
}

/// Maps each maximal self-intersection span of the resampled original curve
/// back to recorded segments. A span boundary sitting on a shared segment
/// endpoint resolves by the tie rules: the start takes the segment in the
/// direction of parametrization, the end the segment against it.
pub fn extract_random_by_self_intersection(
    traj: &Trajectory,
    hbar: f64,
) -> Vec<RandomSubTrajectory> {
    let (curve, ledger) = resample(traj, hbar);
    let spans = detect_self_intersections(&curve.points, hbar);

    let mut out = Vec::new();
    for span in spans {
        let Some((first_segment, last_segment)) = span_to_segment_range(&span, &ledger) else {
            continue;
        };
        let first = first_segment;
        let last = last_segment + 1; // recorded point index
        let points = traj.points[first..=last].to_vec();
        let times = traj.times[first..=last].to_vec();
        if let Ok(sub) = RandomSubTrajectory::new(
            traj.id.clone(),
            points,
            times,
            traj.frame_interval,
            ExtractionMethod::SelfIntersections,
            first,
        ) {
            out.push(sub);
        }
    }
    out
}

/// Resolves a grid-index span to the inclusive range of original segments
/// it covers. A boundary on a shared segment endpoint takes the later
/// segment at the start and the earlier segment at the end; this can empty
/// the range, in which case `None` is returned.
pub fn span_to_segment_range(
    span: &crate::intersect::IntersectionSpan,
    ledger: &SegmentLedger,
) -> Option<(usize, usize)> {
    let segs = ledger.segments();
    let locate = |grid: usize| -> (usize, bool) {
        // First segment whose end index reaches the grid point; shared means
        // the point is also the next segment's start.
        let j = segs
            .iter()
            .position(|s| grid <= s.end_index)
            .unwrap_or(segs.len() - 1);
        let shared = grid == segs[j].end_index && j + 1 < segs.len();
        (j, shared)
    };
    let (j_start, start_shared) = locate(span.i1);
    let first_segment = if start_shared { j_start + 1 } else { j_start };
    let (j_end, _) = locate(span.i2);
    (first_segment <= j_end).then_some((first_segment, j_end))
}

/// Ensemble-averaged MSD: squared displacement from each sub-trajectory's
/// own first point, averaged over the sub-trajectories observed at each
/// elapsed time.
pub fn eamsd(subs: &[RandomSubTrajectory]) -> Result<MsdSeries, MsdError> {
    if subs.is_empty() {
        return Err(MsdError::Empty);
    }
    let dt = subs[0].frame_interval;
    let slot_sets: Vec<Vec<Option<Vec2>>> = subs.iter().map(|s| s.lag_positions()).collect();
    let max_lag = slot_sets.iter().map(|s| s.len() - 1).max().unwrap();

    let mut abscissae = Vec::new();
    let mut values = Vec::new();
    let mut counts = Vec::new();
    for lag in 1..=max_lag {
        let mut sum = 0.0;
        let mut count = 0usize;
        for slots in &slot_sets {
            let origin = slots[0];
            let at_lag = slots.get(lag).copied().flatten();
            if let (Some(origin), Some(p)) = (origin, at_lag) {
                sum += (p - origin).norm_squared();
                count += 1;
            }
        }
        if count > 0 {
            abscissae.push(lag as f64 * dt);
            values.push(sum / count as f64);
            counts.push(count);
        }
    }
    Ok(MsdSeries {
        abscissae,
        values,
        counts,
        fit: None,
    })
}

/// Time-averaged MSD of one sub-trajectory at lag `n`. Returns `None` when
/// the lag violates the validity bound or no displacement pair exists.
pub fn tamsd(sub: &RandomSubTrajectory, lag: usize) -> Option<f64> {
    if lag == 0 || lag > sub.max_valid_lag() {
        return None;
    }
    let slots = sub.lag_positions();
    tamsd_from_slots(&slots, lag)
}

fn tamsd_from_slots(slots: &[Option<Vec2>], lag: usize) -> Option<f64> {
    if lag >= slots.len() {
        return None;
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in 0..slots.len() - lag {
        if let (Some(a), Some(b)) = (slots[j], slots[j + lag]) {
            sum += (b - a).norm_squared();
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Ensemble average of the time-averaged MSD. Lags are kept only when
/// valid for enough sub-trajectories: `N_n >= N / 4`, boundary included.
pub fn eatamsd(subs: &[RandomSubTrajectory]) -> Result<MsdSeries, MsdError> {
    if subs.is_empty() {
        return Err(MsdError::Empty);
    }
    let dt = subs[0].frame_interval;
    let total = subs.len();
    let max_lag = subs.iter().map(|s| s.max_valid_lag()).max().unwrap();
    if max_lag == 0 {
        return Err(MsdError::InsufficientData);
    }

    // Per-sub rows are computed independently; the reduction below runs in
    // a fixed order so sums are reproducible.
    let rows: Vec<Vec<Option<f64>>> = batch::map(subs, |sub| {
        let slots = sub.lag_positions();
        let valid = sub.max_valid_lag();
        (1..=max_lag)
            .map(|lag| {
                if lag > valid {
                    None
                } else {
                    tamsd_from_slots(&slots, lag)
                }
            })
            .collect()
    });

    let mut abscissae = Vec::new();
    let mut values = Vec::new();
    let mut counts = Vec::new();
    for lag in 1..=max_lag {
        let mut sum = 0.0;
        let mut count = 0usize;
        for row in &rows {
            if let Some(v) = row[lag - 1] {
                sum += v;
                count += 1;
            }
        }
        if count * 4 >= total && count > 0 {
            abscissae.push(lag as f64 * dt);
            values.push(sum / count as f64);
            counts.push(count);
        }
    }
    if abscissae.is_empty() {
        return Err(MsdError::InsufficientData);
    }
    Ok(MsdSeries {
        abscissae,
        values,
        counts,
        fit: None,
    })
}

/// Ordinary least squares of `ln MSD` against `ln t`; the slope is `alpha`
/// and the Hurst exponent is half of it. Non-positive values are dropped.
pub fn fit_hurst(series: &MsdSeries) -> Result<HurstFit, MsdError> {
    let pairs: Vec<(f64, f64)> = series
        .abscissae
        .iter()
        .zip(series.values.iter())
        .filter(|&(&t, &v)| t > 0.0 && v > 0.0)
        .map(|(&t, &v)| (t.ln(), v.ln()))
        .collect();
    if pairs.len() < 2 {
        return Err(MsdError::FitUnderdetermined);
    }
    let n = pairs.len() as f64;
    let sum_x: f64 = pairs.iter().map(|p| p.0).sum();
    let sum_y: f64 = pairs.iter().map(|p| p.1).sum();
    let sum_xx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sum_xy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sum_xx - sum_x * sum_x;
    if denom.abs() < 1e-300 {
        return Err(MsdError::FitUnderdetermined);
    }
    let alpha = (n * sum_xy - sum_x * sum_y) / denom;
    let intercept = (sum_y - alpha * sum_x) / n;
    Ok(HurstFit {
        alpha,
        hurst: alpha / 2.0,
        intercept,
    })
}

/// Convenience: series with its Hurst fit attached.
pub fn with_fit(mut series: MsdSeries) -> Result<MsdSeries, MsdError> {
    series.fit = Some(fit_hurst(&series)?);
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sub_from_points(points: Vec<Vec2>, dt: f64) -> RandomSubTrajectory {
        let times: Vec<f64> = (0..points.len()).map(|i| i as f64 * dt).collect();
        RandomSubTrajectory::new("s", points, times, dt, ExtractionMethod::DisappearedSegments, 0)
            .unwrap()
    }

    fn ballistic(v: Vec2, n: usize, dt: f64) -> RandomSubTrajectory {
        sub_from_points((0..n).map(|i| v * (i as f64 * dt)).collect(), dt)
    }

    #[test]
    fn eamsd_stationary_walker_is_zero() {
        let sub = sub_from_points(vec![Vec2::new(3.0, 4.0); 8], 2.5);
        // A stationary recorded walker would merge to one point upstream;
        // here we feed the estimator directly.
        let series = eamsd(&[sub]).unwrap();
        assert!(series.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn eamsd_ballistic_walker_grows_quadratically() {
        let v = Vec2::new(1.5, -0.5);
        let dt = 2.5;
        let series = eamsd(&[ballistic(v, 12, dt)]).unwrap();
        for (t, rho) in series.abscissae.iter().zip(series.values.iter()) {
            assert_relative_eq!(*rho, v.norm_squared() * t * t, max_relative = 1e-12);
        }
    }

    #[test]
    fn eamsd_averages_over_walkers() {
        // Displacements 1 and 3 at the first frame: mean of 1 and 9 is 5.
        let dt = 2.5;
        let a = sub_from_points(
            (0..5).map(|i| Vec2::new(i as f64, 0.0)).collect(),
            dt,
        );
        let b = sub_from_points(
            (0..5).map(|i| Vec2::new(3.0 * i as f64, 0.0)).collect(),
            dt,
        );
        let series = eamsd(&[a, b]).unwrap();
        assert_relative_eq!(series.values[0], 5.0);
        assert_eq!(series.counts[0], 2);
    }

    #[test]
    fn tamsd_ballistic_exact() {
        let v = Vec2::new(0.8, 0.6);
        let dt = 2.5;
        let sub = ballistic(v, 41, dt);
        for lag in 1..=sub.max_valid_lag() {
            let t = lag as f64 * dt;
            assert_relative_eq!(
                tamsd(&sub, lag).unwrap(),
                v.norm_squared() * t * t,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn tamsd_five_point_walker_lag_one() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(-1.0, 2.0),
            Vec2::new(-1.0, 1.0),
        ];
        let steps: f64 = [1.0, 4.0, 4.0, 1.0].iter().sum();
        let sub = sub_from_points(pts, 1.0);
        assert_relative_eq!(tamsd(&sub, 1).unwrap(), steps / 4.0);
    }

    #[test]
    fn tamsd_lag_validity_boundary() {
        // 20 points -> K = 19 -> (K+1)/4 = 5: lag 5 valid, lag 6 not.
        let sub = ballistic(Vec2::new(1.0, 0.0), 20, 1.0);
        assert_eq!(sub.max_valid_lag(), 5);
        assert!(tamsd(&sub, 5).is_some());
        assert!(tamsd(&sub, 6).is_none());
    }

    #[test]
    fn eatamsd_equals_tamsd_for_single_trajectory() {
        let pts: Vec<Vec2> = (0..24)
            .map(|i| {
                let t = i as f64;
                Vec2::new(t + (t * 0.9).sin(), (t * 0.4).cos() * 2.0)
            })
            .collect();
        let sub = sub_from_points(pts, 2.5);
        let series = eatamsd(std::slice::from_ref(&sub)).unwrap();
        for (i, t) in series.abscissae.iter().enumerate() {
            let lag = (t / 2.5).round() as usize;
            assert_relative_eq!(series.values[i], tamsd(&sub, lag).unwrap());
            assert_eq!(series.counts[i], 1);
        }
    }

    #[test]
    fn eatamsd_identical_subs_match_each_tamsd() {
        let sub = ballistic(Vec2::new(1.0, 1.0), 30, 2.5);
        let subs = vec![sub.clone(), sub.clone(), sub.clone()];
        let series = eatamsd(&subs).unwrap();
        for (i, t) in series.abscissae.iter().enumerate() {
            let lag = (t / 2.5).round() as usize;
            assert_relative_eq!(series.values[i], tamsd(&sub, lag).unwrap());
        }
    }

    #[test]
    fn eatamsd_ensemble_filter_boundary() {
        // 8 sub-trajectories: a lag valid for only 1 of them is excluded
        // (1 < 8/4); a lag valid for exactly 2 stays (2 >= 2).
        let dt = 1.0;
        let mut subs: Vec<RandomSubTrajectory> = (0..6)
            .map(|_| ballistic(Vec2::new(1.0, 0.0), 8, dt))
            .collect();
        // K = 7 -> max lag 2 for the short ones.
        subs.push(ballistic(Vec2::new(1.0, 0.0), 20, dt)); // max lag 5
        subs.push(ballistic(Vec2::new(1.0, 0.0), 16, dt)); // max lag 4
        let series = eatamsd(&subs).unwrap();
        let lags: Vec<usize> = series
            .abscissae
            .iter()
            .map(|t| (t / dt).round() as usize)
            .collect();
        assert!(lags.contains(&4), "lag 4 valid for exactly 2 subs: {lags:?}");
        assert!(!lags.contains(&5), "lag 5 valid for only 1 sub: {lags:?}");
    }

    #[test]
    fn estimators_reject_empty_input() {
        assert!(matches!(eamsd(&[]), Err(MsdError::Empty)));
        assert!(matches!(eatamsd(&[]), Err(MsdError::Empty)));
    }

    #[test]
    fn shortest_sub_still_has_one_valid_lag() {
        // Five points -> K = 4 -> (K + 1) / 4 = 1: the minimum-size
        // sub-trajectory always admits exactly lag one.
        let sub = ballistic(Vec2::new(1.0, 0.0), 5, 1.0);
        assert_eq!(sub.max_valid_lag(), 1);
        let series = eatamsd(std::slice::from_ref(&sub)).unwrap();
        assert_eq!(series.abscissae.len(), 1);
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let dt = 2.5;
        let abscissae: Vec<f64> = (1..=10).map(|i| i as f64 * dt).collect();
        let values: Vec<f64> = abscissae.iter().map(|t| 0.7 * t.powf(1.7)).collect();
        let counts = vec![1; abscissae.len()];
        let series = MsdSeries {
            abscissae,
            values,
            counts,
            fit: None,
        };
        let fit = fit_hurst(&series).unwrap();
        assert_relative_eq!(fit.alpha, 1.7, epsilon = 1e-10);
        assert_relative_eq!(fit.hurst, 0.85, epsilon = 1e-10);
        assert_relative_eq!(fit.intercept, 0.7f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn fit_ballistic_slope_two() {
        let sub = ballistic(Vec2::new(2.0, 1.0), 60, 2.5);
        let series = eatamsd(std::slice::from_ref(&sub)).unwrap();
        let fit = fit_hurst(&series).unwrap();
        assert_relative_eq!(fit.alpha, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn msd_invariant_under_rigid_motion_and_scaling() {
        let pts: Vec<Vec2> = (0..30)
            .map(|i| {
                let t = i as f64;
                Vec2::new(t.sin() * 3.0 + 0.2 * t, (t * 0.7).cos())
            })
            .collect();
        let base = sub_from_points(pts.clone(), 2.5);
        let angle = 0.83f64;
        let (sa, ca) = angle.sin_cos();
        let shift = Vec2::new(41.0, -17.0);
        let moved = sub_from_points(
            pts.iter()
                .map(|p| Vec2::new(ca * p.x - sa * p.y, sa * p.x + ca * p.y) + shift)
                .collect(),
            2.5,
        );
        let scaled = sub_from_points(pts.iter().map(|&p| p * 3.0).collect(), 2.5);

        let s0 = eatamsd(std::slice::from_ref(&base)).unwrap();
        let s1 = eatamsd(std::slice::from_ref(&moved)).unwrap();
        let s2 = eatamsd(std::slice::from_ref(&scaled)).unwrap();
        for i in 0..s0.values.len() {
            assert_relative_eq!(s0.values[i], s1.values[i], max_relative = 1e-9);
            assert_relative_eq!(s2.values[i], 9.0 * s0.values[i], max_relative = 1e-12);
        }
        let f0 = fit_hurst(&s0).unwrap();
        let f2 = fit_hurst(&s2).unwrap();
        assert_relative_eq!(f0.alpha, f2.alpha, epsilon = 1e-9);
    }

    #[test]
    fn constructor_rejects_short_subs() {
        let pts: Vec<Vec2> = (0..4).map(|i| Vec2::new(i as f64, 0.0)).collect();
        let times: Vec<f64> = (0..4).map(|i| i as f64).collect();
        assert!(matches!(
            RandomSubTrajectory::new("x", pts, times, 1.0, ExtractionMethod::SelfIntersections, 0),
            Err(MsdError::TooFewPoints { .. })
        ));
    }

    fn straightish_track(n_points: usize) -> Trajectory {
        let pts: Vec<Vec2> = (0..n_points)
            .map(|i| Vec2::new(i as f64, (i as f64 * 0.3).sin() * 0.1))
            .collect();
        let times: Vec<f64> = (0..n_points).map(|i| i as f64 * 2.5).collect();
        Trajectory::new("track", pts, times, 2.5).unwrap()
    }

    fn mark_disappeared(ledger: &mut SegmentLedger, segs: &[usize]) {
        // Test hook: flip flags directly on a fresh resample ledger.
        let all = ledger.segments().to_vec();
        let mut states = all;
        for &j in segs {
            states[j].disappeared = true;
            states[j].length = 0.0;
        }
        *ledger = SegmentLedger::new(states);
    }

    #[test]
    fn disappearance_extraction_empty_without_disappearances() {
        let traj = straightish_track(21);
        let (_, ledger) = resample(&traj, 1.0);
        assert!(extract_random_by_disappearance(&ledger, &traj).is_empty());
    }

    #[test]
    fn disappearance_extraction_extends_one_point_each_side() {
        // Run of four disappeared segments spans five recorded points and
        // grows by one point on each side: seven points total.
        let traj = straightish_track(21);
        let (_, mut ledger) = resample(&traj, 1.0);
        mark_disappeared(&mut ledger, &[3, 4, 5, 6]);
        let subs = extract_random_by_disappearance(&ledger, &traj);
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].points.len(), 7);
        assert_eq!(subs[0].start_point, 2);
        assert_eq!(subs[0].points[0], traj.points[2]);
        assert_eq!(subs[0].points[6], traj.points[8]);
    }

    #[test]
    fn disappearance_extraction_drops_short_runs() {
        // A single disappeared segment yields only four points (< 5).
        let traj = straightish_track(21);
        let (_, mut ledger) = resample(&traj, 1.0);
        mark_disappeared(&mut ledger, &[9]);
        assert!(extract_random_by_disappearance(&ledger, &traj).is_empty());
    }

    #[test]
    fn disappearance_extraction_clips_at_track_ends() {
        let traj = straightish_track(10);
        let (_, mut ledger) = resample(&traj, 1.0);
        mark_disappeared(&mut ledger, &[0, 1, 2, 3]);
        let subs = extract_random_by_disappearance(&ledger, &traj);
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].start_point, 0);
        assert_eq!(subs[0].points.len(), 6); // points 0..=5
    }

    #[test]
    fn intersection_extraction_empty_on_simple_track() {
        let traj = straightish_track(30);
        assert!(extract_random_by_self_intersection(&traj, 1.0).is_empty());
    }

    #[test]
    fn span_mapping_interior_boundaries() {
        // Segments two units long resampled at 1.0: segment j covers grid
        // indices 2j..=2j+2, so grid 11 is interior to segment 5 and grid 23
        // interior to segment 11.
        let pts: Vec<Vec2> = (0..16).map(|i| Vec2::new(2.0 * i as f64, 0.0)).collect();
        let times: Vec<f64> = (0..16).map(|i| i as f64 * 2.5).collect();
        let traj = Trajectory::new("m", pts, times, 2.5).unwrap();
        let (_, ledger) = resample(&traj, 1.0);
        let span = crate::intersect::IntersectionSpan { i1: 11, i2: 23 };
        let (first, last) = span_to_segment_range(&span, &ledger).unwrap();
        assert_eq!((first, last), (5, 11));
    }

    #[test]
    fn span_mapping_shared_boundaries_shrink_range() {
        let pts: Vec<Vec2> = (0..16).map(|i| Vec2::new(2.0 * i as f64, 0.0)).collect();
        let times: Vec<f64> = (0..16).map(|i| i as f64 * 2.5).collect();
        let traj = Trajectory::new("m", pts, times, 2.5).unwrap();
        let (_, ledger) = resample(&traj, 1.0);
        // Grid 10 is the shared endpoint of segments 4 and 5; grid 24 is the
        // shared endpoint of segments 11 and 12.
        let span = crate::intersect::IntersectionSpan { i1: 10, i2: 24 };
        let (first, last) = span_to_segment_range(&span, &ledger).unwrap();
        assert_eq!((first, last), (5, 11));
    }
}
