//! File formats: trajectory CSV ingestion, result CSV writers, PGM masks.
//!
//! Positions in input files are in pixels and converted to micrometers
//! exactly once at ingestion; all output files carry micrometer and minute
//! units. Floating-point values are written with Rust's shortest-roundtrip
//! formatting, so identical runs produce byte-identical files.

pub mod svg;

use crate::field::{DomainMask, FieldError, Reconstruction};
use crate::geom::Vec2;
use crate::ledger::SegmentLedger;
use crate::msd::{HurstFit, MsdSeries, RandomSubTrajectory};
use crate::trajectory::{DiscreteCurve, Trajectory, TrajectoryError};
use crate::velocity::VelocitySample;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("no trajectories")]
    NoTrajectories,
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Conversion applied at trajectory ingestion.
#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    /// Micrometers per pixel.
    pub scale: f64,
    /// Minutes per frame.
    pub frame_interval: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            scale: 0.319489,
            frame_interval: 2.5,
        }
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a `track_id,frame,x,y` CSV (positions in pixels) and groups it
/// into trajectories in order of first appearance; rows within a track are
/// sorted by frame.
pub fn read_trajectories_csv(path: &Path, opts: IngestOptions) -> Result<Vec<Trajectory>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize, IoError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(path, 1, format!("missing column `{name}`")))
    };
    let (c_id, c_frame, c_x, c_y) = (col("track_id")?, col("frame")?, col("x")?, col("y")?);

    let mut order: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, Vec<(i64, Vec2)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let field = |idx: usize| -> Result<&str, IoError> {
            record
                .get(idx)
                .ok_or_else(|| parse_err(path, line, "short row"))
        };
        let id = field(c_id)?.to_string();
        let frame: i64 = field(c_frame)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad frame: {e}")))?;
        let x: f64 = field(c_x)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad x: {e}")))?;
        let y: f64 = field(c_y)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad y: {e}")))?;
        if !rows.contains_key(&id) {
            order.push(id.clone());
        }
        rows.entry(id)
            .or_default()
            .push((frame, Vec2::new(x * opts.scale, y * opts.scale)));
    }
    if order.is_empty() {
        return Err(IoError::NoTrajectories);
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let mut points = rows.remove(&id).unwrap();
        points.sort_by_key(|&(frame, _)| frame);
        for pair in points.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(parse_err(
                    path,
                    0,
                    format!("track `{id}` has duplicate frame {}", pair[0].0),
                ));
            }
        }
        let times: Vec<f64> = points
            .iter()
            .map(|&(frame, _)| frame as f64 * opts.frame_interval)
            .collect();
        let pts: Vec<Vec2> = points.into_iter().map(|(_, p)| p).collect();
        out.push(Trajectory::new(id, pts, times, opts.frame_interval)?);
    }
    Ok(out)
}

/// `track_id,point_index,x,y,segment_id`: grid points of the smoothed
/// curves with the original segment owning each point.
pub fn write_smoothed_csv(
    path: &Path,
    results: &[(String, DiscreteCurve, SegmentLedger)],
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["track_id", "point_index", "x", "y", "segment_id"])?;
    for (id, curve, ledger) in results {
        for (i, p) in curve.points.iter().enumerate() {
            let seg = ledger.segment_of_grid_point(i);
            w.write_record([
                id.as_str(),
                &i.to_string(),
                &p.x.to_string(),
                &p.y.to_string(),
                &seg.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a smoothed-curve CSV back into per-track point lists (ordered by
/// point index).
pub fn read_smoothed_csv(path: &Path) -> Result<Vec<(String, Vec<Vec2>)>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut order = Vec::new();
    let mut per_track: BTreeMap<String, Vec<(usize, Vec2)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let get = |i: usize| -> Result<&str, IoError> {
            record.get(i).ok_or_else(|| parse_err(path, line, "short row"))
        };
        let id = get(0)?.to_string();
        let idx: usize = get(1)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad point_index: {e}")))?;
        let x: f64 = get(2)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad x: {e}")))?;
        let y: f64 = get(3)?
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad y: {e}")))?;
        if !per_track.contains_key(&id) {
            order.push(id.clone());
        }
        per_track
            .entry(id)
            .or_default()
            .push((idx, Vec2::new(x, y)));
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let mut pts = per_track.remove(&id).unwrap();
            pts.sort_by_key(|&(i, _)| i);
            (id, pts.into_iter().map(|(_, p)| p).collect())
        })
        .collect())
}

/// `track_id,segment_id,L,Ld,start_idx,end_idx,disappeared`: final ledger
/// state per original segment.
pub fn write_ledgers_csv(
    path: &Path,
    results: &[(String, DiscreteCurve, SegmentLedger)],
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "track_id",
        "segment_id",
        "L",
        "Ld",
        "start_idx",
        "end_idx",
        "disappeared",
    ])?;
    for (id, _, ledger) in results {
        for (j, s) in ledger.segments().iter().enumerate() {
            w.write_record([
                id.as_str(),
                &j.to_string(),
                &s.length.to_string(),
                &s.discrete_length.to_string(),
                &s.start_index.to_string(),
                &s.end_index.to_string(),
                &(s.disappeared as u8).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-segment ledger row as read back from a dump.
#[derive(Debug, Clone)]
pub struct LedgerRow {
    pub segment_id: usize,
    pub length: f64,
    pub discrete_length: f64,
    pub start_index: usize,
    pub end_index: usize,
    pub disappeared: bool,
}

pub fn read_ledgers_csv(path: &Path) -> Result<BTreeMap<String, Vec<LedgerRow>>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut out: BTreeMap<String, Vec<LedgerRow>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let get = |i: usize| -> Result<&str, IoError> {
            record.get(i).ok_or_else(|| parse_err(path, line, "short row"))
        };
        let p = |s: &str, what: &str| -> Result<f64, IoError> {
            s.parse()
                .map_err(|e| parse_err(path, line, format!("bad {what}: {e}")))
        };
        let row = LedgerRow {
            segment_id: p(get(1)?, "segment_id")? as usize,
            length: p(get(2)?, "L")?,
            discrete_length: p(get(3)?, "Ld")?,
            start_index: p(get(4)?, "start_idx")? as usize,
            end_index: p(get(5)?, "end_idx")? as usize,
            disappeared: get(6)? == "1",
        };
        out.entry(get(0)?.to_string()).or_default().push(row);
    }
    for rows in out.values_mut() {
        rows.sort_by_key(|r| r.segment_id);
    }
    Ok(out)
}

/// `track_id,step,i1,i2`: self-intersection spans per evolution step.
pub fn write_spans_csv(
    path: &Path,
    spans: &[(String, Vec<(usize, Vec<crate::intersect::IntersectionSpan>)>)],
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["track_id", "step", "i1", "i2"])?;
    for (id, per_step) in spans {
        for (step, list) in per_step {
            for s in list {
                w.write_record([
                    id.as_str(),
                    &step.to_string(),
                    &s.i1.to_string(),
                    &s.i2.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `source_id,method,point_index,frame,x,y`: recorded points of every
/// extracted random sub-trajectory.
pub fn write_random_parts_csv(path: &Path, subs: &[RandomSubTrajectory]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["source_id", "method", "point_index", "frame", "x", "y"])?;
    for sub in subs {
        for (i, (p, t)) in sub.points.iter().zip(sub.times.iter()).enumerate() {
            let frame = (t / sub.frame_interval).round() as i64;
            w.write_record([
                sub.source_id.as_str(),
                sub.method.as_str(),
                &i.to_string(),
                &frame.to_string(),
                &p.x.to_string(),
                &p.y.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `lag_minutes,msd_um2,count`.
pub fn write_msd_csv(path: &Path, series: &MsdSeries) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["lag_minutes", "msd_um2", "count"])?;
    for i in 0..series.abscissae.len() {
        w.write_record([
            series.abscissae[i].to_string(),
            series.values[i].to_string(),
            series.counts[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_msd_fit_txt(path: &Path, fit: &HurstFit) -> Result<(), IoError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "alpha = {}", fit.alpha)?;
    writeln!(f, "hurst = {}", fit.hurst)?;
    writeln!(f, "intercept = {}", fit.intercept)?;
    Ok(())
}

/// `track_id,x,y,vx,vy` in micrometers and micrometers per minute.
pub fn write_velocities_csv(
    path: &Path,
    samples: &[(String, Vec<VelocitySample>)],
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["track_id", "x", "y", "vx", "vy"])?;
    for (id, list) in samples {
        for s in list {
            w.write_record([
                id.as_str(),
                &s.position.x.to_string(),
                &s.position.y.to_string(),
                &s.velocity.x.to_string(),
                &s.velocity.y.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_velocities_csv(path: &Path) -> Result<Vec<VelocitySample>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let get = |i: usize| -> Result<f64, IoError> {
            record
                .get(i)
                .ok_or_else(|| parse_err(path, line, "short row"))?
                .parse()
                .map_err(|e| parse_err(path, line, format!("bad number: {e}")))
        };
        out.push(VelocitySample {
            position: Vec2::new(get(1)?, get(2)?),
            velocity: Vec2::new(get(3)?, get(4)?),
            segment: 0,
            grid_index: out.len(),
        });
    }
    Ok(out)
}

/// `i,j,x,y,vx,vy,speed`: the reconstructed field at every domain vertex.
pub fn write_field_csv(path: &Path, recon: &Reconstruction) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "x", "y", "vx", "vy", "speed"])?;
    let h = recon.field.cell_size;
    for j in 0..=recon.field.height {
        for i in 0..=recon.field.width {
            if let Some(v) = recon.field.vertex(i, j) {
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    (i as f64 * h).to_string(),
                    (j as f64 * h).to_string(),
                    v.x.to_string(),
                    v.y.to_string(),
                    v.norm().to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a plain-text PGM (P2) mask: 0 means outside, bright values inside,
/// one cell per pixel. The top image row becomes the top cell row, so cell
/// y grows upward. An optional integer downscale factor merges blocks by
/// majority (ties count as inside).
pub fn read_pgm_mask(path: &Path, cell_size: f64, downscale: usize) -> Result<DomainMask, IoError> {
    let text = fs::read_to_string(path)?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
        .map(str::to_string)
        .collect::<Vec<_>>()
        .into_iter();
    let magic = tokens.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic != "P2" {
        return Err(parse_err(path, 1, format!("expected P2 magic, got {magic}")));
    }
    let mut next_num = |what: &str| -> Result<usize, IoError> {
        tokens
            .next()
            .ok_or_else(|| parse_err(path, 0, format!("missing {what}")))?
            .parse()
            .map_err(|e| parse_err(path, 0, format!("bad {what}: {e}")))
    };
    let width = next_num("width")?;
    let height = next_num("height")?;
    let maxval = next_num("maxval")?;
    let mut inside = vec![false; width * height];
    for row in 0..height {
        for col in 0..width {
            let v = next_num("pixel")?;
            // flip vertically: image row 0 is the top
            let cy = height - 1 - row;
            inside[cy * width + col] = v * 2 > maxval;
        }
    }

    let factor = downscale.max(1);
    if factor > 1 {
        let dw = width / factor;
        let dh = height / factor;
        let mut coarse = vec![false; dw * dh];
        for cy in 0..dh {
            for cx in 0..dw {
                let mut inside_count = 0usize;
                for sy in 0..factor {
                    for sx in 0..factor {
                        if inside[(cy * factor + sy) * width + cx * factor + sx] {
                            inside_count += 1;
                        }
                    }
                }
                coarse[cy * dw + cx] = 2 * inside_count >= factor * factor;
            }
        }
        return Ok(DomainMask::new(dw, dh, cell_size * factor as f64, coarse)?);
    }
    Ok(DomainMask::new(width, height, cell_size, inside)?)
}

pub fn write_pgm_mask(path: &Path, mask: &DomainMask) -> Result<(), IoError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "P2")?;
    writeln!(f, "{} {}", mask.width(), mask.height())?;
    writeln!(f, "255")?;
    for row in 0..mask.height() {
        let cy = (mask.height() - 1 - row) as i64;
        let line: Vec<&str> = (0..mask.width())
            .map(|cx| if mask.inside(cx as i64, cy) { "255" } else { "0" })
            .collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}
