//! Command-line driver for the celltraj toolkit: smoothing, random-motion
//! analysis, velocity estimation, field reconstruction, the end-to-end
//! pipeline, and synthetic fixture generation.

use celltraj::evolution::{smooth_trajectory, EvolutionParams, SmoothResult};
use celltraj::field::{reconstruct, DomainMask, FieldError, SolveOptions};
use celltraj::io::{self, IngestOptions, IoError, LedgerRow};
use celltraj::ledger::{SegmentLedger, SegmentState};
use celltraj::msd::{
    eamsd, eatamsd, extract_random_by_disappearance, extract_random_by_self_intersection,
    fit_hurst, MsdError, RandomSubTrajectory,
};
use celltraj::trajectory::DiscreteCurve;
use celltraj::velocity::{compute_velocities, VelocityError};
use celltraj::{batch, synth, Trajectory, Vec2};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Exit codes: 2 input/parse failure, 3 insufficient data, 4 sample touches
/// the domain boundary, 5 solver non-convergence, 1 anything else.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Field(f) => field_error(f, e.to_string()),
            _ => CliError::new(2, e.to_string()),
        }
    }
}

impl From<MsdError> for CliError {
    fn from(e: MsdError) -> Self {
        CliError::new(3, format!("insufficient data: {e}"))
    }
}

impl From<VelocityError> for CliError {
    fn from(e: VelocityError) -> Self {
        CliError::new(3, e.to_string())
    }
}

fn field_error(e: &FieldError, message: String) -> CliError {
    let code = match e {
        FieldError::SampleTouchesBoundary(..) => 4,
        FieldError::NonConvergence { .. } => 5,
        FieldError::EmptyMask | FieldError::NoSamples | FieldError::NoDirichletData => 2,
    };
    CliError::new(code, message)
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        let msg = e.to_string();
        field_error(&e, msg)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "celltraj",
    version,
    about = "Cell-trajectory smoothing, random-motion MSD analysis and attractant-field reconstruction"
)]
pub struct Cli {
    /// Worker threads for trajectory-level parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smooth trajectories by curve evolution and write curves + ledgers.
    Smooth(SmoothArgs),
    /// Extract random sub-trajectories and compute MSD statistics.
    Analyze(AnalyzeArgs),
    /// Estimate velocities on smoothed curves.
    Velocities(VelocityArgs),
    /// Reconstruct the dense vector field from sparse velocities.
    Reconstruct(ReconstructArgs),
    /// Run smooth, analyze, velocities and reconstruct end to end.
    Pipeline(PipelineArgs),
    /// Generate the bundled synthetic dataset.
    GenFixtures(GenFixturesArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IngestArgs {
    /// Micrometers per pixel in the input CSV.
    #[arg(long, default_value_t = 0.319489)]
    pub scale: f64,
    /// Minutes between frames.
    #[arg(long, default_value_t = 2.5)]
    pub frame_interval: f64,
}

impl IngestArgs {
    fn options(&self) -> IngestOptions {
        IngestOptions {
            scale: self.scale,
            frame_interval: self.frame_interval,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct EvolveArgs {
    /// Target resample spacing in micrometers.
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Curvature weight outside self-intersections (and in the final phase).
    #[arg(long, default_value_t = 0.003)]
    pub delta_min: f64,
    /// Curvature weight inside self-intersecting parts (adaptive mode).
    #[arg(long, default_value_t = 0.01)]
    pub delta_max: f64,
    /// Attraction weight toward the original trajectory.
    #[arg(long, default_value_t = 20.0)]
    pub lambda_max: f64,
    /// Evolution time-step length.
    #[arg(long, default_value_t = 1e-6)]
    pub tau: f64,
    /// Speed of convergence to uniform point redistribution.
    #[arg(long, default_value_t = 50.0)]
    pub omega: f64,
    /// Steps to run after self-intersections disappear.
    #[arg(long, default_value_t = 50)]
    pub extra_steps: usize,
    /// Ramp the weights around detected self-intersections instead of
    /// using constants everywhere.
    #[arg(long, default_value_t = false)]
    pub adaptive: bool,
    /// Evolution step cap per trajectory.
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    /// Also write per-step self-intersection spans (spans.csv).
    #[arg(long, default_value_t = false)]
    pub debug_spans: bool,
}

impl EvolveArgs {
    fn params(&self) -> Result<EvolutionParams, CliError> {
        let params = EvolutionParams {
            delta_min: self.delta_min,
            delta_max: self.delta_max,
            lambda_max: self.lambda_max,
            tau: self.tau,
            omega: self.omega,
            extra_steps: self.extra_steps,
            adaptive: self.adaptive,
            max_steps: self.max_steps,
            record_spans: self.debug_spans,
        };
        params.validate().map_err(|m| CliError::new(2, m))?;
        Ok(params)
    }
}

#[derive(Args, Debug)]
pub struct SmoothArgs {
    /// Input CSV with header track_id,frame,x,y (positions in pixels).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    #[command(flatten)]
    pub evolve: EvolveArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Segments that disappeared during smoothing (needs a ledger dump).
    Disappeared,
    /// Self-intersecting parts of the raw resampled curve.
    Intersections,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Disappeared)]
    pub method: Method,
    /// Ledger dump written by `smooth` (required for the disappeared method).
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Resample spacing for the intersections method.
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

#[derive(Args, Debug)]
pub struct VelocityArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Ledger dump written by `smooth`.
    #[arg(long)]
    pub ledger: PathBuf,
    /// Smoothed curves written by `smooth`.
    #[arg(long)]
    pub smoothed: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// velocities.csv written by `velocities`.
    #[arg(long)]
    pub velocities: PathBuf,
    /// Plain-text PGM mask, 0 = outside, 255 = inside.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Micrometers per mask pixel.
    #[arg(long, default_value_t = 1.0)]
    pub cell_size: f64,
    /// Merge mask pixels by this integer factor before solving.
    #[arg(long, default_value_t = 1)]
    pub downscale: usize,
    /// Relative residual target of the relaxation solver.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Sweep cap of the relaxation solver.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_sweeps: usize,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Disappeared)]
    pub method: Method,
    #[command(flatten)]
    pub ingest: IngestArgs,
    #[command(flatten)]
    pub evolve: EvolveArgs,
    #[arg(long, default_value_t = 1.0)]
    pub cell_size: f64,
    #[arg(long, default_value_t = 1)]
    pub downscale: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_sweeps: usize,
}

#[derive(Args, Debug)]
pub struct GenFixturesArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.5)]
    pub frame_interval: f64,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if let Err(msg) = batch::configure_threads(n) {
            eprintln!("warning: --threads ignored: {msg}");
        }
    }
    match cli.command {
        Command::Smooth(args) => cmd_smooth(&args).map(|_| ()),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Velocities(args) => cmd_velocities(&args).map(|_| ()),
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Pipeline(args) => cmd_pipeline(&args),
        Command::GenFixtures(args) => cmd_gen_fixtures(&args),
    }
}

/// Smoothing outcome for one track, as shared between subcommands.
pub struct TrackResult {
    pub id: String,
    pub result: SmoothResult,
    pub wall_ms: f64,
}

fn smooth_all(
    tracks: &[Trajectory],
    hbar: f64,
    params: &EvolutionParams,
) -> Result<Vec<TrackResult>, CliError> {
    let outcomes = batch::map(tracks, |traj| {
        let start = Instant::now();
        let result = smooth_trajectory(traj, hbar, params);
        (traj.id.clone(), result, start.elapsed().as_secs_f64() * 1e3)
    });
    let mut out = Vec::with_capacity(outcomes.len());
    for (id, result, wall_ms) in outcomes {
        let result =
            result.map_err(|e| CliError::new(1, format!("track `{id}`: {e}")))?;
        out.push(TrackResult {
            id,
            result,
            wall_ms,
        });
    }
    Ok(out)
}

fn write_smooth_outputs(
    out_dir: &Path,
    results: &[TrackResult],
    debug_spans: bool,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::new(2, e.to_string()))?;
    let rows: Vec<(String, DiscreteCurve, SegmentLedger)> = results
        .iter()
        .map(|r| {
            (
                r.id.clone(),
                r.result.curve.clone(),
                r.result.ledger.clone(),
            )
        })
        .collect();
    io::write_smoothed_csv(&out_dir.join("smoothed.csv"), &rows)?;
    io::write_ledgers_csv(&out_dir.join("ledgers.csv"), &rows)?;

    let mut meta = String::from("{\n  \"tracks\": [\n");
    for (i, r) in results.iter().enumerate() {
        let dead = r
            .result
            .ledger
            .segments()
            .iter()
            .filter(|s| s.disappeared)
            .count();
        let _ = write!(
            meta,
            "    {{\"id\": {}, \"steps\": {}, \"converged\": {}, \"wall_ms\": {:.3}, \"grid_points\": {}, \"segments\": {}, \"disappeared\": {}}}{}\n",
            serde_json::to_string(&r.id).unwrap(),
            r.result.steps,
            r.result.converged,
            r.wall_ms,
            r.result.curve.points.len(),
            r.result.ledger.len(),
            dead,
            if i + 1 < results.len() { "," } else { "" }
        );
    }
    meta.push_str("  ]\n}\n");
    std::fs::write(out_dir.join("run.json"), meta).map_err(|e| CliError::new(1, e.to_string()))?;

    if debug_spans {
        let spans: Vec<_> = results
            .iter()
            .map(|r| (r.id.clone(), r.result.spans_per_step.clone()))
            .collect();
        io::write_spans_csv(&out_dir.join("spans.csv"), &spans)?;
    }
    Ok(())
}

fn cmd_smooth(args: &SmoothArgs) -> Result<Vec<TrackResult>, CliError> {
    let tracks = io::read_trajectories_csv(&args.input, args.ingest.options())?;
    let params = args.evolve.params()?;
    let results = smooth_all(&tracks, args.evolve.hbar, &params)?;
    write_smooth_outputs(&args.out_dir, &results, args.evolve.debug_spans)?;
    for r in &results {
        if !r.result.converged {
            eprintln!(
                "warning: track `{}` hit the step cap ({} steps)",
                r.id, r.result.steps
            );
        }
    }
    println!(
        "smoothed {} tracks -> {}",
        results.len(),
        args.out_dir.display()
    );
    Ok(results)
}

/// Rebuilds a ledger from its CSV dump plus the source trajectory.
fn ledger_from_rows(traj: &Trajectory, rows: &[LedgerRow]) -> Result<SegmentLedger, CliError> {
    if rows.len() != traj.segment_count() {
        return Err(CliError::new(
            2,
            format!(
                "track `{}`: ledger has {} segments, trajectory has {}",
                traj.id,
                rows.len(),
                traj.segment_count()
            ),
        ));
    }
    let segments = rows
        .iter()
        .enumerate()
        .map(|(j, r)| SegmentState {
            length: r.length,
            discrete_length: r.discrete_length,
            start_index: r.start_index,
            end_index: r.end_index,
            duration: traj.segment_duration(j),
            disappeared: r.disappeared,
            original_start: traj.points[j],
            original_end: traj.points[j + 1],
        })
        .collect();
    Ok(SegmentLedger::new(segments))
}

fn collect_subs(
    tracks: &[Trajectory],
    method: Method,
    ledger_path: Option<&Path>,
    hbar: f64,
) -> Result<Vec<RandomSubTrajectory>, CliError> {
    match method {
        Method::Disappeared => {
            let path = ledger_path.ok_or_else(|| {
                CliError::new(2, "--ledger is required for the disappeared method")
            })?;
            let dumps = io::read_ledgers_csv(path)?;
            let mut subs = Vec::new();
            for traj in tracks {
                let Some(rows) = dumps.get(&traj.id) else {
                    return Err(CliError::new(
                        2,
                        format!("ledger dump has no track `{}`", traj.id),
                    ));
                };
                let ledger = ledger_from_rows(traj, rows)?;
                subs.extend(extract_random_by_disappearance(&ledger, traj));
            }
            Ok(subs)
        }
        Method::Intersections => {
            let per_track = batch::map(tracks, |traj| extract_random_by_self_intersection(traj, hbar));
            Ok(per_track.into_iter().flatten().collect())
        }
    }
}

fn write_analysis_outputs(
    out_dir: &Path,
    subs: &[RandomSubTrajectory],
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::new(2, e.to_string()))?;
    if subs.is_empty() {
        return Err(CliError::new(3, "insufficient data: no random sub-trajectories"));
    }
    io::write_random_parts_csv(&out_dir.join("random_parts.csv"), subs)?;

    let mut series = eatamsd(subs)?;
    let fit = fit_hurst(&series)?;
    series.fit = Some(fit);
    io::write_msd_csv(&out_dir.join("msd.csv"), &series)?;
    io::write_msd_fit_txt(&out_dir.join("msd_fit.txt"), &fit)?;
    std::fs::write(
        out_dir.join("msd_loglog.svg"),
        io::svg::msd_loglog(&series, Some(&fit)),
    )
    .map_err(|e| CliError::new(1, e.to_string()))?;

    let ensemble = eamsd(subs)?;
    io::write_msd_csv(&out_dir.join("eamsd.csv"), &ensemble)?;

    println!(
        "{} random parts; alpha = {:.5}, H = {:.5}",
        subs.len(),
        fit.alpha,
        fit.hurst
    );
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let tracks = io::read_trajectories_csv(&args.input, args.ingest.options())?;
    let subs = collect_subs(&tracks, args.method, args.ledger.as_deref(), args.hbar)?;
    write_analysis_outputs(&args.out_dir, &subs)
}

fn cmd_velocities(args: &VelocityArgs) -> Result<Vec<(String, Vec<celltraj::VelocitySample>)>, CliError> {
    let tracks = io::read_trajectories_csv(&args.input, args.ingest.options())?;
    let dumps = io::read_ledgers_csv(&args.ledger)?;
    let curves = io::read_smoothed_csv(&args.smoothed)?;
    let mut per_track = Vec::new();
    for traj in &tracks {
        let Some(rows) = dumps.get(&traj.id) else {
            return Err(CliError::new(2, format!("ledger dump has no track `{}`", traj.id)));
        };
        let Some((_, points)) = curves.iter().find(|(id, _)| *id == traj.id) else {
            return Err(CliError::new(2, format!("smoothed CSV has no track `{}`", traj.id)));
        };
        let ledger = ledger_from_rows(traj, rows)?;
        let curve = DiscreteCurve {
            points: points.clone(),
            hbar: 1.0,
        };
        match compute_velocities(&curve, &ledger) {
            Ok(samples) => per_track.push((traj.id.clone(), samples)),
            Err(VelocityError::NoLiveSegments) => {
                eprintln!("warning: track `{}` is fully random; no velocities", traj.id);
            }
        }
    }
    if per_track.is_empty() {
        return Err(CliError::new(3, "insufficient data: no live segments in any track"));
    }
    io::write_velocities_csv(&args.out, &per_track)?;
    println!(
        "velocities for {} tracks -> {}",
        per_track.len(),
        args.out.display()
    );
    Ok(per_track)
}

fn reconstruct_and_write(
    out_dir: &Path,
    samples: &[celltraj::VelocitySample],
    mask: &DomainMask,
    tol: f64,
    max_sweeps: usize,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::new(2, e.to_string()))?;
    let options = SolveOptions {
        tol,
        max_sweeps,
        ..SolveOptions::default()
    };
    let recon = reconstruct(samples, mask, &options)?;
    if recon.skipped_samples > 0 {
        eprintln!(
            "warning: {} samples outside the domain were skipped",
            recon.skipped_samples
        );
    }
    if mask.discarded_cells > 0 {
        eprintln!(
            "warning: mask had {} cells outside the largest component",
            mask.discarded_cells
        );
    }
    io::write_field_csv(&out_dir.join("field.csv"), &recon)?;
    let writes = [
        ("quiver.svg", io::svg::quiver(&recon.field, 64)),
        ("heatmap_vx.svg", io::svg::heatmap(&recon.vx, "vx [um/min]")),
        ("heatmap_vy.svg", io::svg::heatmap(&recon.vy, "vy [um/min]")),
        (
            "heatmap_speed.svg",
            io::svg::heatmap(&recon.speed, "speed [um/min]"),
        ),
    ];
    for (name, content) in writes {
        std::fs::write(out_dir.join(name), content)
            .map_err(|e| CliError::new(1, e.to_string()))?;
    }
    println!(
        "reconstruction: residuals vx {:.3e} vy {:.3e} speed {:.3e} ({} repaired squares)",
        recon.vx.residual, recon.vy.residual, recon.speed.residual, recon.repaired_squares
    );
    Ok(())
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    let samples = io::read_velocities_csv(&args.velocities)?;
    let mask = io::read_pgm_mask(&args.mask, args.cell_size, args.downscale)?;
    reconstruct_and_write(&args.out_dir, &samples, &mask, args.tol, args.max_sweeps)
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<(), CliError> {
    if !args.mask.exists() {
        return Err(CliError::new(2, format!("mask not found: {}", args.mask.display())));
    }
    let tracks = io::read_trajectories_csv(&args.input, args.ingest.options())?;
    let params = args.evolve.params()?;
    let results = smooth_all(&tracks, args.evolve.hbar, &params)?;
    write_smooth_outputs(&args.out_dir, &results, args.evolve.debug_spans)?;

    // Random parts straight from the in-memory ledgers.
    let subs: Vec<RandomSubTrajectory> = match args.method {
        Method::Disappeared => tracks
            .iter()
            .zip(results.iter())
            .flat_map(|(traj, r)| extract_random_by_disappearance(&r.result.ledger, traj))
            .collect(),
        Method::Intersections => batch::map(&tracks, |traj| {
            extract_random_by_self_intersection(traj, args.evolve.hbar)
        })
        .into_iter()
        .flatten()
        .collect(),
    };
    write_analysis_outputs(&args.out_dir, &subs)?;

    let mut per_track = Vec::new();
    for (traj, r) in tracks.iter().zip(results.iter()) {
        match compute_velocities(&r.result.curve, &r.result.ledger) {
            Ok(samples) => per_track.push((traj.id.clone(), samples)),
            Err(VelocityError::NoLiveSegments) => {
                eprintln!("warning: track `{}` is fully random; no velocities", traj.id);
            }
        }
    }
    if per_track.is_empty() {
        return Err(CliError::new(3, "insufficient data: no live segments in any track"));
    }
    io::write_velocities_csv(&args.out_dir.join("velocities.csv"), &per_track)?;

    let samples: Vec<celltraj::VelocitySample> = per_track
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .collect();
    let mask = io::read_pgm_mask(&args.mask, args.cell_size, args.downscale)?;
    reconstruct_and_write(&args.out_dir, &samples, &mask, args.tol, args.max_sweeps)
}

fn cmd_gen_fixtures(args: &GenFixturesArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::new(2, e.to_string()))?;
    let mut tracks = synth::demo_tracks(args.seed, args.frame_interval);

    // Shift everything into the positive quadrant with a margin so Dirichlet
    // squares cannot touch the mask boundary.
    let margin = 6.0;
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in &tracks {
        for p in &t.points {
            min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
            max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
        }
    }
    let shift = Vec2::new(margin - min.x, margin - min.y);
    for t in &mut tracks {
        for p in &mut t.points {
            *p += shift;
        }
    }

    // tracks.csv stores pixel positions; with --scale 1 they equal
    // micrometers.
    let mut csv = String::from("track_id,frame,x,y\n");
    for t in &tracks {
        for (i, p) in t.points.iter().enumerate() {
            let frame = (t.times[i] / t.frame_interval).round() as i64;
            let _ = writeln!(csv, "{},{},{},{}", t.id, frame, p.x, p.y);
        }
    }
    std::fs::write(args.out_dir.join("tracks.csv"), csv)
        .map_err(|e| CliError::new(1, e.to_string()))?;

    let width = (max.x - min.x + 2.0 * margin).ceil() as usize;
    let height = (max.y - min.y + 2.0 * margin).ceil() as usize;
    let mut inside = vec![false; width * height];
    for cy in 1..height - 1 {
        for cx in 1..width - 1 {
            inside[cy * width + cx] = true;
        }
    }
    let mask = DomainMask::new(width, height, 1.0, inside)?;
    io::write_pgm_mask(&args.out_dir.join("mask.pgm"), &mask)?;

    println!(
        "fixtures: {} tracks, {}x{} mask -> {}",
        tracks.len(),
        width,
        height,
        args.out_dir.display()
    );
    Ok(())
}
