//! Trajectory smoothing by Lagrangian curve evolution, separation of random
//! from directional cell motion, mean-squared-displacement statistics, and
//! reconstruction of a dense attractant vector field from sparse smoothed
//! velocities.
//!
//! The pipeline: raw tracks are resampled into discrete curves and evolved
//! by a semi-implicit scheme that combines curvature smoothing, attraction
//! to the original track, and tangential point redistribution; segments
//! that vanish during evolution (or self-intersecting parts of the raw
//! curve) mark random motion, which is quantified with MSD estimators and a
//! Hurst-exponent fit; velocities on the smoothed curves become sparse
//! Dirichlet data for three Laplace problems whose solutions recombine into
//! a dense vector field.

pub mod batch;
pub mod evolution;
pub mod field;
pub mod geom;
pub mod intersect;
pub mod io;
pub mod ledger;
pub mod msd;
pub mod synth;
pub mod testing;
pub mod trajectory;
pub mod velocity;

pub use evolution::{smooth_trajectory, EvolutionParams, SmoothResult};
pub use geom::Vec2;
pub use intersect::{detect_self_intersections, IntersectionSpan};
pub use ledger::SegmentLedger;
pub use msd::{eamsd, eatamsd, fit_hurst, tamsd, MsdSeries, RandomSubTrajectory};
pub use trajectory::{resample, DiscreteCurve, Trajectory};
pub use velocity::{compute_velocities, redistribute_time, VelocitySample};
