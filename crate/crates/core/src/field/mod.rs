//! Dense vector-field reconstruction from sparse velocity samples.
//!
//! The pixel-grid domain comes from a mask; cells holding velocity samples
//! become internal Dirichlet squares. Minimizing the Dirichlet energy of
//! each unknown scalar (the two velocity components and the speed) under
//! those constraints amounts to solving the Laplace equation with Dirichlet
//! values on the square boundaries and zero Neumann conditions on the outer
//! domain boundary. The three harmonic solutions recombine into one field:
//! the component pair fixes the direction, the speed solution restores the
//! vector length that plain component averaging would shrink.

mod solver;

pub use solver::{solve_laplace, ScalarField, SolveOptions};

use crate::batch;
use crate::geom::Vec2;
use crate::velocity::VelocitySample;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("mask has no inside cells")]
    EmptyMask,
    #[error("no velocity sample falls inside the domain")]
    NoSamples,
    #[error("Dirichlet square ({0}, {1}) touches the domain boundary")]
    SampleTouchesBoundary(usize, usize),
    #[error("solver did not converge: residual {residual} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },
    #[error("no Dirichlet data; the problem is singular")]
    NoDirichletData,
}

/// Pixel-grid domain: `width x height` cells of size `cell_size`
/// micrometers, each inside or outside the reconstruction region. Cell
/// `(cx, cy)` covers `[cx h, (cx+1) h) x [cy h, (cy+1) h)` with the origin
/// at the lower-left corner.
#[derive(Debug, Clone)]
pub struct DomainMask {
    width: usize,
    height: usize,
    cell_size: f64,
    inside: Vec<bool>,
    /// Cells discarded because they were not part of the largest
    /// 4-connected component.
    pub discarded_cells: usize,
}

impl DomainMask {
    /// Builds a mask and keeps only the largest 4-connected inside
    /// component so the outer boundary is a single closed curve.
    pub fn new(
        width: usize,
        height: usize,
        cell_size: f64,
        inside: Vec<bool>,
    ) -> Result<Self, FieldError> {
        assert_eq!(inside.len(), width * height);
        assert!(cell_size > 0.0);
        let mut mask = DomainMask {
            width,
            height,
            cell_size,
            inside,
            discarded_cells: 0,
        };
        mask.discarded_cells = mask.keep_largest_component()?;
        Ok(mask)
    }

    pub fn filled(width: usize, height: usize, cell_size: f64) -> Self {
        DomainMask::new(width, height, cell_size, vec![true; width * height]).unwrap()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn inside(&self, cx: i64, cy: i64) -> bool {
        if cx < 0 || cy < 0 || cx >= self.width as i64 || cy >= self.height as i64 {
            return false;
        }
        self.inside[cy as usize * self.width + cx as usize]
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Cell containing a point, by the half-open convention (left and
    /// bottom edges inclusive).
    pub fn cell_of(&self, p: Vec2) -> (i64, i64) {
        (
            (p.x / self.cell_size).floor() as i64,
            (p.y / self.cell_size).floor() as i64,
        )
    }

    /// True when the closed square of the cell meets the domain boundary,
    /// i.e. any of its eight neighbors lies outside.
    pub fn touches_boundary(&self, cx: usize, cy: usize) -> bool {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if (dx != 0 || dy != 0) && !self.inside(cx as i64 + dx, cy as i64 + dy) {
                    return true;
                }
            }
        }
        false
    }

    /// Reduces the inside region to its largest 4-connected component and
    /// returns how many cells were dropped.
    fn keep_largest_component(&mut self) -> Result<usize, FieldError> {
        let total = self.inside_count();
        if total == 0 {
            return Err(FieldError::EmptyMask);
        }
        let mut label = vec![usize::MAX; self.inside.len()];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.inside.len() {
            if !self.inside[start] || label[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0usize;
            stack.push(start);
            label[start] = id;
            while let Some(idx) = stack.pop() {
                size += 1;
                let (cx, cy) = ((idx % self.width) as i64, (idx / self.width) as i64);
                for (nx, ny) in [(cx - 1, cy), (cx + 1, cy), (cx, cy - 1), (cx, cy + 1)] {
                    if self.inside(nx, ny) {
                        let nidx = ny as usize * self.width + nx as usize;
                        if label[nidx] == usize::MAX {
                            label[nidx] = id;
                            stack.push(nidx);
                        }
                    }
                }
            }
            sizes.push(size);
        }
        let keep = sizes
            .iter()
            .enumerate()
            .max_by_key(|&(_, &s)| s)
            .map(|(i, _)| i)
            .unwrap();
        for (idx, l) in label.iter().enumerate() {
            if self.inside[idx] && *l != keep {
                self.inside[idx] = false;
            }
        }
        Ok(total - sizes[keep])
    }
}

/// Scalar values carried by one Dirichlet square: the two velocity
/// components and the speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareValues {
    pub vx: f64,
    pub vy: f64,
    pub speed: f64,
}

impl SquareValues {
    pub fn get(&self, kind: FieldKind) -> f64 {
        match kind {
            FieldKind::Vx => self.vx,
            FieldKind::Vy => self.vy,
            FieldKind::Speed => self.speed,
        }
    }

    fn mean(a: SquareValues, b: SquareValues) -> SquareValues {
        SquareValues {
            vx: (a.vx + b.vx) / 2.0,
            vy: (a.vy + b.vy) / 2.0,
            speed: (a.speed + b.speed) / 2.0,
        }
    }
}

/// Which of the three scalar Laplace problems is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Vx,
    Vy,
    Speed,
}

/// The Dirichlet squares with their per-field values, keyed by cell.
#[derive(Debug, Clone, Default)]
pub struct SparseSampleGrid {
    pub squares: BTreeMap<(usize, usize), SquareValues>,
}

/// Averages the samples falling into each inside cell: the component
/// values are componentwise means, the speed value is the mean of sample
/// speeds (not the speed of the mean, which would shrink under
/// cancellation). Returns the grid and the number of skipped samples.
pub fn rasterize_samples(
    samples: &[VelocitySample],
    mask: &DomainMask,
) -> Result<(SparseSampleGrid, usize), FieldError> {
    let mut sums: BTreeMap<(usize, usize), (f64, f64, f64, usize)> = BTreeMap::new();
    let mut skipped = 0usize;
    for s in samples {
        let (cx, cy) = mask.cell_of(s.position);
        if !mask.inside(cx, cy) {
            skipped += 1;
            continue;
        }
        let entry = sums
            .entry((cx as usize, cy as usize))
            .or_insert((0.0, 0.0, 0.0, 0));
        entry.0 += s.velocity.x;
        entry.1 += s.velocity.y;
        entry.2 += s.velocity.norm();
        entry.3 += 1;
    }
    if sums.is_empty() {
        return Err(FieldError::NoSamples);
    }
    let squares = sums
        .into_iter()
        .map(|(cell, (sx, sy, sl, n))| {
            let n = n as f64;
            (
                cell,
                SquareValues {
                    vx: sx / n,
                    vy: sy / n,
                    speed: sl / n,
                },
            )
        })
        .collect();
    Ok((SparseSampleGrid { squares }, skipped))
}

/// Repairs corner-only contacts between Dirichlet squares: whenever two
/// squares share just one vertex, the two cells completing their 2x2 block
/// become Dirichlet squares valued at the mean of the diagonal pair.
/// Repeats until no corner-only contact remains, then checks that no
/// square (original or added) touches the domain boundary. Returns the
/// number of squares added.
pub fn repair_lipschitz(
    spg: &mut SparseSampleGrid,
    mask: &DomainMask,
) -> Result<usize, FieldError> {
    let mut added_total = 0usize;
    loop {
        let mut additions: BTreeMap<(usize, usize), SquareValues> = BTreeMap::new();
        let cells: Vec<(usize, usize)> = spg.squares.keys().copied().collect();
        for &(cx, cy) in &cells {
            // The two diagonal partners above this square.
            for dx in [1i64, -1] {
                let ox = cx as i64 + dx;
                let oy = cy as i64 + 1;
                if ox < 0 {
                    continue;
                }
                let other = (ox as usize, oy as usize);
                let Some(&other_vals) = spg.squares.get(&other) else {
                    continue;
                };
                let fill_a = (other.0, cy);
                let fill_b = (cx, other.1);
                if spg.squares.contains_key(&fill_a) || spg.squares.contains_key(&fill_b) {
                    continue; // edge-connected through a third square
                }
                let mean = SquareValues::mean(spg.squares[&(cx, cy)], other_vals);
                additions.entry(fill_a).or_insert(mean);
                additions.entry(fill_b).or_insert(mean);
            }
        }
        if additions.is_empty() {
            break;
        }
        added_total += additions.len();
        spg.squares.append(&mut additions);
    }
    for &(cx, cy) in spg.squares.keys() {
        if !mask.inside(cx as i64, cy as i64) || mask.touches_boundary(cx, cy) {
            return Err(FieldError::SampleTouchesBoundary(cx, cy));
        }
    }
    Ok(added_total)
}

/// The Dirichlet function g on the boundary of the square union: vertex
/// values are means of the adjacent squares' values; along each boundary
/// edge g interpolates linearly between its endpoint vertices.
#[derive(Debug, Clone, Default)]
pub struct DirichletTrace {
    /// Values at every vertex touching at least one Dirichlet square.
    pub vertex_values: BTreeMap<(usize, usize), SquareValues>,
    /// Boundary edges of the square union, as vertex pairs.
    pub edges: Vec<((usize, usize), (usize, usize))>,
}

impl DirichletTrace {
    /// Linear interpolation of g along a boundary edge.
    pub fn edge_value(&self, edge: usize, t: f64, kind: FieldKind) -> f64 {
        let (a, b) = self.edges[edge];
        let va = self.vertex_values[&a].get(kind);
        let vb = self.vertex_values[&b].get(kind);
        va + (vb - va) * t
    }
}

pub fn build_dirichlet_trace(spg: &SparseSampleGrid) -> DirichletTrace {
    let mut sums: BTreeMap<(usize, usize), (SquareValues, usize)> = BTreeMap::new();
    for (&(cx, cy), &vals) in &spg.squares {
        for v in [(cx, cy), (cx + 1, cy), (cx, cy + 1), (cx + 1, cy + 1)] {
            let entry = sums.entry(v).or_insert((
                SquareValues {
                    vx: 0.0,
                    vy: 0.0,
                    speed: 0.0,
                },
                0,
            ));
            entry.0.vx += vals.vx;
            entry.0.vy += vals.vy;
            entry.0.speed += vals.speed;
            entry.1 += 1;
        }
    }
    let vertex_values: BTreeMap<(usize, usize), SquareValues> = sums
        .into_iter()
        .map(|(v, (sum, n))| {
            let n = n as f64;
            (
                v,
                SquareValues {
                    vx: sum.vx / n,
                    vy: sum.vy / n,
                    speed: sum.speed / n,
                },
            )
        })
        .collect();

    // Boundary edges: cell edges with a Dirichlet square on exactly one side.
    let mut edges = Vec::new();
    let has =
        |cx: i64, cy: i64| cx >= 0 && cy >= 0 && spg.squares.contains_key(&(cx as usize, cy as usize));
    for &(cx, cy) in spg.squares.keys() {
        let (cx_i, cy_i) = (cx as i64, cy as i64);
        if !has(cx_i, cy_i - 1) {
            edges.push(((cx, cy), (cx + 1, cy)));
        }
        if !has(cx_i, cy_i + 1) {
            edges.push(((cx, cy + 1), (cx + 1, cy + 1)));
        }
        if !has(cx_i - 1, cy_i) {
            edges.push(((cx, cy), (cx, cy + 1)));
        }
        if !has(cx_i + 1, cy_i) {
            edges.push(((cx + 1, cy), (cx + 1, cy + 1)));
        }
    }
    DirichletTrace {
        vertex_values,
        edges,
    }
}

/// The recombined per-vertex vector field.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    /// Row-major over vertices; `None` outside the domain.
    pub vectors: Vec<Option<Vec2>>,
    /// Vertices where a negative interpolated speed had to be clamped.
    pub clamped_negative_speeds: usize,
}

impl VectorField {
    pub fn vertex(&self, i: usize, j: usize) -> Option<Vec2> {
        self.vectors[j * (self.width + 1) + i]
    }
}

/// Combines the three harmonic solutions: the component pair gives the
/// direction, the speed solution the magnitude. Where the direction
/// degenerates (component norm below `eps`) the output vector is zero.
pub fn recombine(vx: &ScalarField, vy: &ScalarField, speed: &ScalarField, eps: f64) -> VectorField {
    let mut vectors = vec![None; vx.values().len()];
    let mut clamped = 0usize;
    for idx in 0..vx.values().len() {
        if !vx.in_domain(idx) {
            continue;
        }
        let dir = Vec2::new(vx.values()[idx], vy.values()[idx]);
        let norm = dir.norm();
        let mut len = speed.values()[idx];
        if len < 0.0 {
            len = 0.0;
            clamped += 1;
        }
        vectors[idx] = Some(if norm < eps {
            Vec2::ZERO
        } else {
            dir * (len / norm)
        });
    }
    VectorField {
        width: vx.grid_width(),
        height: vx.grid_height(),
        cell_size: vx.cell_size(),
        vectors,
        clamped_negative_speeds: clamped,
    }
}

/// Everything produced by a reconstruction run.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub vx: ScalarField,
    pub vy: ScalarField,
    pub speed: ScalarField,
    pub field: VectorField,
    pub skipped_samples: usize,
    pub repaired_squares: usize,
}

/// Full reconstruction pipeline: rasterize, repair, trace, solve the three
/// Laplace problems (in parallel when enabled) and recombine.
pub fn reconstruct(
    samples: &[VelocitySample],
    mask: &DomainMask,
    options: &SolveOptions,
) -> Result<Reconstruction, FieldError> {
    let (mut spg, skipped) = rasterize_samples(samples, mask)?;
    let repaired = repair_lipschitz(&mut spg, mask)?;
    let trace = build_dirichlet_trace(&spg);

    let ((vx, vy), speed) = batch::join(
        || {
            batch::join(
                || solve_laplace(mask, &spg, &trace, FieldKind::Vx, options),
                || solve_laplace(mask, &spg, &trace, FieldKind::Vy, options),
            )
        },
        || solve_laplace(mask, &spg, &trace, FieldKind::Speed, options),
    );
    let (vx, vy, speed) = (vx?, vy?, speed?);

    let max_speed = spg.squares.values().map(|v| v.speed).fold(0.0f64, f64::max);
    let eps = 1e-10 * max_speed.max(1e-300);
    let field = recombine(&vx, &vy, &speed, eps);
    Ok(Reconstruction {
        vx,
        vy,
        speed,
        field,
        skipped_samples: skipped,
        repaired_squares: repaired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(x: f64, y: f64, vx: f64, vy: f64) -> VelocitySample {
        VelocitySample {
            position: Vec2::new(x, y),
            velocity: Vec2::new(vx, vy),
            segment: 0,
            grid_index: 0,
        }
    }

    fn sq(vx: f64, vy: f64, speed: f64) -> SquareValues {
        SquareValues { vx, vy, speed }
    }

    #[test]
    fn mask_keeps_largest_component() {
        // 5x3 grid: a 2x3 block on the left, isolated single cell at right.
        let mut inside = vec![false; 15];
        for cy in 0..3 {
            for cx in 0..2 {
                inside[cy * 5 + cx] = true;
            }
        }
        inside[1 * 5 + 4] = true;
        let mask = DomainMask::new(5, 3, 1.0, inside).unwrap();
        assert_eq!(mask.discarded_cells, 1);
        assert!(!mask.inside(4, 1));
        assert!(mask.inside(1, 2));
    }

    #[test]
    fn rasterize_single_sample_per_cell() {
        let mask = DomainMask::filled(8, 8, 1.0);
        let (spg, skipped) =
            rasterize_samples(&[sample(2.5, 3.5, 1.0, 2.0)], &mask).unwrap();
        assert_eq!(skipped, 0);
        let vals = spg.squares[&(2, 3)];
        assert_eq!(vals.vx, 1.0);
        assert_eq!(vals.vy, 2.0);
        assert!((vals.speed - 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rasterize_speed_is_mean_of_speeds() {
        // Samples (1,0) and (0,1) in one cell: components average to 0.5
        // each, speed averages to 1 (not sqrt(0.5)).
        let mask = DomainMask::filled(4, 4, 1.0);
        let (spg, _) = rasterize_samples(
            &[sample(1.2, 1.2, 1.0, 0.0), sample(1.8, 1.8, 0.0, 1.0)],
            &mask,
        )
        .unwrap();
        let vals = spg.squares[&(1, 1)];
        assert_eq!(vals.vx, 0.5);
        assert_eq!(vals.vy, 0.5);
        assert_eq!(vals.speed, 1.0);
    }

    #[test]
    fn rasterize_half_open_cell_convention() {
        let mask = DomainMask::filled(4, 4, 1.0);
        // Exactly on the shared edge x = 2: belongs to the right cell.
        let (spg, _) = rasterize_samples(&[sample(2.0, 1.5, 1.0, 0.0)], &mask).unwrap();
        assert!(spg.squares.contains_key(&(2, 1)));
        assert!(!spg.squares.contains_key(&(1, 1)));
    }

    #[test]
    fn rasterize_skips_outside_samples() {
        let mut inside = vec![true; 16];
        inside[0] = false;
        let mask = DomainMask::new(4, 4, 1.0, inside).unwrap();
        let (spg, skipped) = rasterize_samples(
            &[sample(0.5, 0.5, 1.0, 0.0), sample(2.5, 2.5, 1.0, 0.0)],
            &mask,
        )
        .unwrap();
        assert_eq!(skipped, 1);
        assert_eq!(spg.squares.len(), 1);
    }

    #[test]
    fn repair_isolated_square_unchanged() {
        let mask = DomainMask::filled(8, 8, 1.0);
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((3, 3), sq(1.0, 0.0, 1.0));
        let added = repair_lipschitz(&mut spg, &mask).unwrap();
        assert_eq!(added, 0);
        assert_eq!(spg.squares.len(), 1);
    }

    #[test]
    fn repair_fills_diagonal_contact_with_means() {
        let mask = DomainMask::filled(8, 8, 1.0);
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((3, 3), sq(2.0, 4.0, 2.0));
        spg.squares.insert((4, 4), sq(4.0, 0.0, 4.0));
        let added = repair_lipschitz(&mut spg, &mask).unwrap();
        assert_eq!(added, 2);
        for cell in [(4, 3), (3, 4)] {
            let v = spg.squares[&cell];
            assert_eq!(v.vx, 3.0);
            assert_eq!(v.vy, 2.0);
            assert_eq!(v.speed, 3.0);
        }
    }

    #[test]
    fn repair_leaves_edge_connected_l_shape() {
        let mask = DomainMask::filled(8, 8, 1.0);
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((3, 3), sq(1.0, 0.0, 1.0));
        spg.squares.insert((4, 3), sq(2.0, 0.0, 2.0));
        spg.squares.insert((4, 4), sq(3.0, 0.0, 3.0));
        let added = repair_lipschitz(&mut spg, &mask).unwrap();
        assert_eq!(added, 0);
        assert_eq!(spg.squares.len(), 3);
    }

    #[test]
    fn repair_anti_diagonal_contact() {
        let mask = DomainMask::filled(8, 8, 1.0);
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((4, 3), sq(1.0, 0.0, 1.0));
        spg.squares.insert((3, 4), sq(3.0, 0.0, 3.0));
        let added = repair_lipschitz(&mut spg, &mask).unwrap();
        assert_eq!(added, 2);
        assert_eq!(spg.squares[&(3, 3)].vx, 2.0);
        assert_eq!(spg.squares[&(4, 4)].vx, 2.0);
    }

    #[test]
    fn repair_errors_near_boundary() {
        let mask = DomainMask::filled(6, 6, 1.0);
        let mut spg = SparseSampleGrid::default();
        // Cell on the grid border: its closed square meets the outer
        // boundary, which the model forbids.
        spg.squares.insert((0, 3), sq(1.0, 0.0, 1.0));
        assert!(matches!(
            repair_lipschitz(&mut spg, &mask),
            Err(FieldError::SampleTouchesBoundary(0, 3))
        ));
    }

    #[test]
    fn trace_constant_squares_give_constant_g() {
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((2, 2), sq(7.0, 0.0, 7.0));
        spg.squares.insert((3, 2), sq(7.0, 0.0, 7.0));
        let trace = build_dirichlet_trace(&spg);
        for v in trace.vertex_values.values() {
            assert_eq!(v.vx, 7.0);
        }
        for e in 0..trace.edges.len() {
            assert_eq!(trace.edge_value(e, 0.37, FieldKind::Vx), 7.0);
        }
    }

    #[test]
    fn trace_vertex_is_mean_of_adjacent_squares() {
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((2, 2), sq(2.0, 0.0, 2.0));
        spg.squares.insert((3, 2), sq(4.0, 0.0, 4.0));
        let trace = build_dirichlet_trace(&spg);
        // Vertices shared by both squares average them.
        assert_eq!(trace.vertex_values[&(3, 2)].vx, 3.0);
        assert_eq!(trace.vertex_values[&(3, 3)].vx, 3.0);
        // Corner vertices keep their single square's value.
        assert_eq!(trace.vertex_values[&(2, 2)].vx, 2.0);
        assert_eq!(trace.vertex_values[&(4, 3)].vx, 4.0);
    }

    #[test]
    fn trace_edge_interpolates_linearly() {
        let mut spg = SparseSampleGrid::default();
        spg.squares.insert((2, 2), sq(2.0, 0.0, 2.0));
        spg.squares.insert((3, 2), sq(4.0, 0.0, 4.0));
        let trace = build_dirichlet_trace(&spg);
        // Bottom edge of the left square runs from vertex value 2 to the
        // shared value 3: midpoint 2.5.
        let e = trace
            .edges
            .iter()
            .position(|&(a, b)| a == (2, 2) && b == (3, 2))
            .unwrap();
        assert_eq!(trace.edge_value(e, 0.5, FieldKind::Vx), 2.5);
        // An edge with equal endpoint values stays constant.
        let e2 = trace
            .edges
            .iter()
            .position(|&(a, b)| a == (3, 2) && b == (3, 3));
        assert!(e2.is_none(), "internal edges are not part of the trace");
    }

    #[test]
    fn trace_skips_interior_vertices_of_2x2_block() {
        let mut spg = SparseSampleGrid::default();
        for cell in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            spg.squares.insert(cell, sq(1.0, 0.0, 1.0));
        }
        let trace = build_dirichlet_trace(&spg);
        // The center vertex (3,3) is still listed with a value (it is a
        // corner of all four squares) but no boundary edge uses it.
        for &(a, b) in &trace.edges {
            assert_ne!(a, (3, 3));
            assert_ne!(b, (3, 3));
        }
        assert_eq!(trace.edges.len(), 8);
    }
}
