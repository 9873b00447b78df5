//! Iterative solver for the mixed boundary-value Laplace problems.
//!
//! Unknowns sit at pixel vertices. Interior vertices satisfy the standard
//! five-point stencil; vertices on the outer boundary use a mirrored ghost
//! value (the opposite inside neighbor), which discretizes the zero Neumann
//! condition; vertices touching a Dirichlet square hold the trace value g
//! exactly. A successive over-relaxation sweep with fixed lexicographic
//! ordering runs until the maximum stencil residual drops below the
//! tolerance relative to the Dirichlet value range.

use super::{DirichletTrace, DomainMask, FieldError, FieldKind, SparseSampleGrid};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Maximum stencil residual relative to the Dirichlet value range.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor of the sweep.
    pub relaxation: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_sweeps: 1_000_000,
            relaxation: 1.5,
        }
    }
}

/// One harmonic scalar on the vertex grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid_width: usize,
    grid_height: usize,
    cell_size: f64,
    values: Vec<f64>,
    in_domain: Vec<bool>,
    dirichlet: Vec<bool>,
    /// Final maximum residual relative to the Dirichlet range.
    pub residual: f64,
    pub sweeps: usize,
}

impl ScalarField {
    /// Number of cells along x; the vertex grid has one more column.
    pub fn grid_width(&self) -> usize {
        self.grid_width
    }

    pub fn grid_height(&self) -> usize {
        self.grid_height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * (self.grid_width + 1) + i
    }

    pub fn vertex(&self, i: usize, j: usize) -> f64 {
        self.values[self.vertex_index(i, j)]
    }

    /// True when the vertex belongs to the reconstruction domain.
    pub fn in_domain(&self, idx: usize) -> bool {
        self.in_domain[idx]
    }

    pub fn is_dirichlet(&self, idx: usize) -> bool {
        self.dirichlet[idx]
    }
}

struct Stencil {
    vertex: usize,
    /// Up to four (neighbor, weight) pairs with weights summing to 4.
    neighbors: [(usize, f64); 4],
    count: usize,
}

/// Solves one of the three scalar problems on the masked domain.
pub fn solve_laplace(
    mask: &DomainMask,
    spg: &SparseSampleGrid,
    trace: &DirichletTrace,
    kind: FieldKind,
    options: &SolveOptions,
) -> Result<ScalarField, FieldError> {
    let vw = mask.width() + 1;
    let vh = mask.height() + 1;
    let vidx = |i: usize, j: usize| j * vw + i;

    // Vertex classification from the four surrounding cells.
    let mut in_domain = vec![false; vw * vh];
    let mut dirichlet = vec![false; vw * vh];
    for j in 0..vh {
        for i in 0..vw {
            let (ii, jj) = (i as i64, j as i64);
            let touching = [
                (ii - 1, jj - 1),
                (ii, jj - 1),
                (ii - 1, jj),
                (ii, jj),
            ];
            let inside_any = touching.iter().any(|&(cx, cy)| mask.inside(cx, cy));
            in_domain[vidx(i, j)] = inside_any;
            let near_square = touching.iter().any(|&(cx, cy)| {
                cx >= 0 && cy >= 0 && spg.squares.contains_key(&(cx as usize, cy as usize))
            });
            if near_square {
                dirichlet[vidx(i, j)] = true;
            }
        }
    }

    let mut values = vec![0.0; vw * vh];
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    let mut n_dirichlet = 0usize;
    for (&(i, j), vals) in &trace.vertex_values {
        let idx = vidx(i, j);
        debug_assert!(dirichlet[idx]);
        let v = vals.get(kind);
        values[idx] = v;
        dmin = dmin.min(v);
        dmax = dmax.max(v);
        n_dirichlet += 1;
    }
    if n_dirichlet == 0 {
        return Err(FieldError::NoDirichletData);
    }
    let range = dmax - dmin;
    let scale = if range > 0.0 { range } else { dmax.abs().max(1.0) };
    let start = (dmin + dmax) / 2.0;

    // Unknown vertices with their mirrored stencils, in sweep order.
    let mut stencils: Vec<Stencil> = Vec::new();
    for j in 0..vh {
        for i in 0..vw {
            let idx = vidx(i, j);
            if !in_domain[idx] || dirichlet[idx] {
                continue;
            }
            values[idx] = start;
            let available = |di: i64, dj: i64| -> Option<usize> {
                let ni = i as i64 + di;
                let nj = j as i64 + dj;
                if ni < 0 || nj < 0 || ni >= vw as i64 || nj >= vh as i64 {
                    return None;
                }
                let n = vidx(ni as usize, nj as usize);
                in_domain[n].then_some(n)
            };
            let mut neighbors = [(0usize, 0.0f64); 4];
            let mut count = 0usize;
            for (a, b) in [((-1i64, 0i64), (1i64, 0i64)), ((0, -1), (0, 1))] {
                match (available(a.0, a.1), available(b.0, b.1)) {
                    (Some(na), Some(nb)) => {
                        neighbors[count] = (na, 1.0);
                        neighbors[count + 1] = (nb, 1.0);
                        count += 2;
                    }
                    // Missing side: mirror the opposite neighbor (ghost
                    // value), which is the zero Neumann discretization.
                    (Some(na), None) => {
                        neighbors[count] = (na, 2.0);
                        count += 1;
                    }
                    (None, Some(nb)) => {
                        neighbors[count] = (nb, 2.0);
                        count += 1;
                    }
                    (None, None) => unreachable!("vertex touches an inside cell"),
                }
            }
            stencils.push(Stencil {
                vertex: idx,
                neighbors,
                count,
            });
        }
    }

    let mut residual = 0.0;
    let mut sweeps = 0usize;
    if !stencils.is_empty() {
        loop {
            for s in &stencils {
                let mut avg = 0.0;
                for &(n, wgt) in &s.neighbors[..s.count] {
                    avg += wgt * values[n];
                }
                avg /= 4.0;
                values[s.vertex] += options.relaxation * (avg - values[s.vertex]);
            }
            sweeps += 1;

            let mut max_res = 0.0f64;
            for s in &stencils {
                let mut avg = 0.0;
                for &(n, wgt) in &s.neighbors[..s.count] {
                    avg += wgt * values[n];
                }
                avg /= 4.0;
                max_res = max_res.max((avg - values[s.vertex]).abs());
            }
            residual = max_res / scale;
            if residual <= options.tol {
                break;
            }
            if sweeps >= options.max_sweeps {
                return Err(FieldError::NonConvergence { residual, sweeps });
            }
        }
    }

    Ok(ScalarField {
        grid_width: mask.width(),
        grid_height: mask.height(),
        cell_size: mask.cell_size(),
        values,
        in_domain,
        dirichlet,
        residual,
        sweeps,
    })
}
