//! Independent brute-force oracles used by the test suites.
//!
//! Nothing here shares code with the solvers it checks: the tridiagonal
//! oracle runs dense Gaussian elimination and the crossing oracle tests
//! every pair of non-adjacent elements.

use crate::geom::Vec2;

/// Solves the tridiagonal system by dense Gaussian elimination with
/// partial pivoting. `sub[0]` and `sup[n-1]` are ignored, matching the
/// banded layout.
pub fn dense_tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut a = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
        if i > 0 {
            a[i][i - 1] = sub[i];
        }
        if i + 1 < n {
            a[i][i + 1] = sup[i];
        }
    }
    let mut b = rhs.to_vec();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// True when segments `(a1, a2)` and `(b1, b2)` properly cross (interiors
/// intersect at a single point).
pub fn segments_cross(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let d1 = (b2 - b1).wedge(a1 - b1);
    let d2 = (b2 - b1).wedge(a2 - b1);
    let d3 = (a2 - a1).wedge(b1 - a1);
    let d4 = (a2 - a1).wedge(b2 - a1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// All proper crossings between non-adjacent elements of the polyline,
/// reported as pairs of element indices (element `e` joins points `e-1`
/// and `e`), O(n^2).
pub fn polyline_crossings(points: &[Vec2]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let n_elems = points.len().saturating_sub(1);
    for e1 in 1..=n_elems {
        for e2 in e1 + 2..=n_elems {
            if segments_cross(points[e1 - 1], points[e1], points[e2 - 1], points[e2]) {
                out.push((e1, e2));
            }
        }
    }
    out
}

/// Recall check for grid-based detection: a crossing between elements
/// `e1 < e2` counts as covered when some span contains its inner index pair
/// `[e1, e2 - 1]` (the grid points facing the crossing from both branches).
pub fn crossing_covered(spans: &[crate::intersect::IntersectionSpan], e1: usize, e2: usize) -> bool {
    spans.iter().any(|s| s.i1 <= e1 && e2 - 1 <= s.i2)
}

/// Inner index gap of a crossing between elements `e1 < e2`; detection is
/// only obliged to report crossings whose gap exceeds four.
pub fn crossing_inner_gap(e1: usize, e2: usize) -> usize {
    (e2 - 1).saturating_sub(e1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solver_on_known_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3; 5; 3] -> x = [1, 1, 1]
        let x = dense_tridiagonal_solve(
            &[0.0, 1.0, 1.0],
            &[2.0, 3.0, 2.0],
            &[1.0, 1.0, 0.0],
            &[3.0, 5.0, 3.0],
        );
        for v in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn crossing_oracle_detects_simple_x() {
        assert!(segments_cross(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0)
        ));
        assert!(!segments_cross(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0)
        ));
    }

    #[test]
    fn polyline_oracle_finds_bowtie_crossing() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.0, 2.0),
        ];
        let crossings = polyline_crossings(&pts);
        assert_eq!(crossings, vec![(1, 3)]);
    }
}
