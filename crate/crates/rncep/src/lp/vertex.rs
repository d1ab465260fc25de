//! Brute-force vertex enumeration for small polyhedra.
//!
//! Every K-subset of the constraint system (general rows plus the box
//! bounds) is made tight and the square system solved; feasible solutions
//! are kept and deduplicated. Exponential in the dimension, which is why it
//! is capped at K <= 8 — it exists as an independent oracle for the simplex
//! solver, not as a production enumeration method.

use super::{dense, LpError};
use crate::uncertainty::Polyhedron;

const MAX_DIM: usize = 8;
const FEAS_TOL: f64 = 1e-7;
const DEDUP_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-11;

/// Advances `combo` to the next k-combination of `0..total` in
/// lexicographic order; false when exhausted.
fn next_combination(combo: &mut [usize], total: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < total - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Enumerates all vertices of `{d : V d <= b, lower <= d <= upper}`,
/// sorted lexicographically.
pub fn vertex_enumerate(p: &Polyhedron) -> Result<Vec<Vec<f64>>, LpError> {
    let k = p.dim();
    if k > MAX_DIM {
        return Err(LpError::TooManyDimensions { got: k, max: MAX_DIM });
    }
    if k == 0 {
        return Ok(Vec::new());
    }

    // All constraints as normal . d <= offset.
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let mut offsets: Vec<f64> = Vec::new();
    for (row, &b) in p.rows.iter().zip(&p.rhs) {
        normals.push(row.clone());
        offsets.push(b);
    }
    for j in 0..k {
        let mut up = vec![0.0; k];
        up[j] = 1.0;
        normals.push(up);
        offsets.push(p.upper[j]);
        let mut lo = vec![0.0; k];
        lo[j] = -1.0;
        normals.push(lo);
        offsets.push(-p.lower[j]);
    }
    let total = normals.len();
    if total < k {
        return Ok(Vec::new());
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let mut a = Vec::with_capacity(k * k);
        let mut rhs = Vec::with_capacity(k);
        for &idx in &combo {
            a.extend_from_slice(&normals[idx]);
            rhs.push(offsets[idx]);
        }
        if dense::solve_in_place(&mut a, &mut rhs, k, SINGULAR_TOL) {
            let point = rhs;
            let feasible = normals.iter().zip(&offsets).all(|(n, &b)| {
                let act: f64 = n.iter().zip(&point).map(|(c, x)| c * x).sum();
                act <= b + FEAS_TOL
            });
            if feasible {
                let dup = vertices
                    .iter()
                    .any(|v| v.iter().zip(&point).all(|(a, b)| (a - b).abs() <= DEDUP_TOL));
                if !dup {
                    vertices.push(point);
                }
            }
        }
        if !next_combination(&mut combo, total) {
            break;
        }
    }

    vertices.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxed(lower: Vec<f64>, upper: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Polyhedron {
        Polyhedron { rows, rhs, lower, upper, seed: None }
    }

    #[test]
    fn box_corners_with_loose_row() {
        // Unit box in K=2 with a slack sum-row: the 4 corners.
        let p = boxed(vec![0.0, 0.0], vec![1.0, 1.0], vec![vec![0.5, 0.5]], vec![10.0]);
        let verts = vertex_enumerate(&p).unwrap();
        assert_eq!(verts.len(), 4);
        assert_eq!(verts[0], vec![0.0, 0.0]);
        assert_eq!(verts[3], vec![1.0, 1.0]);
    }

    #[test]
    fn cut_box_triangle() {
        // [0,1]^2 cut by x + y <= 1: vertices (0,0), (1,0), (0,1).
        let p = boxed(vec![0.0, 0.0], vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![1.0]);
        let verts = vertex_enumerate(&p).unwrap();
        assert_eq!(verts.len(), 3);
        assert!(verts.contains(&vec![0.0, 0.0]));
        assert!(verts.contains(&vec![0.0, 1.0]));
        assert!(verts.contains(&vec![1.0, 0.0]));
    }

    #[test]
    fn singleton_point() {
        let p = boxed(vec![2.0, 3.0], vec![2.0, 3.0], vec![], vec![]);
        let verts = vertex_enumerate(&p).unwrap();
        assert_eq!(verts, vec![vec![2.0, 3.0]]);
    }

    #[test]
    fn empty_region_has_no_vertices() {
        // Box cut away entirely: x + y <= -1 over [0,1]^2.
        let p = boxed(vec![0.0, 0.0], vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![-1.0]);
        let verts = vertex_enumerate(&p).unwrap();
        assert!(verts.is_empty());
    }

    #[test]
    fn dimension_cap() {
        let k = 9;
        let p = boxed(vec![0.0; k], vec![1.0; k], vec![], vec![]);
        assert!(matches!(
            vertex_enumerate(&p),
            Err(LpError::TooManyDimensions { got: 9, max: 8 })
        ));
    }
}
