//! Small dense linear-algebra helpers for the simplex basis and the vertex
//! enumerator.

/// Solves `a * x = b` in place by Gaussian elimination with partial
/// pivoting; `a` is `n x n` row-major. Returns `false` if the matrix is
/// singular up to `piv_tol`.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize, piv_tol: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for k in 0..n {
        let mut piv_row = k;
        let mut piv_val = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > piv_val {
                piv_val = v;
                piv_row = r;
            }
        }
        if piv_val <= piv_tol {
            return false;
        }
        if piv_row != k {
            for c in k..n {
                a.swap(k * n + c, piv_row * n + c);
            }
            b.swap(k, piv_row);
        }
        let piv = a[k * n + k];
        for r in k + 1..n {
            let factor = a[r * n + k] / piv;
            if factor != 0.0 {
                for c in k..n {
                    a[r * n + c] -= factor * a[k * n + c];
                }
                b[r] -= factor * b[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    true
}

/// Inverts the `n x n` row-major matrix into `out` by Gauss-Jordan with
/// partial pivoting. Returns `false` on singularity.
pub fn invert(a: &[f64], out: &mut [f64], n: usize, piv_tol: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(out.len(), n * n);
    let mut work = a.to_vec();
    out.fill(0.0);
    for i in 0..n {
        out[i * n + i] = 1.0;
    }
    for k in 0..n {
        let mut piv_row = k;
        let mut piv_val = work[k * n + k].abs();
        for r in k + 1..n {
            let v = work[r * n + k].abs();
            if v > piv_val {
                piv_val = v;
                piv_row = r;
            }
        }
        if piv_val <= piv_tol {
            return false;
        }
        if piv_row != k {
            for c in 0..n {
                work.swap(k * n + c, piv_row * n + c);
                out.swap(k * n + c, piv_row * n + c);
            }
        }
        let piv = work[k * n + k];
        let inv_piv = 1.0 / piv;
        for c in 0..n {
            work[k * n + c] *= inv_piv;
            out[k * n + c] *= inv_piv;
        }
        for r in 0..n {
            if r == k {
                continue;
            }
            let factor = work[r * n + k];
            if factor != 0.0 {
                for c in 0..n {
                    work[r * n + c] -= factor * work[k * n + c];
                    out[r * n + c] -= factor * out[k * n + c];
                }
            }
        }
    }
    true
}
