//! Small dense real linear algebra for the refinement steps.

use alloc::vec::Vec;

/// Solves `a·x = b` in place by Gaussian elimination with partial pivoting;
/// `a` is `n×n` row-major. Returns `false` for a numerically singular matrix.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if !(a[piv * n + col].abs() > 0.0) || !a[piv * n + col].is_finite() {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    b.iter().all(|x| x.is_finite())
}

/// Levenberg–Marquardt step `−(JᵀJ + λ·D)⁻¹ Jᵀr` for an `m×n` row-major
/// Jacobian, with `D` the diagonal of `JᵀJ` floored at a small fraction of
/// its largest entry.
pub(crate) fn damped_step(
    jac: &[f64],
    res: &[f64],
    m: usize,
    n: usize,
    lambda: f64,
) -> Option<Vec<f64>> {
    let mut a = alloc::vec![0.0; n * n];
    let mut g = alloc::vec![0.0; n];
    for r in 0..m {
        let row = &jac[r * n..(r + 1) * n];
        for i in 0..n {
            g[i] -= row[i] * res[r];
            for j in 0..n {
                a[i * n + j] += row[i] * row[j];
            }
        }
    }
    let dmax = (0..n).map(|i| a[i * n + i]).fold(0.0, f64::max);
    if !(dmax > 0.0) {
        return None;
    }
    for i in 0..n {
        a[i * n + i] += lambda * a[i * n + i].max(1e-12 * dmax);
    }
    solve_in_place(&mut a, &mut g, n).then_some(g)
}
