//! Dense LU solve with partial pivoting and one step of iterative refinement.

use crate::error::{Error, Result};

/// Solves `a x = b` for a row-major `m x m` matrix.
pub(crate) fn solve_dense(a: &[f64], m: usize, b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), m * m);
    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();
    for col in 0..m {
        let (pivot, best) = (col..m)
            .map(|row| (row, lu[row * m + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= f64::EPSILON * 1e-3 {
            return Err(Error::Singular(col));
        }
        if pivot != col {
            for k in 0..m {
                lu.swap(pivot * m + k, col * m + k);
            }
            perm.swap(pivot, col);
        }
        let d = lu[col * m + col];
        for row in col + 1..m {
            let f = lu[row * m + col] / d;
            lu[row * m + col] = f;
            if f != 0.0 {
                let (upper, lower) = lu.split_at_mut(row * m);
                let src = &upper[col * m + col + 1..col * m + m];
                for (dst, s) in lower[col + 1..m].iter_mut().zip(src) {
                    *dst -= f * s;
                }
            }
        }
    }
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..m {
            let s: f64 = (0..i).map(|k| lu[i * m + k] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..m).rev() {
            let s: f64 = (i + 1..m).map(|k| lu[i * m + k] * x[k]).sum();
            x[i] = (x[i] - s) / lu[i * m + i];
        }
        x
    };
    let mut x = solve(b);
    let resid: Vec<f64> = (0..m)
        .map(|i| b[i] - (0..m).map(|k| a[i * m + k] * x[k]).sum::<f64>())
        .collect();
    let dx = solve(&resid);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}
