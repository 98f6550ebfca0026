//! Small dense least-squares kernels for the filter and phase-factor fits.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub(crate) struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Minimizes `|A x - b|_2` by Householder QR. Requires `rows >= cols`.
///
/// Columns that are numerically dependent get a zero coefficient.
pub(crate) fn least_squares(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let (m, n) = (a.rows, a.cols);
    debug_assert!(m >= n && b.len() == m);
    // column-major copy keeps the Householder sweeps contiguous
    let mut q: Vec<Vec<f64>> = (0..n).map(|c| (0..m).map(|r| a.get(r, c)).collect()).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; n];
    let scale = q
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let tiny = 1e-28 * scale.max(f64::MIN_POSITIVE);

    for k in 0..n {
        let norm_sq: f64 = q[k][k..].iter().map(|v| v * v).sum();
        if norm_sq <= tiny {
            diag[k] = 0.0;
            continue;
        }
        let norm = sqrt(norm_sq);
        let alpha = if q[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e_1 stored in place
        q[k][k] -= alpha;
        let vnorm_sq: f64 = q[k][k..].iter().map(|v| v * v).sum();
        diag[k] = alpha;
        if vnorm_sq == 0.0 {
            continue;
        }
        let (head, tail) = q.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (c, vi) in col[k..].iter_mut().zip(v) {
                *c -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[k..]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vnorm_sq;
        for (c, vi) in rhs[k..].iter_mut().zip(v) {
            *c -= f * vi;
        }
    }

    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        if diag[k] == 0.0 || fabs(diag[k]) <= sqrt(tiny) {
            x[k] = 0.0;
            continue;
        }
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= q[j][k] * x[j];
        }
        x[k] = s / diag[k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        let mut a = Matrix::zeros(3, 3);
        let vals = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        for (r, row) in vals.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a.set(r, c, *v);
            }
        }
        let x = least_squares(&a, &[1.0, 2.0, 3.0]);
        for r in 0..3 {
            let ax: f64 = (0..3).map(|c| vals[r][c] * x[c]).sum();
            assert!(fabs(ax - [1.0, 2.0, 3.0][r]) < 1e-12);
        }
    }

    #[test]
    fn fits_overdetermined_line() {
        // y = 2 + 3 t sampled exactly
        let ts = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mut a = Matrix::zeros(5, 2);
        let mut b = Vec::new();
        for (r, &t) in ts.iter().enumerate() {
            a.set(r, 0, 1.0);
            a.set(r, 1, t);
            b.push(2.0 + 3.0 * t);
        }
        let x = least_squares(&a, &b);
        assert!(fabs(x[0] - 2.0) < 1e-12 && fabs(x[1] - 3.0) < 1e-12);
    }
}
