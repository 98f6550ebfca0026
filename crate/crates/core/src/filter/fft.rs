//! Radix-2 FFT used to evaluate long cosine series on dense uniform grids.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, sin};
use num_complex::Complex64;

/// In-place forward transform `X_j = sum_k x_k exp(-2 pi i jk / N)`; `N` must be a power of two.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * core::f64::consts::PI / len as f64;
        // exact twiddles per stage keep rounding from accumulating across k
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::new(cos(step * k as f64), sin(step * k as f64)))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Values of `sum_{k=0}^{n} a_k cos(k phi_j)` at `phi_j = pi j / m` for `j = 0..=m`.
///
/// `m` is rounded up to a power of two that exceeds the series length.
pub(crate) fn cosine_series_on_grid(coeffs: &[f64], m: usize) -> (usize, Vec<f64>) {
    let m = m.max(coeffs.len()).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
    for (slot, &a) in buf.iter_mut().zip(coeffs) {
        *slot = Complex64::new(a, 0.0);
    }
    fft_in_place(&mut buf);
    (m, buf[..=m].iter().map(|z| z.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::fabs;

    #[test]
    fn matches_direct_cosine_sum() {
        let coeffs = [0.3, -1.2, 0.5, 0.25, -0.125, 0.7];
        let (m, vals) = cosine_series_on_grid(&coeffs, 16);
        assert_eq!(m, 16);
        for (j, v) in vals.iter().enumerate() {
            let phi = core::f64::consts::PI * j as f64 / m as f64;
            let direct: f64 = coeffs.iter().enumerate().map(|(k, a)| a * cos(k as f64 * phi)).sum();
            assert!(fabs(v - direct) < 1e-13, "j={j}: {v} vs {direct}");
        }
    }
}
