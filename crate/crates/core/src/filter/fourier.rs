//! Odd-harmonic Fourier approximation of a shifted Heaviside step, the filter
//! behind the LCU baseline.
//!
//! With `y = (x - mu) / |H|` the target is the square wave
//! `1/2 - (2/pi) sum_{k odd} sin(k y) / k`, one for `y in (-pi, 0)` and zero for
//! `y in (0, pi)`. Each harmonic is damped by `exp(-k^2 sigma^2 / 2)`, which is
//! the Fourier image of a Gaussian smoothing of the step.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::{PI, SQRT_2};
use libm::{cos, erfc, exp, fabs, sin, sqrt};
use num_complex::Complex64;

use super::{uniform_grid, Filter, VALIDATION_POINTS};
use crate::error::{Error, Result};
use crate::spectral::unit_phase;

const MAX_DEGREE: usize = 1 << 16;

/// `f(x) = sum_{k in I} c_k exp(-i t_k x)` with `I = {0} ∪ {±(2j+1) : j = 0..=d}`
/// and `t_k = k / |H|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFilter {
    h_norm: f64,
    degree: usize,
    indices: Vec<i64>,
    coefficients: Vec<Complex64>,
    times: Vec<f64>,
    one_norm: f64,
    eps: f64,
}

/// Index set `[0, 1, -1, 3, -3, ..., 2d+1, -(2d+1)]`.
fn index_set(degree: usize) -> Vec<i64> {
    let mut idx = Vec::with_capacity(2 * degree + 3);
    idx.push(0);
    for j in 0..=degree as i64 {
        idx.push(2 * j + 1);
        idx.push(-(2 * j + 1));
    }
    idx
}

impl FourierFilter {
    /// Rebuilds a filter from coefficients ordered as `[c_0, c_1, c_-1, c_3, c_-3, ...]`.
    ///
    /// `eps` is the error the caller claims for it.
    pub fn from_coefficients(h_norm: f64, coefficients: Vec<Complex64>, eps: f64) -> Result<Self> {
        if !(h_norm > 0.0) {
            return Err(Error::invalid("spectral radius must be positive"));
        }
        let len = coefficients.len();
        if len < 3 || len.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "an odd-harmonic series has 2d + 3 coefficients, got {len}"
            )));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("Fourier coefficients must be finite"));
        }
        let degree = (len - 3) / 2;
        let indices = index_set(degree);
        let times = indices.iter().map(|&k| k as f64 / h_norm).collect();
        let one_norm = coefficients.iter().map(|c| sqrt(c.norm_sqr())).sum();
        Ok(FourierFilter {
            h_norm,
            degree,
            indices,
            coefficients,
            times,
            one_norm,
            eps,
        })
    }

    /// `d`: harmonics run up to `2d + 1`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn h_norm(&self) -> f64 {
        self.h_norm
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Evolution times `t_k = k / |H|`, aligned with [`Self::indices`].
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `sum_k |c_k|`.
    pub fn one_norm(&self) -> f64 {
        self.one_norm
    }

    /// Error achieved on the validation grids (or the claimed one for rebuilt filters).
    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn eval_unchecked(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&self.times)
            .map(|(c, t)| c * unit_phase(-t * x))
            .sum()
    }
}

impl Filter for FourierFilter {
    type Output = Complex64;

    fn eval(&self, x: f64) -> Result<Complex64> {
        let slack = 1e-12 * self.h_norm;
        if !(x >= -slack && x <= self.h_norm + slack) {
            return Err(Error::invalid(format!(
                "x = {x} lies outside [0, {}]",
                self.h_norm
            )));
        }
        Ok(self.eval_unchecked(x))
    }
}

/// `x` with `erfc(x) = p`, for `0 < p < 1`.
fn erfc_inv(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 30.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if erfc(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sine amplitudes `b_j` of the damped square wave for harmonics `2j + 1`.
fn sine_amplitudes(degree: usize, sigma: f64) -> Vec<f64> {
    (0..=degree)
        .map(|j| {
            let k = (2 * j + 1) as f64;
            -2.0 / (PI * k) * exp(-0.5 * k * k * sigma * sigma)
        })
        .collect()
}

/// `1/2 + sum_j b_j sin((2j+1) y)` by the three-term sine recurrence.
fn square_wave(b: &[f64], y: f64) -> f64 {
    let c2 = 2.0 * cos(2.0 * y);
    let (mut prev, mut cur) = (-sin(y), sin(y)); // sin(-y), sin(y)
    let mut sum = 0.5;
    for &bj in b {
        sum += bj * cur;
        let next = c2 * cur - prev;
        prev = cur;
        cur = next;
    }
    sum
}

struct Trial {
    b: Vec<f64>,
    scale: f64,
    err: f64,
}

fn trial(degree: usize, sigma: f64, h_norm: f64, mu: f64, gap: f64) -> Trial {
    let b = sine_amplitudes(degree, sigma);
    let f = |x: f64| square_wave(&b, (x - mu) / h_norm);
    let peak = uniform_grid(0.0, h_norm, VALIDATION_POINTS)
        .map(|x| fabs(f(x)))
        .fold(0.0_f64, f64::max);
    let scale = 1.0 / peak.max(1.0);
    let mut err = 0.0_f64;
    let pass_hi = mu - gap / 2.0;
    if pass_hi >= 0.0 {
        for x in uniform_grid(0.0, pass_hi, VALIDATION_POINTS) {
            err = err.max(fabs(scale * f(x) - 1.0));
        }
    }
    let stop_lo = mu + gap / 2.0;
    if stop_lo <= h_norm {
        for x in uniform_grid(stop_lo, h_norm, VALIDATION_POINTS) {
            err = err.max(fabs(scale * f(x)));
        }
    }
    Trial { b, scale, err }
}

/// Fourier filter within `eps` of one on `[0, mu - gap/2]`, of zero on
/// `[mu + gap/2, |H|]`, and bounded by one on `[0, |H|]`.
pub fn build_heaviside_fourier(h_norm: f64, mu: f64, gap: f64, eps: f64) -> Result<FourierFilter> {
    if !(h_norm > 0.0) || !(gap > 0.0) {
        return Err(Error::invalid("spectral radius and gap must be positive"));
    }
    if !(gap / h_norm < PI / 2.0) {
        return Err(Error::Precondition {
            theorem: "Fourier approximation of the step filter",
            message: format!("needs gap/|H| < pi/2, got {}", gap / h_norm),
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(mu >= 0.0 && mu <= h_norm) {
        return Err(Error::invalid(format!("mu = {mu} lies outside [0, |H|]")));
    }
    // smoothing alone costs eps/4 at the band edges
    let half_width = gap / (2.0 * h_norm);
    let sigma = half_width / (SQRT_2 * erfc_inv(eps / 2.0));

    let run = |d: usize| trial(d, sigma, h_norm, mu, gap);
    let mut lo = 0usize;
    let mut hi = 1usize;
    let mut found = run(hi);
    let mut best_err = found.err;
    while found.err > eps {
        lo = hi;
        if hi >= MAX_DEGREE {
            return Err(Error::Construction {
                message: format!("no odd-harmonic series up to d = {MAX_DEGREE} reaches {eps:e}"),
                best_error: best_err,
                degree: hi,
            });
        }
        hi = (2 * hi).min(MAX_DEGREE);
        found = run(hi);
        best_err = best_err.min(found.err);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = run(mid);
        if t.err <= eps {
            hi = mid;
            found = t;
        } else {
            lo = mid;
        }
    }

    let shift = mu / h_norm;
    let mut coefficients = Vec::with_capacity(2 * hi + 3);
    coefficients.push(Complex64::new(0.5 * found.scale, 0.0));
    for (j, bj) in found.b.iter().enumerate() {
        let k = (2 * j + 1) as f64;
        // b sin(ky) = (b / 2i)(e^{iky} - e^{-iky}); c_k carries the e^{-iky} term
        let half = 0.5 * bj * found.scale;
        coefficients.push(Complex64::new(0.0, half) * unit_phase(k * shift));
        coefficients.push(Complex64::new(0.0, -half) * unit_phase(-k * shift));
    }
    let mut filter = FourierFilter::from_coefficients(h_norm, coefficients, found.err)?;
    filter.eps = found.err;
    Ok(filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::eval_filter;

    #[test]
    fn index_set_shape() {
        assert_eq!(index_set(1), [0, 1, -1, 3, -3]);
    }

    #[test]
    fn erfc_inverse() {
        for p in [1e-6, 1e-2, 0.5] {
            assert!(fabs(erfc(erfc_inv(p)) - p) < 1e-12 * p.max(1e-3));
        }
    }

    #[test]
    fn endpoints_of_the_step() {
        let f = build_heaviside_fourier(20.0, 5.0, 1.0, 1e-2).unwrap();
        let at0 = eval_filter(&f, 0.0).unwrap();
        assert!((at0 - Complex64::new(1.0, 0.0)).norm_sqr() <= 1e-4);
        let at_top = eval_filter(&f, 20.0).unwrap();
        assert!(at_top.norm_sqr() <= 1e-4);
        assert!(f.eps() <= 1e-2);
        assert_eq!(f.indices().len(), 2 * f.degree() + 3);
    }

    #[test]
    fn complex_sum_matches_sine_form() {
        let f = build_heaviside_fourier(20.0, 5.0, 1.0, 1e-3).unwrap();
        let sigma = (1.0 / 40.0) / (SQRT_2 * erfc_inv(5e-4));
        let b = sine_amplitudes(f.degree(), sigma);
        let scale = 2.0 * f.coefficients()[0].re;
        for x in [0.0, 3.3, 5.0, 7.9, 20.0] {
            let direct = eval_filter(&f, x).unwrap();
            let real = scale * square_wave(&b, (x - 5.0) / 20.0);
            assert!(fabs(direct.re - real) < 1e-12 && fabs(direct.im) < 1e-12);
        }
    }

    #[test]
    fn hypothesis_enforced() {
        assert!(matches!(
            build_heaviside_fourier(1.0, 0.5, 1.6, 1e-2),
            Err(Error::Precondition { .. })
        ));
        let f = build_heaviside_fourier(20.0, 5.0, 1.0, 1e-2).unwrap();
        assert!(eval_filter(&f, -1.0).is_err());
    }
}
