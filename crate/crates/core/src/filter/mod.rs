//! Filter functions: even Chebyshev polynomials for QETU levels and the
//! clean-up stage, and odd-harmonic Fourier series for the LCU baseline.
//!
//! Polynomial filters live on `x in [-1, 1]` and are stored by their even
//! Chebyshev coefficients `g(x) = sum_k a_k T_{2k}(x)`. With `x = cos(phi / 2)`
//! this is the cosine series `sum_k a_k cos(k phi)` on `phi in [0, pi]` (the
//! other half of the `x` domain mirrors it), which is how the design routines
//! see it.

mod design;
pub(crate) mod fft;
mod fourier;

use alloc::format;
use alloc::vec::Vec;

use libm::{acos, cos, fabs};
use crate::error::{Error, Result};

pub(crate) use design::{design_two_band, CLEANUP_MAX_DEGREE};
pub use design::{
    build_cleanup_filter, build_level_filter, build_standard_filter, LEVEL_FILTER_MAX_DEGREE,
    LEVEL_PASS_EDGE, LEVEL_STOP_EDGE,
};
pub use fourier::{build_heaviside_fourier, FourierFilter};

/// Points per interval on the uniform validation grids.
pub const VALIDATION_POINTS: usize = 10_000;

/// Slack allowed over the stated bounds when checking a filter on a grid.
pub const VALIDATION_SLACK: f64 = 1e-10;

/// Pass band and stop band of a two-band filter, as intervals of `x` inside `[0, 1]`.
///
/// The filter should be close to one on `pass` and close to zero on `stop`;
/// evenness mirrors both onto `[-1, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterBands {
    pub pass: (f64, f64),
    pub stop: (f64, f64),
}

impl FilterBands {
    /// Bands given as angles: pass for `phi in [0, pass_phi]`, stop for
    /// `phi in [stop_phi, pi]`, where `x = cos(phi / 2)`.
    pub fn from_angles(pass_phi: f64, stop_phi: f64) -> Result<Self> {
        let pi = core::f64::consts::PI;
        if !(0.0..pi).contains(&pass_phi) || !(stop_phi > pass_phi && stop_phi <= pi) {
            return Err(Error::invalid(format!(
                "band angles must satisfy 0 <= pass < stop <= pi (pass {pass_phi}, stop {stop_phi})"
            )));
        }
        Ok(FilterBands {
            pass: (cos(pass_phi / 2.0), 1.0),
            stop: (0.0, cos(stop_phi / 2.0)),
        })
    }

    /// `(pass_phi, stop_phi)`.
    pub fn angles(&self) -> (f64, f64) {
        (2.0 * acos(self.pass.0), 2.0 * acos(self.stop.1))
    }
}

/// Scalar filter that can be evaluated pointwise.
pub trait Filter {
    type Output;

    /// Evaluates the filter at `x`, rejecting points outside its natural domain.
    fn eval(&self, x: f64) -> Result<Self::Output>;
}

/// Evaluates any filter at `x`.
pub fn eval_filter<F: Filter + ?Sized>(filter: &F, x: f64) -> Result<F::Output> {
    filter.eval(x)
}

/// Real even polynomial on `[-1, 1]` in the even Chebyshev basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPolynomial {
    coeffs: Vec<f64>,
    eps_prime: f64,
    bands: Option<FilterBands>,
}

impl FilterPolynomial {
    /// Wraps coefficients of `T_0, T_2, ..., T_d`. `eps_prime` is the error
    /// the caller claims for it (NaN when unknown).
    pub fn from_even_coeffs(coeffs: Vec<f64>, eps_prime: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("filter polynomial needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("filter coefficients must be finite"));
        }
        Ok(FilterPolynomial {
            coeffs,
            eps_prime,
            bands: None,
        })
    }

    /// Attaches bands and recomputes the achieved error on them.
    pub fn with_bands(mut self, bands: FilterBands) -> Self {
        self.eps_prime = band_error(&self.coeffs, &bands);
        self.bands = Some(bands);
        self
    }

    /// Coefficients of `T_0, T_2, ..., T_d`.
    pub fn chebyshev_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        2 * (self.coeffs.len() - 1)
    }

    /// Achieved uniform error on the attached bands.
    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn bands(&self) -> Option<&FilterBands> {
        self.bands.as_ref()
    }

    /// Clenshaw evaluation without the domain check.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        clenshaw_even(&self.coeffs, x)
    }

    /// `max |g|` on the validation grids over `[0, 1]` (evenness covers `[-1, 0]`).
    pub fn max_abs(&self) -> f64 {
        sup_norm(&self.coeffs)
    }

    /// Checks `|g| <= 1` and, when bands are attached, the band conditions at
    /// the recorded `eps_prime`, both with [`VALIDATION_SLACK`].
    pub fn satisfies_conditions(&self) -> bool {
        if self.max_abs() > 1.0 + VALIDATION_SLACK {
            return false;
        }
        match &self.bands {
            Some(b) => band_error(&self.coeffs, b) <= self.eps_prime + VALIDATION_SLACK,
            None => true,
        }
    }
}

impl Filter for FilterPolynomial {
    type Output = f64;

    fn eval(&self, x: f64) -> Result<f64> {
        if !(fabs(x) <= 1.0 + 1e-12) {
            return Err(Error::invalid(format!("x = {x} lies outside [-1, 1]")));
        }
        Ok(self.eval_unchecked(x.clamp(-1.0, 1.0)))
    }
}

/// `sum_k a_k T_{2k}(x)` via Clenshaw on `T_k(2x^2 - 1)`.
pub(crate) fn clenshaw_even(coeffs: &[f64], x: f64) -> f64 {
    let y = 2.0 * x * x - 1.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &a in coeffs.iter().skip(1).rev() {
        let b0 = a + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + y * b1 - b2
}

/// Uniform grid of `n` points on `[lo, hi]`, endpoints included.
pub(crate) fn uniform_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

/// Degree up to which the `x`-uniform validation grids are evaluated directly.
const DIRECT_GRID_MAX_DEGREE: usize = 1024;

/// Size of the angle grid: at least 2^14 points and 16 per period of the top harmonic.
fn angle_grid_size(n_coeffs: usize) -> usize {
    (16 * n_coeffs).max(1 << 14)
}

/// Values on the angle grid `phi_j = pi j / m`, `x_j = cos(phi_j / 2)`.
fn angle_grid(coeffs: &[f64]) -> (usize, Vec<f64>) {
    fft::cosine_series_on_grid(coeffs, angle_grid_size(coeffs.len()))
}

/// Max of `|g|` over both validation grids.
pub(crate) fn sup_norm(coeffs: &[f64]) -> f64 {
    let (_, vals) = angle_grid(coeffs);
    let mut best = vals.iter().fold(0.0_f64, |m, v| m.max(fabs(*v)));
    if 2 * (coeffs.len() - 1) <= DIRECT_GRID_MAX_DEGREE {
        for x in uniform_grid(0.0, 1.0, VALIDATION_POINTS) {
            best = best.max(fabs(clenshaw_even(coeffs, x)));
        }
    }
    best
}

/// `max(max_pass |g - 1|, max_stop |g|)` over both validation grids.
pub(crate) fn band_error(coeffs: &[f64], bands: &FilterBands) -> f64 {
    let (pass_phi, stop_phi) = bands.angles();
    let (m, vals) = angle_grid(coeffs);
    let pi = core::f64::consts::PI;
    let mut err = 0.0_f64;
    for (j, v) in vals.iter().enumerate() {
        let phi = pi * j as f64 / m as f64;
        if phi <= pass_phi {
            err = err.max(fabs(v - 1.0));
        } else if phi >= stop_phi {
            err = err.max(fabs(*v));
        }
    }
    // the band edges themselves are always checked
    err = err.max(fabs(clenshaw_even(coeffs, bands.pass.0) - 1.0));
    err = err.max(fabs(clenshaw_even(coeffs, bands.stop.1)));
    if 2 * (coeffs.len() - 1) <= DIRECT_GRID_MAX_DEGREE {
        for x in uniform_grid(bands.pass.0, bands.pass.1, VALIDATION_POINTS) {
            err = err.max(fabs(clenshaw_even(coeffs, x) - 1.0));
        }
        for x in uniform_grid(bands.stop.0, bands.stop.1, VALIDATION_POINTS) {
            err = err.max(fabs(clenshaw_even(coeffs, x)));
        }
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_polynomial_is_zero() {
        let p = FilterPolynomial::from_even_coeffs(vec![0.0; 4], f64::NAN).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(eval_filter(&p, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn t2_at_one() {
        let p = FilterPolynomial::from_even_coeffs(vec![0.0, 1.0], f64::NAN).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(fabs(eval_filter(&p, 1.0).unwrap() - 1.0) < 1e-15);
        assert!(fabs(eval_filter(&p, 0.5).unwrap() + 0.5) < 1e-15);
    }

    #[test]
    fn out_of_domain_rejected() {
        let p = FilterPolynomial::from_even_coeffs(vec![1.0], f64::NAN).unwrap();
        assert!(matches!(eval_filter(&p, 1.5), Err(Error::InvalidArgument(_))));
        assert!(eval_filter(&p, f64::NAN).is_err());
    }

    #[test]
    fn matches_monomial_expansion() {
        // T_0, T_2, T_4, T_6, T_8 in powers of x, from T_{n+1} = 2x T_n - T_{n-1}
        let mut t: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
        for n in 1..8 {
            let mut next = vec![0.0; n + 2];
            for (i, c) in t[n].iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, c) in t[n - 1].iter().enumerate() {
                next[i] -= c;
            }
            t.push(next);
        }
        let coeffs = [0.31, -0.72, 0.15, 0.44, -0.23];
        let mut mono = [0.0; 9];
        for (k, a) in coeffs.iter().enumerate() {
            for (i, c) in t[2 * k].iter().enumerate() {
                mono[i] += a * c;
            }
        }
        let x = 0.3_f64;
        let naive: f64 = mono.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let p = FilterPolynomial::from_even_coeffs(coeffs.to_vec(), f64::NAN).unwrap();
        assert!(fabs(p.eval(x).unwrap() - naive) < 1e-12);
    }

    #[test]
    fn bands_round_trip_angles() {
        let b = FilterBands::from_angles(0.25, 1.5).unwrap();
        let (p, s) = b.angles();
        assert!(fabs(p - 0.25) < 1e-12 && fabs(s - 1.5) < 1e-12);
        assert!(FilterBands::from_angles(1.0, 0.5).is_err());
    }
}
