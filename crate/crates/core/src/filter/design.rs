//! Two-band even filter design.
//!
//! A filter is designed in the angle `phi = 2 arccos(x)`, where it is the cosine
//! series `sum_{k<=n} a_k cos(k phi)` (degree `d = 2n` in `x`). Each candidate
//! starts from a Gaussian-smoothed step and, for small `n`, is refined towards
//! the weighted minimax fit by Lawson reweighting. The result is scaled so that
//! `|g| <= 1` and then checked on the validation grids.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::{PI, SQRT_2};
use libm::{cos, erfc, exp, fabs, log, sin, sqrt};

use super::{band_error, sup_norm, FilterBands, FilterPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};

/// Pass-band edge of the per-level filter, as an angle: `x >= cos(pi/8)`.
pub const LEVEL_PASS_EDGE: f64 = PI / 4.0;
/// Stop-band edge of the per-level filter, as an angle: `x <= cos(pi/4)`.
pub const LEVEL_STOP_EDGE: f64 = PI / 2.0;
/// Largest degree tried for a per-level filter.
pub const LEVEL_FILTER_MAX_DEGREE: usize = 512;

pub(crate) const CLEANUP_MAX_DEGREE: usize = 1 << 14;
const STANDARD_MAX_DEGREE: usize = 1 << 17;

/// Half-degrees up to which candidates are refined and searched one by one.
const LAWSON_MAX_HALF_DEGREE: usize = 48;
const LAWSON_ITERATIONS: usize = 60;

/// Pass-band errors count double in the fit: rescaling the fit under the cap
/// roughly doubles them afterwards.
const PASS_WEIGHT: f64 = 2.0;

/// Even polynomial for one level of the multi-level pipeline: within
/// `eps_prime` of one for `x >= cos(pi/8)`, of zero for `0 <= x <= cos(pi/4)`.
pub fn build_level_filter(eps_prime: f64) -> Result<FilterPolynomial> {
    if !(eps_prime > 0.0 && eps_prime < 0.5) {
        return Err(Error::invalid(format!(
            "level filter error must lie in (0, 1/2), got {eps_prime}"
        )));
    }
    design_two_band(LEVEL_PASS_EDGE, LEVEL_STOP_EDGE, eps_prime, LEVEL_FILTER_MAX_DEGREE)
}

/// Clean-up filter `h` for evolution time one: `h(cos(lambda/2))` is within
/// `eps` of one for `lambda <= mu - gap/2` and of zero for `mu + gap/2 <= lambda <= pi`.
///
/// Band edges falling outside `[0, pi]` are clamped onto it.
pub fn build_cleanup_filter(mu: f64, gap: f64, eps: f64) -> Result<FilterPolynomial> {
    if !(gap > 0.0 && gap < PI) {
        return Err(Error::invalid(format!("clean-up gap must lie in (0, pi), got {gap}")));
    }
    check_eps(eps)?;
    let pass = (mu - gap / 2.0).max(0.0);
    let stop = (mu + gap / 2.0).min(PI);
    if !(pass < stop) || pass >= PI {
        return Err(Error::invalid(format!(
            "clean-up window [{}, {}] does not fit in [0, pi]",
            mu - gap / 2.0,
            mu + gap / 2.0
        )));
    }
    design_two_band(pass, stop, eps, CLEANUP_MAX_DEGREE)
}

/// Single sharp filter for evolution time `1/|H|`: in the angle `lambda/|H|`
/// the pass band ends at `(mu - gap/2)/|H|` and the stop band starts at
/// `(mu + gap/2)/|H|`.
pub fn build_standard_filter(h_norm: f64, mu: f64, gap: f64, eps: f64) -> Result<FilterPolynomial> {
    if !(h_norm > 0.0) || !(gap > 0.0) {
        return Err(Error::invalid("spectral radius and gap must be positive"));
    }
    check_eps(eps)?;
    let pass = (mu - gap / 2.0).max(0.0) / h_norm;
    let stop = (mu + gap / 2.0) / h_norm;
    if !(stop < PI) {
        return Err(Error::invalid(format!(
            "stop edge {stop} of the normalized spectrum exceeds pi"
        )));
    }
    design_two_band(pass, stop, eps, STANDARD_MAX_DEGREE)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Lowest-degree candidate meeting `eps` on the bands `[0, pass_phi]`, `[stop_phi, pi]`.
///
/// Small half-degrees are scanned in order, so a smaller `eps` never yields a
/// smaller degree there; beyond that the search doubles and then bisects.
pub(crate) fn design_two_band(
    pass_phi: f64,
    stop_phi: f64,
    eps: f64,
    max_degree: usize,
) -> Result<FilterPolynomial> {
    let bands = FilterBands::from_angles(pass_phi, stop_phi)?;
    let max_half = max_degree / 2;
    let mut best = (f64::INFINITY, 0usize);

    let try_half = |n: usize, best: &mut (f64, usize)| -> Option<Vec<f64>> {
        let (coeffs, err) = candidate(n, pass_phi, stop_phi, &bands);
        if err < best.0 {
            *best = (err, 2 * n);
        }
        (err <= eps).then_some(coeffs)
    };

    let scan_top = LAWSON_MAX_HALF_DEGREE.min(max_half);
    for n in 1..=scan_top {
        if let Some(c) = try_half(n, &mut best) {
            return finish(c, bands);
        }
    }

    // doubling, then bisection on the bracket (lo infeasible, hi feasible)
    let mut lo = scan_top;
    let mut hi = None;
    let mut n = scan_top;
    while n < max_half {
        n = (2 * n).min(max_half);
        if let Some(c) = try_half(n, &mut best) {
            hi = Some((n, c));
            break;
        }
        lo = n;
    }
    let Some((mut hi_n, mut hi_c)) = hi else {
        return Err(Error::Construction {
            message: format!(
                "no filter of degree <= {max_degree} reaches {eps:e} on pass [0, {pass_phi}], stop [{stop_phi}, pi]"
            ),
            best_error: best.0,
            degree: best.1,
        });
    };
    while hi_n - lo > 1 {
        let mid = lo + (hi_n - lo) / 2;
        match try_half(mid, &mut best) {
            Some(c) => {
                hi_n = mid;
                hi_c = c;
            }
            None => lo = mid,
        }
    }
    finish(hi_c, bands)
}

fn finish(coeffs: Vec<f64>, bands: FilterBands) -> Result<FilterPolynomial> {
    Ok(FilterPolynomial::from_even_coeffs(coeffs, f64::NAN)?.with_bands(bands))
}

/// Best capped candidate with `n + 1` cosine terms and its validated band error.
fn candidate(n: usize, pass_phi: f64, stop_phi: f64, bands: &FilterBands) -> (Vec<f64>, f64) {
    let seed = capped(smoothed_step(n, pass_phi, stop_phi), bands);
    let seed_err = band_error(&seed, bands);
    if n > LAWSON_MAX_HALF_DEGREE {
        return (seed, seed_err);
    }
    let refined = capped(lawson(n, pass_phi, stop_phi), bands);
    let refined_err = band_error(&refined, bands);
    if refined_err < seed_err {
        (refined, refined_err)
    } else {
        (seed, seed_err)
    }
}

/// Fraction of a fit's own band error kept as headroom below one.
///
/// Phase factors become ill-determined where `|g|` touches one, so capped
/// filters stay slightly inside the unit interval.
const CAP_HEADROOM: f64 = 0.1;

/// Scales the series so that its maximum modulus on `[0, pi]` is at most
/// `1 - CAP_HEADROOM * err`, where `err` is the band error of the raw fit.
fn capped(mut coeffs: Vec<f64>, bands: &FilterBands) -> Vec<f64> {
    let ceiling = 1.0 - CAP_HEADROOM * band_error(&coeffs, bands).min(0.5);
    let m = sup_norm(&coeffs);
    if m > ceiling {
        let s = ceiling / m;
        coeffs.iter_mut().for_each(|c| *c *= s);
    }
    coeffs
}

/// Cosine coefficients of the step at `phi_c = (pass + stop)/2` convolved with
/// a Gaussian of width `sigma`, truncated after `n` harmonics.
fn smoothed_step(n: usize, pass_phi: f64, stop_phi: f64) -> Vec<f64> {
    let center = 0.5 * (pass_phi + stop_phi);
    let half_width = 0.5 * (stop_phi - pass_phi);
    let sigma = seed_width(n, center, half_width);
    let mut a = Vec::with_capacity(n + 1);
    a.push(center / PI);
    for k in 1..=n {
        let kf = k as f64;
        a.push(2.0 * sin(kf * center) / (kf * PI) * exp(-0.5 * kf * kf * sigma * sigma));
    }
    a
}

/// Gaussian width minimizing an a priori bound on the seed error.
fn seed_width(n: usize, center: f64, half_width: f64) -> f64 {
    let image = center.min(PI - center).max(half_width);
    let bound = |sigma: f64| -> f64 {
        let smear = 0.5 * erfc(half_width / (sigma * SQRT_2)) + 0.5 * erfc(image / (sigma * SQRT_2));
        let mut tail = 0.0;
        let mut k = n + 1;
        loop {
            let kf = k as f64;
            let term = exp(-0.5 * kf * kf * sigma * sigma) / kf;
            tail += term;
            if term < 1e-20 * tail.max(1e-300) || term < 1e-300 || k > n + 4_000_000 {
                break;
            }
            k += 1;
        }
        smear + 2.0 / PI * tail
    };
    // golden-section search on log(sigma) around sqrt(half_width / n)
    let centre = log(sqrt(half_width / n as f64).min(1.0));
    let (mut a, mut b) = (centre - log(30.0), centre + log(30.0));
    let r = 0.5 * (sqrt(5.0) - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = bound(exp(x1));
    let mut f2 = bound(exp(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = bound(exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = bound(exp(x2));
        }
    }
    exp(0.5 * (a + b))
}

/// Uniform sample of `[lo, hi]` with `count` points; a single point when the band is empty.
fn band_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if hi - lo <= 0.0 {
        return vec![lo];
    }
    super::uniform_grid(lo, hi, count).collect()
}

/// Weighted minimax fit by Lawson's iteratively reweighted least squares.
fn lawson(n: usize, pass_phi: f64, stop_phi: f64) -> Vec<f64> {
    let count = (3 * (n + 1)).max(32);
    let pass = band_points(0.0, pass_phi, count);
    let stop = band_points(stop_phi, PI, count);
    let pts: Vec<(f64, f64, f64)> = pass
        .iter()
        .map(|&p| (p, 1.0, PASS_WEIGHT))
        .chain(stop.iter().map(|&p| (p, 0.0, 1.0)))
        .collect();
    let m = pts.len();
    let basis: Vec<Vec<f64>> = pts
        .iter()
        .map(|&(phi, _, _)| (0..=n).map(|k| cos(k as f64 * phi)).collect())
        .collect();

    let mut weights = vec![1.0 / m as f64; m];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut a = Matrix::zeros(m, n + 1);
    let mut rhs = vec![0.0; m];
    for _ in 0..LAWSON_ITERATIONS {
        for (i, &(_, target, bw)) in pts.iter().enumerate() {
            let s = sqrt(weights[i]) * bw;
            for (k, b) in basis[i].iter().enumerate() {
                a.set(i, k, s * b);
            }
            rhs[i] = s * target;
        }
        let coeffs = least_squares(&a, &rhs);
        let resid: Vec<f64> = pts
            .iter()
            .zip(&basis)
            .map(|(&(_, target, bw), row)| {
                let v: f64 = row.iter().zip(&coeffs).map(|(b, c)| b * c).sum();
                bw * fabs(v - target)
            })
            .collect();
        let worst = resid.iter().cloned().fold(0.0_f64, f64::max);
        let improved = best.as_ref().is_none_or(|(e, _)| worst < *e);
        if improved {
            best = Some((worst, coeffs));
        }
        let total: f64 = weights.iter().zip(&resid).map(|(w, r)| w * r).sum();
        if !(total > 0.0) {
            break;
        }
        for (w, r) in weights.iter_mut().zip(&resid) {
            *w *= r / total;
        }
    }
    best.map(|(_, c)| c).unwrap_or_else(|| vec![0.0; n + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Filter;

    #[test]
    fn level_filter_meets_bands() {
        let g = build_level_filter(1e-2).unwrap();
        assert!(g.eps_prime() <= 1e-2);
        assert!(g.satisfies_conditions());
        let one = g.eval(1.0).unwrap();
        assert!(fabs(one - 1.0) <= 1e-2);
        assert!(fabs(g.eval(0.5).unwrap()) <= 1e-2);
    }

    #[test]
    fn level_filter_rejects_bad_eps() {
        assert!(build_level_filter(0.0).is_err());
        assert!(build_level_filter(0.5).is_err());
    }

    #[test]
    fn level_filter_cap_reports_failure() {
        match build_level_filter(1e-300) {
            Err(Error::Construction { degree, best_error, .. }) => {
                assert!(degree <= LEVEL_FILTER_MAX_DEGREE);
                assert!(best_error > 1e-300);
            }
            other => panic!("expected construction failure, got {other:?}"),
        }
    }

    #[test]
    fn cleanup_filter_endpoints() {
        let h = build_cleanup_filter(PI / 2.0, PI / 4.0, 1e-3).unwrap();
        assert!(fabs(h.eval(1.0).unwrap() - 1.0) <= 1e-3);
        assert!(fabs(h.eval(0.0).unwrap()) <= 1e-3);
        assert!(h.satisfies_conditions());
    }

    #[test]
    fn cleanup_filter_rejects_bad_gap() {
        assert!(build_cleanup_filter(1.0, 0.0, 1e-2).is_err());
        assert!(build_cleanup_filter(1.0, PI, 1e-2).is_err());
    }

    #[test]
    fn seed_width_balances_terms() {
        let s = seed_width(20, 3.0 * PI / 8.0, PI / 8.0);
        assert!(s > 0.0 && s < 1.0);
    }
}
