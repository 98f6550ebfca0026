//! Symmetric phase factors by damped Gauss-Newton (Levenberg-Marquardt).
//!
//! Unknowns are the first half `(varphi_0, ..., varphi_{d/2})` of a symmetric
//! QSP phase vector; residuals are `g_Phi(x_j) - f(x_j)` at the positive
//! Chebyshev nodes `x_j = cos((2j - 1) pi / (4 (d/2 + 1)))`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_4, PI};
use libm::{cos, fabs, sqrt};

use super::{induced_value, PhaseConvention, PhaseFactorSet};
use crate::error::{Error, Result};
use crate::filter::{FilterPolynomial, VALIDATION_SLACK};
use crate::linalg::{least_squares, Matrix};

pub const SOLVER_MAX_ITERATIONS: usize = 500;
const FD_STEP: f64 = 1e-7;

/// Solved phases plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// QSP-convention phases.
    pub phases: PhaseFactorSet,
    /// `max_j |g_Phi(x_j) - f(x_j)|` at the nodes.
    pub residual: f64,
    pub iterations: usize,
}

fn full_phases(half: &[f64]) -> Vec<f64> {
    let mut p = half.to_vec();
    p.extend(half.iter().rev().skip(1));
    p
}

fn residuals(half: &[f64], nodes: &[f64], target: &[f64]) -> Vec<f64> {
    let phases = full_phases(half);
    nodes
        .iter()
        .zip(target)
        .map(|(&x, &f)| induced_value(&phases, x) - f)
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, r| m.max(fabs(*r)))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}

/// Symmetric QSP phases whose induced polynomial matches `target` to `tol` at
/// the `d/2 + 1` positive Chebyshev nodes.
///
/// Targets exceeding one in modulus cannot be realized and are rejected.
pub fn solve_symmetric_phase_factors(target: &FilterPolynomial, tol: f64) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let peak = target.max_abs();
    if peak > 1.0 + VALIDATION_SLACK {
        return Err(Error::Precondition {
            theorem: "symmetric phase factors",
            message: format!("target must satisfy |g| <= 1 on [-1, 1], max is {peak}"),
        });
    }
    let n = target.degree() / 2 + 1;
    let nodes: Vec<f64> = (1..=n)
        .map(|j| cos((2 * j - 1) as f64 * PI / (4 * n) as f64))
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| target.eval_unchecked(x)).collect();

    let mut half = vec![0.0; n];
    half[0] = FRAC_PI_4;
    let mut r = residuals(&half, &nodes, &values);
    let mut cost = sum_sq(&r);
    let mut damping = 1e-3;
    let mut jac = Matrix::zeros(2 * n, n);
    let mut rhs = vec![0.0; 2 * n];

    for iteration in 0..SOLVER_MAX_ITERATIONS {
        if max_abs(&r) <= tol {
            return finish(half, max_abs(&r), iteration);
        }
        for c in 0..n {
            let mut plus = half.clone();
            let mut minus = half.clone();
            plus[c] += FD_STEP;
            minus[c] -= FD_STEP;
            let rp = residuals(&plus, &nodes, &values);
            let rm = residuals(&minus, &nodes, &values);
            for row in 0..n {
                jac.set(row, c, (rp[row] - rm[row]) / (2.0 * FD_STEP));
            }
        }
        // a damped step solves [J; sqrt(mu) I] s = [-r; 0] in the least-squares sense
        let mut accepted = false;
        for _ in 0..30 {
            let root = sqrt(damping);
            for row in 0..n {
                for c in 0..n {
                    jac.set(n + row, c, if row == c { root } else { 0.0 });
                }
                rhs[row] = -r[row];
                rhs[n + row] = 0.0;
            }
            let step = least_squares(&jac, &rhs);
            let trial: Vec<f64> = half.iter().zip(&step).map(|(h, s)| h + s).collect();
            let tr = residuals(&trial, &nodes, &values);
            let tc = sum_sq(&tr);
            if tc < cost {
                half = trial;
                r = tr;
                cost = tc;
                damping = (damping * 0.3).max(1e-15);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let best = max_abs(&r);
    if best <= tol {
        return finish(half, best, SOLVER_MAX_ITERATIONS);
    }
    Err(Error::Solver {
        iterations: SOLVER_MAX_ITERATIONS,
        best_residual: best,
    })
}

fn finish(half: Vec<f64>, residual: f64, iterations: usize) -> Result<SolveReport> {
    Ok(SolveReport {
        phases: PhaseFactorSet::from_half(&half, PhaseConvention::Qsp)?,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsp::{golden_phase_table, induced_polynomial, qsp_unitary};

    #[test]
    fn chebyshev_t2_target() {
        let t2 = FilterPolynomial::from_even_coeffs(vec![0.0, 1.0], f64::NAN).unwrap();
        let sol = solve_symmetric_phase_factors(&t2, 1e-10).unwrap();
        assert!(sol.residual <= 1e-10);
        let q = sol.phases.phases();
        for j in 1..=2 {
            let x = cos((2 * j - 1) as f64 * PI / 8.0);
            let g = qsp_unitary(q, x).unwrap().entry(0, 0).re;
            assert!(fabs(g - (2.0 * x * x - 1.0)) <= 1e-10);
        }
    }

    #[test]
    fn golden_target_resolved() {
        let target = induced_polynomial(&golden_phase_table()).unwrap();
        let sol = solve_symmetric_phase_factors(&target, 1e-10).unwrap();
        assert!(sol.residual <= 1e-8);
        for x in [0.1, 0.5, 0.8, 0.97] {
            assert!(fabs(sol.phases.eval(x).unwrap() - target.eval_unchecked(x)) < 1e-8);
        }
    }

    #[test]
    fn constant_target() {
        let c = FilterPolynomial::from_even_coeffs(vec![0.25], f64::NAN).unwrap();
        let sol = solve_symmetric_phase_factors(&c, 1e-12).unwrap();
        assert!(fabs(cos(sol.phases.phases()[0]) - 0.25) <= 1e-12);
    }

    #[test]
    fn oversized_target_rejected() {
        let big = FilterPolynomial::from_even_coeffs(vec![0.0, 1.5], f64::NAN).unwrap();
        assert!(matches!(
            solve_symmetric_phase_factors(&big, 1e-10),
            Err(Error::Precondition { .. })
        ));
    }
}
