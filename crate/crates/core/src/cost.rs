//! Closed-form cost estimates.
//!
//! Every expression is an asymptotic bound evaluated with its implied
//! constants set to one and base-2 logarithms. The numbers are scaling
//! references for comparing methods, not gate counts.

use alloc::format;
use alloc::vec::Vec;

use libm::{ceil, log2, pow};

use crate::error::{Error, Result};
use crate::pipeline::level_schedule;
use crate::spectral::{query_cost, snapped_ceil, FastForwardModel, Regime};

/// Method being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMethod {
    Multilevel,
    Lcu,
    StandardQsp,
}

impl CostMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CostMethod::Multilevel => "multilevel",
            CostMethod::Lcu => "lcu",
            CostMethod::StandardQsp => "standard_qsp",
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub regime: Regime,
    pub h_norm: f64,
    pub gap: f64,
    pub gamma: f64,
    pub eps: f64,
    /// Cutoff time; ignored in the soft regime.
    pub tau: f64,
    pub alpha: f64,
}

impl CostParams {
    fn validate(&self) -> Result<()> {
        let ok = self.h_norm > 0.0
            && self.h_norm.is_finite()
            && self.gap > 0.0
            && self.gap <= self.h_norm
            && self.gamma > 0.0
            && self.gamma <= 1.0
            && self.eps > 0.0
            && self.eps < 1.0
            && self.tau > 0.0
            && (0.0..=1.0).contains(&self.alpha);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("cost parameters out of range: {self:?}")))
        }
    }

    fn model(&self) -> Result<FastForwardModel> {
        match self.regime {
            Regime::TauCutoff => FastForwardModel::new(Regime::TauCutoff, self.tau, self.alpha, 0.0),
            Regime::AlphaSoft => FastForwardModel::alpha_soft(self.alpha),
        }
    }

    /// `log2(1 / (gamma eps))`.
    fn log_inv(&self) -> f64 {
        log2(1.0 / (self.gamma * self.eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub method: CostMethod,
    pub params: CostParams,
    pub oracle_queries: f64,
    pub gate_units: f64,
    pub t_gates: f64,
    pub ancilla: u32,
    /// Queries to the initial-state preparation oracle.
    pub oi_queries: f64,
}

/// Evaluates the cost expression of `method` at `params`.
pub fn estimate(method: CostMethod, params: &CostParams) -> Result<CostEstimate> {
    params.validate()?;
    let model = params.model()?;
    let h = params.h_norm;
    let mut est = CostEstimate {
        method,
        params: *params,
        oracle_queries: 0.0,
        gate_units: 0.0,
        t_gates: 0.0,
        ancilla: 0,
        oi_queries: 1.0 / params.gamma,
    };
    match method {
        CostMethod::Multilevel => {
            let (levels, times) = level_schedule(h, params.gap, params.regime)?;
            let d = params.log_inv();
            for t in times {
                let c = query_cost(t, &model, h)?;
                est.oracle_queries += d * c.queries as f64;
                est.gate_units += d * c.gate_units;
            }
            if params.regime == Regime::TauCutoff {
                let c = query_cost(1.0, &model, h)?;
                let d_cleanup = d / params.gap;
                est.oracle_queries += d_cleanup * c.queries as f64;
                est.gate_units += d_cleanup * c.gate_units;
            }
            est.ancilla = counter_bits(levels) + 1;
        }
        CostMethod::StandardQsp => {
            let d = h / params.gap * params.log_inv();
            let c = query_cost(1.0 / h, &model, h)?;
            est.oracle_queries = d * c.queries as f64;
            est.gate_units = d * c.gate_units;
            est.ancilla = 2;
        }
        CostMethod::Lcu => {
            let d0 = h / params.gap * params.log_inv();
            let one_norm = log2(d0).max(1.0);
            let eps_tilde = params.gamma * params.eps / one_norm;
            let d = h / params.gap * log2(1.0 / eps_tilde);
            let top = snapped_ceil(log2(2.0 * d + 1.0));
            for l in 0..=top {
                let c = query_cost(pow(2.0, l as f64) / h, &model, h)?;
                est.oracle_queries += 2.0 * c.queries as f64;
                est.gate_units += 2.0 * c.gate_units;
            }
            est.t_gates = (d + log2(1.0 / eps_tilde)) / params.gamma;
            est.ancilla = ceil(log2(h / (params.gap * params.gamma * params.eps))).max(0.0) as u32;
        }
    }
    Ok(est)
}

fn counter_bits(levels: usize) -> u32 {
    (levels + 2).next_power_of_two().trailing_zeros()
}

/// Estimates for every method at every grid point, grid-major.
pub fn scaling_table(methods: &[CostMethod], grid: &[CostParams]) -> Result<Vec<CostEstimate>> {
    if methods.is_empty() || grid.is_empty() {
        return Err(Error::invalid("scaling table needs at least one method and one grid point"));
    }
    let mut rows = Vec::with_capacity(methods.len() * grid.len());
    for p in grid {
        for &m in methods {
            rows.push(estimate(m, p)?);
        }
    }
    Ok(rows)
}

/// Trotter steps `ceil((c_t q / eps)^(1/p))` so that `q` queries, each with
/// error `c_t r^{-p}`, stay within `eps` in total.
pub fn trotter_steps(c_t: f64, queries: f64, eps: f64, order: u32) -> Result<u64> {
    if !(c_t > 0.0) || !(queries > 0.0) || !(eps > 0.0) || order == 0 {
        return Err(Error::invalid("Trotter inversion needs positive c_t, q, eps and order"));
    }
    Ok(snapped_ceil(pow(c_t * queries / eps, 1.0 / order as f64)).max(1))
}
