//! Coherent multi-level run with a success counter.
//!
//! The counter starts at the number of stages. After each QETU stage the
//! counter is decremented on the branch where the QETU ancilla reads `|0>`, so
//! it reads zero exactly on the branch where every stage succeeded. Both
//! ancilla branches are kept, which keeps the simulation norm exact.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{amplification_rounds, check_dims, trace_row, LevelState, Method, MultilevelPlan, RunReport};
use crate::error::{Error, Result};
use crate::qsp::{qetu_circuit, Su2};
use crate::spectral::{query_cost, FastForwardModel, InitialState, QueryLedger, SpectralHamiltonian};

/// `ceil(log2(levels + 2))`: counter qubits for `levels` filtering levels plus clean-up.
pub fn counter_width(levels: usize) -> u32 {
    (levels + 2).next_power_of_two().trailing_zeros()
}

/// Counter value after stages with the given outcomes (`true` = ancilla read `|0>`),
/// starting from `flags.len()` and decrementing modulo `2^width` on success.
pub fn counter_after(flags: &[bool], width: u32) -> usize {
    let modulus = 1usize << width;
    flags
        .iter()
        .fold(flags.len() % modulus, |c, &ok| if ok { (c + modulus - 1) % modulus } else { c })
}

/// Joint amplitudes over (counter value, QETU ancilla bit, eigenvector).
#[derive(Debug, Clone, PartialEq)]
pub struct CounterRegister {
    width: u32,
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl CounterRegister {
    /// Counter at `initial`, ancilla in `|0>`, system in `system`.
    pub fn new(width: u32, initial: usize, system: &[Complex64]) -> Result<Self> {
        if width == 0 || width > 16 {
            return Err(Error::invalid("counter width must lie in 1..=16"));
        }
        if initial >= 1usize << width {
            return Err(Error::invalid("initial counter value does not fit in the register"));
        }
        let dim = system.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); (2usize << width) * dim];
        let base = Self::offset(dim, initial, 0);
        amplitudes[base..base + dim].copy_from_slice(system);
        Ok(CounterRegister { width, dim, amplitudes })
    }

    fn offset(dim: usize, counter: usize, bit: usize) -> usize {
        ((counter << 1) | bit) * dim
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// System amplitudes on the branch with the given counter value and ancilla bit.
    pub fn component(&self, counter: usize, bit: usize) -> &[Complex64] {
        let o = Self::offset(self.dim, counter, bit);
        &self.amplitudes[o..o + self.dim]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each counter value.
    pub fn counter_distribution(&self) -> Vec<f64> {
        (0..1usize << self.width)
            .map(|c| {
                (0..2)
                    .map(|b| self.component(c, b).iter().map(|a| a.norm_sqr()).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    /// Applies `stage(k)` to the ancilla alongside eigenvector `k`, then
    /// decrements the counter wherever the ancilla is `|0>`.
    pub fn apply_stage(&mut self, stage: impl Fn(usize) -> Su2) {
        let modulus = 1usize << self.width;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let unitaries: Vec<Su2> = (0..self.dim).map(&stage).collect();
        for c in 0..modulus {
            for b in 0..2 {
                let src = Self::offset(self.dim, c, b);
                for k in 0..self.dim {
                    let a = self.amplitudes[src + k];
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let u = &unitaries[k];
                    for nb in 0..2 {
                        let nc = if nb == 0 { (c + modulus - 1) % modulus } else { c };
                        out[Self::offset(self.dim, nc, nb) + k] += u.entry(nb, b) * a;
                    }
                }
            }
        }
        self.amplitudes = out;
    }
}

/// Result of a coherent run: the report (built from the all-success branch)
/// and the final joint register.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentRun {
    pub report: RunReport,
    pub register: CounterRegister,
}

/// Runs every stage coherently with the counter register; the reported final
/// state is the branch with counter zero and ancilla `|0>`.
pub fn run_multilevel_coherent(
    h: &SpectralHamiltonian,
    init: &InitialState,
    plan: &MultilevelPlan,
    model: &FastForwardModel,
) -> Result<CoherentRun> {
    check_dims(h, init)?;
    let hs = plan.shifted(h)?;
    let stages = plan.stages();
    let width = counter_width(plan.levels());
    let mut register = CounterRegister::new(width, stages.len(), init.amplitudes())?;
    let mut ledger = QueryLedger::new(model.delta());
    ledger.charge_initial_state();
    ledger.note_ancillas(width + 1);
    let eigs = hs.eigenvalues();
    let mut trace = Vec::new();
    let mut degrees = Vec::new();
    for (level, (filter, t)) in stages.iter().enumerate() {
        let phases = filter
            .qetu_phases()
            .ok_or_else(|| Error::invalid("coherent runs need phase factors for every stage"))?;
        register.apply_stage(|k| qetu_circuit(&phases, *t, eigs[k], &[]));
        ledger.charge(query_cost(*t, model, hs.spectral_radius())?, filter.degree() as u64);
        // the trace follows the branch on which every stage so far succeeded
        let remaining = stages.len() - level - 1;
        let state = LevelState::from_amplitudes(register.component(remaining, 0).to_vec(), level + 1);
        trace.push(trace_row(&state, *t, &ledger));
        degrees.push(filter.degree());
    }
    let state = LevelState::from_amplitudes(register.component(0, 0).to_vec(), stages.len());
    let mut report = RunReport::finish(
        Method::MultilevelCoherent,
        state,
        ledger,
        trace,
        plan.shift(),
        degrees,
        plan.warnings().to_vec(),
    );
    report.amplification_rounds = Some(amplification_rounds(report.success_probability));
    Ok(CoherentRun { report, register })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_examples() {
        assert_eq!(counter_width(4), 3);
        assert_eq!(counter_width(1), 2);
        assert_eq!(counter_width(2), 2);
        assert_eq!(counter_width(6), 3);
        assert_eq!(counter_width(7), 4);
    }

    #[test]
    fn counter_zero_iff_all_success() {
        for stages in 1..=5usize {
            let width = counter_width(stages - 1);
            for mask in 0..1u32 << stages {
                let flags: Vec<bool> = (0..stages).map(|i| mask >> i & 1 == 1).collect();
                let all = flags.iter().all(|&f| f);
                assert_eq!(counter_after(&flags, width) == 0, all, "{flags:?}");
            }
        }
    }

    #[test]
    fn register_preserves_norm() {
        let sys = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let mut reg = CounterRegister::new(2, 3, &sys).unwrap();
        reg.apply_stage(|k| Su2::x_rotation(0.3 + k as f64));
        reg.apply_stage(|_| Su2::z_rotation(1.1) * Su2::x_rotation(0.7));
        assert!((reg.norm_sq() - 1.0).abs() < 1e-12);
    }
}
