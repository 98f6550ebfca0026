//! Spectral Hamiltonian model, fast-forwarded evolution oracle and query bookkeeping.

use alloc::format;
use alloc::vec::Vec;

use libm::{ceil, cos, fabs, pow, round, sin, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative slack used when checking the gap window after arithmetic shifts.
const WINDOW_SLACK: f64 = 1e-12;

/// A Hamiltonian described by its spectrum, with the gap window `(mu, gap)`
/// separating the ground energy from the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralHamiltonian {
    eigenvalues: Vec<f64>,
    spectral_radius: f64,
    mu: f64,
    gap: f64,
    shift: f64,
}

impl SpectralHamiltonian {
    /// Builds a Hamiltonian whose spectral radius is its largest eigenvalue.
    pub fn new(eigenvalues: Vec<f64>, mu: f64, gap: f64) -> Result<Self> {
        let radius = eigenvalues.iter().copied().fold(0.0_f64, f64::max);
        Self::with_spectral_radius(eigenvalues, mu, gap, radius)
    }

    /// Builds a Hamiltonian with an explicit upper bound `spectral_radius`
    /// on its eigenvalues.
    pub fn with_spectral_radius(
        eigenvalues: Vec<f64>,
        mu: f64,
        gap: f64,
        spectral_radius: f64,
    ) -> Result<Self> {
        let h = SpectralHamiltonian {
            eigenvalues,
            spectral_radius,
            mu,
            gap,
            shift: 0.0,
        };
        h.validate()?;
        Ok(h)
    }

    /// `n` equally spaced eigenvalues `0, max/(n-1), ..., max`.
    pub fn equally_spaced(n: usize, max: f64, mu: f64, gap: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("equally spaced spectrum needs at least two levels"));
        }
        let step = max / (n - 1) as f64;
        let eigs = (0..n).map(|k| k as f64 * step).collect();
        Self::new(eigs, mu, gap)
    }

    fn validate(&self) -> Result<()> {
        let eigs = &self.eigenvalues;
        if eigs.is_empty() {
            return Err(Error::invalid("spectrum is empty"));
        }
        if eigs.iter().any(|l| !l.is_finite()) || !self.mu.is_finite() || !self.gap.is_finite() {
            return Err(Error::invalid("spectrum and gap window must be finite"));
        }
        if !(self.spectral_radius > 0.0) || !self.spectral_radius.is_finite() {
            return Err(Error::invalid("spectral radius must be positive and finite"));
        }
        if !(self.gap > 0.0) {
            return Err(Error::invalid(format!("gap must be positive, got {}", self.gap)));
        }
        let scale = self.spectral_radius.max(1.0);
        let tol = WINDOW_SLACK * scale;
        for (k, &l) in eigs.iter().enumerate() {
            if l < 0.0 {
                return Err(Error::Domain(format!("eigenvalue {k} is negative ({l})")));
            }
            if l > self.spectral_radius + tol {
                return Err(Error::invalid(format!(
                    "eigenvalue {k} ({l}) exceeds the spectral radius {}",
                    self.spectral_radius
                )));
            }
        }
        if eigs.windows(2).skip(1).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("eigenvalues must be listed in nondecreasing order"));
        }
        if eigs.len() > 1 && !(eigs[0] < eigs[1]) {
            return Err(Error::invalid("ground state is degenerate (lambda_0 must be < lambda_1)"));
        }
        if eigs[0] > self.mu - self.gap / 2.0 + tol {
            return Err(Error::invalid(format!(
                "ground energy {} lies above mu - gap/2 = {}",
                eigs[0],
                self.mu - self.gap / 2.0
            )));
        }
        if eigs.len() > 1 && eigs[1] < self.mu + self.gap / 2.0 - tol {
            return Err(Error::invalid(format!(
                "first excited energy {} lies below mu + gap/2 = {}",
                eigs[1],
                self.mu + self.gap / 2.0
            )));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Total offset applied through [`shift_spectrum`] since construction.
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

/// Adds `offset` to every eigenvalue and to `mu`.
///
/// The spectral-radius bound moves with the spectrum. Any offset that would
/// make an eigenvalue negative is a domain error.
pub fn shift_spectrum(h: &SpectralHamiltonian, offset: f64) -> Result<SpectralHamiltonian> {
    if !offset.is_finite() {
        return Err(Error::invalid("shift offset must be finite"));
    }
    if h.ground_energy() + offset < 0.0 {
        return Err(Error::Domain(format!(
            "offset {offset} makes the ground energy {} negative",
            h.ground_energy() + offset
        )));
    }
    let shifted = SpectralHamiltonian {
        eigenvalues: h.eigenvalues.iter().map(|l| l + offset).collect(),
        spectral_radius: h.spectral_radius + offset,
        mu: h.mu + offset,
        gap: h.gap,
        shift: h.shift + offset,
    };
    shifted.validate()?;
    Ok(shifted)
}

/// `exp(-i lambda_k t)` for every eigenvalue.
pub fn evolution_phases(h: &SpectralHamiltonian, t: f64) -> Vec<Complex64> {
    h.eigenvalues.iter().map(|&l| unit_phase(-l * t)).collect()
}

/// `exp(i theta)`.
pub(crate) fn unit_phase(theta: f64) -> Complex64 {
    Complex64::new(cos(theta), sin(theta))
}

/// A normalized initial guess, expanded in the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    amplitudes: Vec<Complex64>,
}

impl InitialState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("initial state has no amplitudes"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if fabs(norm_sq - 1.0) > 1e-12 {
            return Err(Error::invalid(format!(
                "initial state is not normalized (|phi|^2 = {norm_sq})"
            )));
        }
        if amplitudes[0].norm_sqr() == 0.0 {
            return Err(Error::invalid("initial state has zero overlap with the ground state"));
        }
        Ok(InitialState { amplitudes })
    }

    /// Equal weight `1/sqrt(n)` on every eigenstate.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("initial state has no amplitudes"));
        }
        let a = 1.0 / sqrt(n as f64);
        Self::new(alloc::vec![Complex64::new(a, 0.0); n])
    }

    /// Ground amplitude `gamma`, the remaining weight spread evenly over the
    /// excited states.
    pub fn with_overlap(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("overlap must lie in (0, 1], got {gamma}")));
        }
        if n == 1 {
            return Self::new(alloc::vec![Complex64::new(1.0, 0.0)]);
        }
        if gamma == 1.0 {
            let mut v = alloc::vec![Complex64::new(0.0, 0.0); n];
            v[0] = Complex64::new(1.0, 0.0);
            return Self::new(v);
        }
        let rest = sqrt((1.0 - gamma * gamma) / (n - 1) as f64);
        let mut v = alloc::vec![Complex64::new(rest, 0.0); n];
        v[0] = Complex64::new(gamma, 0.0);
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `gamma = |alpha_0|`.
    pub fn overlap(&self) -> f64 {
        sqrt(self.amplitudes[0].norm_sqr())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Which fast-forwarding regime governs query and gate accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Evolution is accurate up to a cutoff time `tau`; longer times are stitched
    /// from `ceil(t / tau)` queries.
    TauCutoff,
    /// Every evolution the algorithm needs fits under the cutoff and costs
    /// `(t * |H|)^alpha` gates.
    AlphaSoft,
}

/// Fast-forwarded evolution oracle with cutoff `tau`, gate exponent `alpha` and
/// per-query operator-norm accuracy `delta`.
///
/// `tau` is always caller supplied and never derived from `|H|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastForwardModel {
    tau: f64,
    alpha: f64,
    delta: f64,
    regime: Regime,
}

impl FastForwardModel {
    pub fn new(regime: Regime, tau: f64, alpha: f64, delta: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!("cutoff tau must be positive, got {tau}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid(format!("delta must be a finite nonnegative number, got {delta}")));
        }
        Ok(FastForwardModel {
            tau,
            alpha,
            delta,
            regime,
        })
    }

    /// Cutoff model with constant-cost short-time evolution (`alpha = 0`).
    pub fn tau_cutoff(tau: f64) -> Result<Self> {
        Self::new(Regime::TauCutoff, tau, 0.0, 0.0)
    }

    /// Soft model with unbounded cutoff.
    pub fn alpha_soft(alpha: f64) -> Result<Self> {
        Self::new(Regime::AlphaSoft, f64::INFINITY, alpha, 0.0)
    }

    /// Ideal fast-forwarding: any evolution time in one constant-cost query.
    pub fn ideal() -> Self {
        FastForwardModel {
            tau: f64::INFINITY,
            alpha: 0.0,
            delta: 0.0,
            regime: Regime::TauCutoff,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid(format!("delta must be a finite nonnegative number, got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

/// Oracle queries and gate units for one evolution segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryCost {
    pub queries: u64,
    pub gate_units: f64,
}

/// `ceil(x)`, snapping values within a relative `1e-9` of an integer onto it
/// so that e.g. `0.3 / 0.1` counts as three steps.
pub(crate) fn snapped_ceil(x: f64) -> u64 {
    let r = round(x);
    if fabs(x - r) <= 1e-9 * x.max(1.0) {
        r as u64
    } else {
        ceil(x) as u64
    }
}

/// Cost of evolving for time `t` under `model` on a Hamiltonian of norm `h_norm`.
///
/// In the cutoff regime the evolution is split into `r = ceil(t / tau)` equal
/// queries, each costing `(t/r * |H|)^alpha` gates. In the soft regime a single
/// query suffices (`t <= tau` is required) and costs `(t * |H|)^alpha`.
pub fn query_cost(t: f64, model: &FastForwardModel, h_norm: f64) -> Result<QueryCost> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("evolution time must be positive, got {t}")));
    }
    if !(h_norm > 0.0) {
        return Err(Error::invalid(format!("spectral radius must be positive, got {h_norm}")));
    }
    match model.regime {
        Regime::TauCutoff => {
            let r = snapped_ceil(t / model.tau).max(1);
            let per_query = pow(t / r as f64 * h_norm, model.alpha);
            Ok(QueryCost {
                queries: r,
                gate_units: r as f64 * per_query,
            })
        }
        Regime::AlphaSoft => {
            if t > model.tau {
                return Err(Error::invalid(format!(
                    "alpha-soft model needs t <= tau (t = {t}, tau = {})",
                    model.tau
                )));
            }
            Ok(QueryCost {
                queries: 1,
                gate_units: pow(t * h_norm, model.alpha),
            })
        }
    }
}

/// Running tallies for one run. All counters only grow.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryLedger {
    oracle_queries: u64,
    gate_units: f64,
    initial_state_queries: u64,
    ancilla_qubits: u32,
    delta: f64,
}

impl QueryLedger {
    pub fn new(delta: f64) -> Self {
        QueryLedger {
            oracle_queries: 0,
            gate_units: 0.0,
            initial_state_queries: 0,
            ancilla_qubits: 0,
            delta,
        }
    }

    /// Debits `repeats` evolution segments of the given cost.
    pub fn charge(&mut self, cost: QueryCost, repeats: u64) {
        self.oracle_queries += cost.queries * repeats;
        self.gate_units += cost.gate_units * repeats as f64;
    }

    pub fn charge_initial_state(&mut self) {
        self.initial_state_queries += 1;
    }

    /// Raises the ancilla high-water mark to at least `n`.
    pub fn note_ancillas(&mut self, n: u32) {
        self.ancilla_qubits = self.ancilla_qubits.max(n);
    }

    pub fn oracle_queries(&self) -> u64 {
        self.oracle_queries
    }

    pub fn gate_units(&self) -> f64 {
        self.gate_units
    }

    pub fn initial_state_queries(&self) -> u64 {
        self.initial_state_queries
    }

    pub fn ancilla_qubits(&self) -> u32 {
        self.ancilla_qubits
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Operator-norm bound `q * delta` on the deviation caused by imperfect queries.
    pub fn accumulated_error(&self) -> f64 {
        self.oracle_queries as f64 * self.delta
    }
}
