//! End-to-end ground-state preparation runs in the eigenbasis.
//!
//! Every run starts from an [`InitialState`], applies one or more filters
//! eigenvalue by eigenvalue, and debits a [`QueryLedger`] for each evolution
//! segment the corresponding circuit would issue.

mod gadget;
mod noise;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_4, PI};
use libm::{asin, ceil, cos, log, log2, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::{
    build_heaviside_fourier, build_level_filter, build_standard_filter, design_two_band, FilterPolynomial,
    FourierFilter, CLEANUP_MAX_DEGREE,
};
use crate::qsp::{induced_value, solve_symmetric_phase_factors, PhaseConvention, PhaseFactorSet};
use crate::spectral::{
    evolution_phases, query_cost, shift_spectrum, snapped_ceil, FastForwardModel, InitialState, QueryLedger, Regime,
    SpectralHamiltonian,
};

pub use gadget::{counter_after, counter_width, run_multilevel_coherent, CoherentRun, CounterRegister};
pub use noise::inject_oracle_error;

/// Node residual the phase solver must reach for pipeline filters.
pub const PHASE_TOLERANCE: f64 = 1e-10;

/// Filters above this degree are applied as polynomials without solving for
/// phase factors.
pub const PHASE_SOLVE_MAX_DEGREE: usize = 128;

/// Unnormalized system amplitudes in the eigenbasis after some number of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelState {
    amplitudes: Vec<Complex64>,
    level: usize,
    norm_sq: f64,
}

impl LevelState {
    pub fn from_initial(init: &InitialState) -> Self {
        Self::from_amplitudes(init.amplitudes().to_vec(), 0)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>, level: usize) -> Self {
        let norm_sq = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        LevelState {
            amplitudes,
            level,
            norm_sq,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `|<psi_0|phi>|`.
    pub fn ground_amplitude(&self) -> f64 {
        sqrt(self.amplitudes[0].norm_sqr())
    }

    /// `|<psi_0|phi>| / |phi|`, zero for a vanished state.
    pub fn fidelity(&self) -> f64 {
        if self.norm_sq > 0.0 {
            (self.ground_amplitude() / sqrt(self.norm_sq)).min(1.0)
        } else {
            0.0
        }
    }

    fn scaled(&self, factors: impl Fn(usize) -> Complex64) -> LevelState {
        let amps = self.amplitudes.iter().enumerate().map(|(k, a)| a * factors(k)).collect();
        LevelState::from_amplitudes(amps, self.level + 1)
    }
}

/// A filter ready to be applied by a QETU circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct StageFilter {
    polynomial: FilterPolynomial,
    phases: Option<PhaseFactorSet>,
    qsp: Vec<f64>,
}

impl StageFilter {
    /// Solves for symmetric phase factors realizing `polynomial`.
    pub fn with_phases(polynomial: FilterPolynomial) -> Result<Self> {
        let solved = solve_symmetric_phase_factors(&polynomial, PHASE_TOLERANCE)?;
        let qsp = solved.phases.phases().to_vec();
        Ok(StageFilter {
            polynomial,
            phases: Some(solved.phases),
            qsp,
        })
    }

    /// Uses the polynomial directly; no phase factors are attached.
    pub fn polynomial_only(polynomial: FilterPolynomial) -> Self {
        StageFilter {
            polynomial,
            phases: None,
            qsp: Vec::new(),
        }
    }

    /// Solves for phases when the degree allows it.
    fn auto(polynomial: FilterPolynomial) -> Result<Self> {
        if polynomial.degree() <= PHASE_SOLVE_MAX_DEGREE {
            Self::with_phases(polynomial)
        } else {
            Ok(Self::polynomial_only(polynomial))
        }
    }

    pub fn polynomial(&self) -> &FilterPolynomial {
        &self.polynomial
    }

    /// Phase factors in the QSP convention, when solved.
    pub fn phases(&self) -> Option<&PhaseFactorSet> {
        self.phases.as_ref()
    }

    /// Phase factors in the QETU convention, when solved.
    pub fn qetu_phases(&self) -> Option<Vec<f64>> {
        self.phases.as_ref().map(|p| p.qetu_phases())
    }

    pub fn degree(&self) -> usize {
        self.polynomial.degree()
    }

    /// Filter value at `x`, from the phase factors when available.
    pub fn value(&self, x: f64) -> f64 {
        if self.phases.is_some() {
            induced_value(&self.qsp, x)
        } else {
            self.polynomial.eval_unchecked(x)
        }
    }

    /// `g(cos(t lambda / 2))`.
    pub fn response(&self, t: f64, lambda: f64) -> f64 {
        self.value(cos(0.5 * t * lambda))
    }
}

/// Applies one QETU level: every amplitude is multiplied by
/// `g(cos(lambda_k t / 2))`, and `d` evolution segments of length `t` are debited.
pub fn apply_qetu_level(
    state: &LevelState,
    h: &SpectralHamiltonian,
    filter: &StageFilter,
    t: f64,
    model: &FastForwardModel,
    ledger: &mut QueryLedger,
) -> Result<LevelState> {
    if state.amplitudes.len() != h.dim() {
        return Err(Error::invalid(format!(
            "state has {} amplitudes but the Hamiltonian has {} eigenvalues",
            state.amplitudes.len(),
            h.dim()
        )));
    }
    let cost = query_cost(t, model, h.spectral_radius())?;
    ledger.charge(cost, filter.degree() as u64);
    let eigs = h.eigenvalues();
    Ok(state.scaled(|k| Complex64::new(filter.response(t, eigs[k]), 0.0)))
}

/// Number of levels and their evolution times `t_l = 2^l / |H|`, `l = 1..=L`.
///
/// In the cutoff regime `L = ceil(log2(|H| / 2))` and `|H| >= pi` is required;
/// in the soft regime `L = ceil(log2(pi |H| / (4 gap)))`.
pub fn level_schedule(h_norm: f64, gap: f64, regime: Regime) -> Result<(usize, Vec<f64>)> {
    if !(h_norm > 0.0) || !(gap > 0.0) {
        return Err(Error::invalid("spectral radius and gap must be positive"));
    }
    let levels = match regime {
        Regime::TauCutoff => {
            if h_norm < PI {
                return Err(Error::Precondition {
                    theorem: "multi-level QSP ground state preparation",
                    message: format!("needs |H| >= pi, got {h_norm}"),
                });
            }
            snapped_ceil(log2(h_norm / 2.0)) as usize
        }
        Regime::AlphaSoft => {
            let arg = PI * h_norm / (4.0 * gap);
            if arg <= 1.0 {
                return Err(Error::Precondition {
                    theorem: "multi-level QSP ground state preparation, soft fast-forwarding",
                    message: format!("needs pi |H| / (4 gap) > 1, got {arg}"),
                });
            }
            snapped_ceil(log2(arg)) as usize
        }
    };
    let levels = levels.max(1);
    let times = (1..=levels).map(|l| (1u64 << l) as f64 / h_norm).collect();
    Ok((levels, times))
}

/// Which pipeline produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MultilevelMeasured,
    MultilevelCoherent,
    StandardQsp,
    Lcu,
}

/// One row of the per-stage trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub level: usize,
    pub t: f64,
    pub norm_sq: f64,
    pub ground_amp: f64,
    pub oracle_queries_cum: u64,
}

/// Resource figures specific to the LCU baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcuDetails {
    /// Harmonics run up to `2d + 1`.
    pub degree: usize,
    pub one_norm: f64,
    pub select_queries: u64,
    pub select_gate_units: f64,
    /// PREPARE estimate `d + log2(1 / eps~)`, `eps~ = gamma eps / |c|_1`.
    pub prepare_t_gates: f64,
    pub ancilla: u32,
}

/// Outcome of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub method: Method,
    pub final_state: LevelState,
    pub fidelity: f64,
    pub ground_overlap: f64,
    pub success_probability: f64,
    pub ledger: QueryLedger,
    pub level_trace: Vec<TraceRow>,
    /// Offset added to the spectrum before filtering.
    pub shift: f64,
    /// Degree of each stage filter, in application order.
    pub degrees: Vec<usize>,
    /// `ceil(ln 3 / p)` repetitions for success with probability 2/3.
    pub repetitions: u64,
    /// `ceil(pi / (4 arcsin sqrt(p)))`, reported by coherent runs.
    pub amplification_rounds: Option<u64>,
    pub lcu: Option<LcuDetails>,
    pub warnings: Vec<String>,
}

fn repetitions(p: f64) -> u64 {
    if p > 0.0 {
        snapped_ceil(log(3.0) / p).max(1)
    } else {
        u64::MAX
    }
}

pub(crate) fn amplification_rounds(p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    if p > 0.0 {
        snapped_ceil(PI / (4.0 * asin(sqrt(p)))).max(1)
    } else {
        u64::MAX
    }
}

impl RunReport {
    fn finish(
        method: Method,
        state: LevelState,
        ledger: QueryLedger,
        level_trace: Vec<TraceRow>,
        shift: f64,
        degrees: Vec<usize>,
        warnings: Vec<String>,
    ) -> Self {
        let p = state.norm_sq();
        RunReport {
            method,
            fidelity: state.fidelity(),
            ground_overlap: state.ground_amplitude(),
            success_probability: p,
            ledger,
            level_trace,
            shift,
            degrees,
            repetitions: repetitions(p),
            amplification_rounds: None,
            lcu: None,
            warnings,
            final_state: state,
        }
    }
}

fn trace_row(state: &LevelState, t: f64, ledger: &QueryLedger) -> TraceRow {
    TraceRow {
        level: state.level(),
        t,
        norm_sq: state.norm_sq(),
        ground_amp: state.ground_amplitude(),
        oracle_queries_cum: ledger.oracle_queries(),
    }
}

fn check_dims(h: &SpectralHamiltonian, init: &InitialState) -> Result<()> {
    if h.dim() != init.dim() {
        return Err(Error::invalid(format!(
            "initial state has {} amplitudes but the Hamiltonian has {} eigenvalues",
            init.dim(),
            h.dim()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Filters, schedule and spectrum shift for a multi-level run.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilevelPlan {
    regime: Regime,
    eps: f64,
    eps_prime: f64,
    shift: f64,
    h_norm: f64,
    times: Vec<f64>,
    level: StageFilter,
    cleanup: Option<StageFilter>,
    warnings: Vec<String>,
}

impl MultilevelPlan {
    /// Builds the level filter with `eps' = gamma eps`, the schedule, and (in
    /// the cutoff regime) the clean-up filter for evolution time one.
    ///
    /// The spectrum is shifted down to zero when the ground energy exceeds
    /// `pi/4` (cutoff regime) or `gap/2` (soft regime).
    pub fn new(h: &SpectralHamiltonian, init: &InitialState, eps: f64, regime: Regime) -> Result<Self> {
        check_dims(h, init)?;
        check_eps(eps)?;
        let gamma = init.overlap();
        let eps_prime = gamma * eps;
        let limit = match regime {
            Regime::TauCutoff => FRAC_PI_4,
            Regime::AlphaSoft => h.gap() / 2.0,
        };
        let shift = if h.ground_energy() > limit { -h.ground_energy() } else { 0.0 };
        let hs = shift_spectrum(h, shift)?;
        let (levels, times) = level_schedule(hs.spectral_radius(), hs.gap(), regime)?;

        let mut warnings = Vec::new();
        let budget = log(1.5);
        if eps_prime * levels as f64 > budget {
            warnings.push(format!(
                "gamma * eps * L = {:.3e} exceeds ln(3/2); the ground-overlap guarantee may not hold",
                eps_prime * levels as f64
            ));
        }
        if shift != 0.0 {
            warnings.push(format!("spectrum shifted by {shift} to place the ground energy at zero"));
        }

        let level = StageFilter::with_phases(build_level_filter(eps_prime.min(0.49))?)?;
        let cleanup = match regime {
            Regime::TauCutoff => cleanup_filter(hs.mu(), hs.gap(), eps_prime)?,
            Regime::AlphaSoft => None,
        };
        Ok(MultilevelPlan {
            regime,
            eps,
            eps_prime,
            shift,
            h_norm: hs.spectral_radius(),
            times,
            level,
            cleanup,
            warnings,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Per-level error `gamma * eps`.
    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Spectral radius after the shift.
    pub fn h_norm(&self) -> f64 {
        self.h_norm
    }

    /// Number of filtering levels `L` (the clean-up stage is not counted).
    pub fn levels(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn level_filter(&self) -> &StageFilter {
        &self.level
    }

    pub fn cleanup_filter(&self) -> Option<&StageFilter> {
        self.cleanup.as_ref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `(filter, t)` for every stage in application order.
    pub fn stages(&self) -> Vec<(&StageFilter, f64)> {
        let mut s: Vec<(&StageFilter, f64)> = self.times.iter().map(|&t| (&self.level, t)).collect();
        if let Some(c) = &self.cleanup {
            s.push((c, 1.0));
        }
        s
    }

    /// Product of all stage responses at `lambda` (an eigenvalue of the shifted spectrum).
    pub fn total_response(&self, lambda: f64) -> f64 {
        self.stages().iter().map(|(f, t)| f.response(*t, lambda)).product()
    }

    fn shifted(&self, h: &SpectralHamiltonian) -> Result<SpectralHamiltonian> {
        shift_spectrum(h, self.shift)
    }
}

/// Clean-up stage for time one with its window clamped to `[0, pi]`; none
/// when the whole of `[0, pi]` lies in the pass band.
fn cleanup_filter(mu: f64, gap: f64, eps: f64) -> Result<Option<StageFilter>> {
    let pass = (mu - gap / 2.0).max(0.0);
    let stop = (mu + gap / 2.0).min(PI);
    if pass >= PI {
        return Ok(None);
    }
    let poly = design_two_band(pass, stop, eps.min(0.49), CLEANUP_MAX_DEGREE)?;
    Ok(Some(StageFilter::with_phases(poly)?))
}

/// Multi-level filtering with a measurement after each level (post-selection
/// on the QETU ancilla), followed by the clean-up stage.
pub fn run_multilevel_measured(
    h: &SpectralHamiltonian,
    init: &InitialState,
    plan: &MultilevelPlan,
    model: &FastForwardModel,
) -> Result<RunReport> {
    check_dims(h, init)?;
    let hs = plan.shifted(h)?;
    let mut ledger = QueryLedger::new(model.delta());
    ledger.charge_initial_state();
    ledger.note_ancillas(1);
    let mut state = LevelState::from_initial(init);
    let mut trace = Vec::new();
    let mut degrees = Vec::new();
    for (filter, t) in plan.stages() {
        state = apply_qetu_level(&state, &hs, filter, t, model, &mut ledger)?;
        trace.push(trace_row(&state, t, &ledger));
        degrees.push(filter.degree());
    }
    Ok(RunReport::finish(
        Method::MultilevelMeasured,
        state,
        ledger,
        trace,
        plan.shift,
        degrees,
        plan.warnings.clone(),
    ))
}

/// Single QETU filter on the evolution `e^{-iH/|H|}`, sharp enough to resolve
/// the relative gap `gap / |H|`.
pub fn run_standard_qsp(
    h: &SpectralHamiltonian,
    init: &InitialState,
    eps: f64,
    model: &FastForwardModel,
) -> Result<RunReport> {
    check_dims(h, init)?;
    check_eps(eps)?;
    let eps_f = (init.overlap() * eps).min(0.49);
    let h_norm = h.spectral_radius();
    let poly = build_standard_filter(h_norm, h.mu(), h.gap(), eps_f)?;
    let filter = StageFilter::auto(poly)?;
    let mut warnings = Vec::new();
    if filter.phases().is_none() {
        warnings.push(format!(
            "degree {} filter applied as a polynomial; phase factors are solved up to degree {}",
            filter.degree(),
            PHASE_SOLVE_MAX_DEGREE
        ));
    }
    let mut ledger = QueryLedger::new(model.delta());
    ledger.charge_initial_state();
    ledger.note_ancillas(2);
    let t = 1.0 / h_norm;
    let state = apply_qetu_level(&LevelState::from_initial(init), h, &filter, t, model, &mut ledger)?;
    let trace = alloc::vec![trace_row(&state, t, &ledger)];
    Ok(RunReport::finish(
        Method::StandardQsp,
        state,
        ledger,
        trace,
        0.0,
        alloc::vec![filter.degree()],
        warnings,
    ))
}

/// `sum_k c_k e^{-i lambda t_k}` for every eigenvalue, one evolution at a time.
pub fn lcu_state_sum(filter: &FourierFilter, h: &SpectralHamiltonian) -> Vec<Complex64> {
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); h.dim()];
    for (c, &t) in filter.coefficients().iter().zip(filter.times()) {
        for (a, p) in acc.iter_mut().zip(evolution_phases(h, t)) {
            *a += c * p;
        }
    }
    acc
}

/// LCU baseline: applies `f(H) / |c|_1` for the odd-harmonic step filter `f`.
pub fn run_lcu(h: &SpectralHamiltonian, init: &InitialState, eps: f64, model: &FastForwardModel) -> Result<RunReport> {
    check_dims(h, init)?;
    check_eps(eps)?;
    let gamma = init.overlap();
    let h_norm = h.spectral_radius();
    let filter = build_heaviside_fourier(h_norm, h.mu(), h.gap(), gamma * eps)?;
    let one_norm = filter.one_norm();
    let values = lcu_state_sum(&filter, h);
    let amps = init
        .amplitudes()
        .iter()
        .zip(&values)
        .map(|(a, f)| a * f / one_norm)
        .collect();
    let state = LevelState::from_amplitudes(amps, 1);

    // SELECT: controlled e^{+-i 2^l H/|H|} for l = 0..=ceil(log2(2d + 1))
    let d = filter.degree();
    let top = snapped_ceil(log2((2 * d + 1) as f64)) as u32;
    let mut ledger = QueryLedger::new(model.delta());
    ledger.charge_initial_state();
    for l in 0..=top {
        let cost = query_cost((1u64 << l) as f64 / h_norm, model, h_norm)?;
        ledger.charge(cost, 2);
    }
    let eps_tilde = gamma * eps / one_norm;
    let prepare_t_gates = d as f64 + log2(1.0 / eps_tilde);
    let index_qubits = snapped_ceil(log2((2 * d + 2) as f64)) as u32;
    let prepare_qubits = ceil(log2(d.max(1) as f64) + log2(1.0 / eps_tilde)) as u32;
    let ancilla = index_qubits + prepare_qubits;
    ledger.note_ancillas(ancilla);

    let details = LcuDetails {
        degree: d,
        one_norm,
        select_queries: ledger.oracle_queries(),
        select_gate_units: ledger.gate_units(),
        prepare_t_gates,
        ancilla,
    };
    let trace = alloc::vec![trace_row(&state, (2 * d + 1) as f64 / h_norm, &ledger)];
    let mut report = RunReport::finish(Method::Lcu, state, ledger, trace, 0.0, alloc::vec![d], Vec::new());
    report.lcu = Some(details);
    Ok(report)
}

/// The degree-zero filter `g = 1` (single QSP phase zero).
pub fn identity_stage() -> StageFilter {
    let poly = FilterPolynomial::from_even_coeffs(alloc::vec![1.0], 0.0).expect("constant polynomial");
    let phases = PhaseFactorSet::new(alloc::vec![0.0], PhaseConvention::Qsp).expect("single phase");
    StageFilter {
        qsp: phases.phases().to_vec(),
        polynomial: poly,
        phases: Some(phases),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::fabs;

    fn ladder() -> (SpectralHamiltonian, InitialState) {
        let h = SpectralHamiltonian::equally_spaced(21, 20.0, 0.5, 1.0).unwrap();
        (h, InitialState::uniform(21).unwrap())
    }

    #[test]
    fn schedule_examples() {
        let (l, t) = level_schedule(20.0, 1.0, Regime::TauCutoff).unwrap();
        assert_eq!(l, 4);
        assert!(fabs(t[3] - 0.8) < 1e-15);
        assert_eq!(level_schedule(PI, 1.0, Regime::TauCutoff).unwrap().0, 1);
        assert_eq!(level_schedule(1024.0, 1.0, Regime::TauCutoff).unwrap().0, 9);
        assert!(matches!(
            level_schedule(3.0, 1.0, Regime::TauCutoff),
            Err(Error::Precondition { .. })
        ));
        // ceil(log2(pi * 16 / 4)) = ceil(3.65) = 4
        assert_eq!(level_schedule(16.0, 1.0, Regime::AlphaSoft).unwrap().0, 4);
    }

    #[test]
    fn measured_run_prepares_ground_state() {
        let (h, init) = ladder();
        let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).unwrap();
        assert_eq!(plan.levels(), 4);
        assert!(plan.cleanup_filter().is_some());
        let model = FastForwardModel::tau_cutoff(0.1).unwrap();
        let r = run_multilevel_measured(&h, &init, &plan, &model).unwrap();
        assert!(r.fidelity >= 0.99);
        assert!(r.ground_overlap >= init.overlap() / 2.0);
        assert_eq!(r.level_trace.len(), 5);
        assert_eq!(r.ledger.initial_state_queries(), 1);
        let q: u64 = r.degrees.iter().zip(plan.stages()).map(|(d, (_, t))| *d as u64 * snapped_ceil(t / 0.1).max(1)).sum();
        assert_eq!(r.ledger.oracle_queries(), q);
        let traced: Vec<u64> = r.level_trace.iter().map(|t| t.oracle_queries_cum).collect();
        assert!(traced.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coherent_matches_measured() {
        let (h, init) = ladder();
        let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).unwrap();
        let model = FastForwardModel::ideal();
        let m = run_multilevel_measured(&h, &init, &plan, &model).unwrap();
        let c = run_multilevel_coherent(&h, &init, &plan, &model).unwrap();
        for (a, b) in m.final_state.amplitudes().iter().zip(c.report.final_state.amplitudes()) {
            assert!((a - b).norm_sqr() < 1e-20);
        }
        assert!(fabs(c.register.norm_sq() - 1.0) < 1e-12);
        assert_eq!(c.report.ledger.ancilla_qubits(), counter_width(4) + 1);
        assert!(c.report.amplification_rounds.unwrap() >= 1);
    }

    #[test]
    fn shift_applied_when_ground_energy_high() {
        let eigs: Vec<f64> = (0..8).map(|k| 3.0 + k as f64).collect();
        let h = SpectralHamiltonian::new(eigs, 3.5, 1.0).unwrap();
        let init = InitialState::uniform(8).unwrap();
        let plan = MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).unwrap();
        assert_eq!(plan.shift(), -3.0);
        let r = run_multilevel_measured(&h, &init, &plan, &FastForwardModel::ideal()).unwrap();
        assert!(r.fidelity > 0.99);
    }

    #[test]
    fn standard_and_lcu_baselines() {
        let (h, init) = ladder();
        let model = FastForwardModel::ideal();
        let s = run_standard_qsp(&h, &init, 1e-2, &model).unwrap();
        assert!(s.fidelity >= 0.99);
        assert_eq!(s.ledger.ancilla_qubits(), 2);
        let l = run_lcu(&h, &init, 1e-2, &model).unwrap();
        assert!(l.fidelity >= 0.99);
        assert!(l.lcu.as_ref().unwrap().one_norm >= 1.0);
    }

    #[test]
    fn identity_stage_is_transparent() {
        let s = identity_stage();
        assert_eq!(s.degree(), 0);
        assert!(fabs(s.response(0.3, 2.0) - 1.0) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let (h, _) = ladder();
        let init = InitialState::uniform(3).unwrap();
        assert!(MultilevelPlan::new(&h, &init, 1e-2, Regime::TauCutoff).is_err());
    }
}
