use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mlqsp_core::cost::{scaling_table, CostEstimate, CostMethod, CostParams};
use mlqsp_core::filter::{
    build_cleanup_filter, build_heaviside_fourier, build_level_filter, build_standard_filter, Filter,
    FilterPolynomial,
};
use mlqsp_core::pipeline::{
    inject_oracle_error, run_lcu, run_multilevel_coherent, run_multilevel_measured, run_standard_qsp,
    MultilevelPlan, RunReport,
};
use mlqsp_core::qsp::{
    convert_phases, golden_phase_table, induced_polynomial, solve_symmetric_phase_factors, PhaseConvention,
};
use mlqsp_core::spectral::{FastForwardModel, InitialState, Regime, SpectralHamiltonian};
use mlqsp_core::Error;

use crate::config::{ExperimentConfig, MethodArg, Problem, RegimeArg};
use crate::formats::{csv_writer, num, pair, write_json, write_trace, FilterFile, PhaseFile, ReportFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TargetKind {
    /// Polynomial induced by the built-in degree-20 table.
    Golden,
    /// Level filter built for `--eps`.
    Level,
    /// Constant polynomial `--value`.
    Constant,
    /// Even Chebyshev coefficients from `--coeffs`.
    Coeffs,
}

pub struct SolveArgs {
    pub target: TargetKind,
    pub eps: f64,
    pub value: f64,
    pub coeffs: Vec<f64>,
    pub tol: f64,
    pub out: PathBuf,
}

pub fn solve_phases(a: &SolveArgs) -> Result<PhaseFile> {
    let target = match a.target {
        TargetKind::Golden => induced_polynomial(&golden_phase_table())?,
        TargetKind::Level => build_level_filter(a.eps)?,
        TargetKind::Constant => FilterPolynomial::from_even_coeffs(vec![a.value], 0.0)?,
        TargetKind::Coeffs => {
            if a.coeffs.is_empty() {
                bail!(Error::InvalidArgument("--coeffs needs at least one value".into()));
            }
            FilterPolynomial::from_even_coeffs(a.coeffs.clone(), 0.0)?
        }
    };
    let sol = solve_symmetric_phase_factors(&target, a.tol)?;
    let qetu = convert_phases(&sol.phases, PhaseConvention::Qetu);
    let file = PhaseFile {
        convention: "qsp".into(),
        degree: sol.phases.degree(),
        phases: sol.phases.phases().to_vec(),
        qetu_phases: qetu.phases().to_vec(),
        residual: sol.residual,
        iterations: sol.iterations,
    };
    ensure_parent(&a.out)?;
    write_json(&a.out, &file)?;
    Ok(file)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FilterKind {
    Level,
    Cleanup,
    Standard,
    Fourier,
}

pub struct FilterArgs {
    pub kind: FilterKind,
    pub eps: f64,
    pub mu: f64,
    pub gap: f64,
    pub h_norm: f64,
    pub out: PathBuf,
    pub curve: Option<PathBuf>,
    pub points: usize,
}

fn polynomial_file(label: &str, p: &FilterPolynomial) -> FilterFile {
    FilterFile::Polynomial {
        label: label.into(),
        degree: p.degree(),
        eps_achieved: p.eps_prime(),
        pass_edge: p.bands().map(|b| b.pass.0),
        stop_edge: p.bands().map(|b| b.stop.1),
        max_abs: p.max_abs(),
        chebyshev_even_coeffs: p.chebyshev_coeffs().to_vec(),
    }
}

pub fn build_filter(a: &FilterArgs) -> Result<FilterFile> {
    if a.points < 2 {
        bail!(Error::InvalidArgument("--points must be at least 2".into()));
    }
    ensure_parent(&a.out)?;
    let poly = match a.kind {
        FilterKind::Level => Some(("level", build_level_filter(a.eps)?)),
        FilterKind::Cleanup => Some(("cleanup", build_cleanup_filter(a.mu, a.gap, a.eps)?)),
        FilterKind::Standard => Some(("standard", build_standard_filter(a.h_norm, a.mu, a.gap, a.eps)?)),
        FilterKind::Fourier => None,
    };
    let file = match poly {
        Some((label, p)) => {
            if let Some(path) = &a.curve {
                ensure_parent(path)?;
                let mut w = csv_writer(path)?;
                w.write_record(["x", "g"])?;
                for i in 0..a.points {
                    let x = i as f64 / (a.points - 1) as f64;
                    w.write_record([num(x), num(p.eval_unchecked(x))])?;
                }
                w.flush()?;
            }
            polynomial_file(label, &p)
        }
        None => {
            let f = build_heaviside_fourier(a.h_norm, a.mu, a.gap, a.eps)?;
            if let Some(path) = &a.curve {
                ensure_parent(path)?;
                let mut w = csv_writer(path)?;
                w.write_record(["x", "re", "im"])?;
                for i in 0..a.points {
                    let x = a.h_norm * i as f64 / (a.points - 1) as f64;
                    let v = f.eval(x)?;
                    w.write_record([num(x), num(v.re), num(v.im)])?;
                }
                w.flush()?;
            }
            FilterFile::Fourier {
                degree: f.degree(),
                h_norm: f.h_norm(),
                eps_achieved: f.eps(),
                one_norm: f.one_norm(),
                indices: f.indices().to_vec(),
                coefficients: f.coefficients().iter().map(|c| pair(*c)).collect(),
            }
        }
    };
    write_json(&a.out, &file)?;
    Ok(file)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    Ok(())
}

fn execute(cfg: &ExperimentConfig, p: &Problem, model: &FastForwardModel) -> Result<RunReport> {
    let h = &p.hamiltonian;
    let init = &p.initial;
    let report = match cfg.method {
        MethodArg::Multilevel => {
            let plan = MultilevelPlan::new(h, init, cfg.eps, cfg.regime.into())?;
            run_multilevel_measured(h, init, &plan, model)?
        }
        MethodArg::MultilevelCoherent => {
            let plan = MultilevelPlan::new(h, init, cfg.eps, cfg.regime.into())?;
            run_multilevel_coherent(h, init, &plan, model)?.report
        }
        MethodArg::StandardQsp => run_standard_qsp(h, init, cfg.eps, model)?,
        MethodArg::Lcu => run_lcu(h, init, cfg.eps, model)?,
    };
    Ok(report)
}

/// Runs the configured method and writes `report.json` and `level_trace.csv`.
pub fn run(cfg: &ExperimentConfig) -> Result<ReportFile> {
    let problem = cfg.resolve()?;
    let model = cfg.model()?;
    let report = execute(cfg, &problem, &model)?;
    std::fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let input_basis = problem
        .basis
        .as_ref()
        .map(|b| b.to_input_basis(report.final_state.amplitudes()));
    let file = ReportFile::from_report(&report, cfg.seed, input_basis);
    write_json(&cfg.output_dir.join("report.json"), &file)?;
    write_trace(&cfg.output_dir.join("level_trace.csv"), &report.level_trace)?;
    Ok(file)
}

pub struct InjectionSummary {
    pub runs: u64,
    pub oracle_queries: u64,
    pub worst_ratio: f64,
}

/// Seeded error-injection runs of the measured multi-level pipeline, one CSV row per run.
pub fn inject_error(cfg: &ExperimentConfig, delta: f64, runs: u64) -> Result<InjectionSummary> {
    if runs == 0 {
        bail!(Error::InvalidArgument("--runs must be positive".into()));
    }
    let p = cfg.resolve()?;
    let model = cfg.model()?;
    let plan = MultilevelPlan::new(&p.hamiltonian, &p.initial, cfg.eps, cfg.regime.into())?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut w = csv_writer(&cfg.output_dir.join("injection.csv"))?;
    w.write_record(["seed", "oracle_queries", "delta", "deviation", "bound", "ratio"])?;
    let mut summary = InjectionSummary {
        runs,
        oracle_queries: 0,
        worst_ratio: 0.0,
    };
    for k in 0..runs {
        let seed = cfg.seed.wrapping_add(k);
        let (report, deviation) = inject_oracle_error(&p.hamiltonian, &p.initial, &plan, &model, delta, seed)?;
        let bound = report.ledger.accumulated_error();
        let ratio = if bound > 0.0 { deviation / bound } else { 0.0 };
        summary.oracle_queries = report.ledger.oracle_queries();
        summary.worst_ratio = summary.worst_ratio.max(ratio);
        w.write_record([
            seed.to_string(),
            report.ledger.oracle_queries().to_string(),
            num(delta),
            num(deviation),
            num(bound),
            num(ratio),
        ])?;
    }
    w.flush()?;
    Ok(summary)
}

pub struct CompareArgs {
    pub h_norms: Vec<f64>,
    pub gap: f64,
    pub gamma: f64,
    pub eps: f64,
    pub tau: Option<f64>,
    pub alpha: f64,
    pub regime: RegimeArg,
    pub methods: Vec<MethodArg>,
    pub simulate: bool,
    pub curve_h_norm: f64,
    pub curve_points: usize,
    pub output_dir: PathBuf,
}

fn cost_method(m: MethodArg) -> CostMethod {
    match m {
        MethodArg::Multilevel | MethodArg::MultilevelCoherent => CostMethod::Multilevel,
        MethodArg::StandardQsp => CostMethod::StandardQsp,
        MethodArg::Lcu => CostMethod::Lcu,
    }
}

/// Ground state at zero and excited levels evenly spread over `[gap, h_norm]`.
pub fn benchmark_spectrum(h_norm: f64, gap: f64) -> Result<SpectralHamiltonian> {
    let steps = ((h_norm - gap) / gap).round().max(1.0) as usize;
    let mut eigs = vec![0.0];
    eigs.extend((0..=steps).map(|k| gap + (h_norm - gap) * k as f64 / steps as f64));
    Ok(SpectralHamiltonian::new(eigs, gap / 2.0, gap)?)
}

const SCALING_HEADER: [&str; 13] = [
    "method",
    "regime",
    "h_norm",
    "gap",
    "gamma",
    "eps",
    "tau",
    "alpha",
    "oracle_queries",
    "gate_units",
    "t_gates",
    "ancilla",
    "oi_queries",
];

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::TauCutoff => "tau_cutoff",
        Regime::AlphaSoft => "alpha_soft",
    }
}

fn estimate_record(e: &CostEstimate) -> Vec<String> {
    let p = &e.params;
    vec![
        e.method.as_str().into(),
        regime_name(p.regime).into(),
        num(p.h_norm),
        num(p.gap),
        num(p.gamma),
        num(p.eps),
        num(p.tau),
        num(p.alpha),
        num(e.oracle_queries),
        num(e.gate_units),
        num(e.t_gates),
        e.ancilla.to_string(),
        num(e.oi_queries),
    ]
}

/// Writes `scaling.csv` (closed-form estimates, optionally beside simulated
/// ledgers) and `filter_curves.csv` (multi-level product filter against the
/// single sharp filter).
pub fn compare(a: &CompareArgs) -> Result<usize> {
    if a.h_norms.is_empty() || a.methods.is_empty() {
        bail!(Error::InvalidArgument("compare needs at least one |H| and one method".into()));
    }
    let mut methods: Vec<MethodArg> = Vec::new();
    for m in &a.methods {
        if !methods.iter().any(|x| cost_method(*x) == cost_method(*m)) {
            methods.push(*m);
        }
    }
    let tau = a.tau.unwrap_or(f64::INFINITY);
    let grid: Vec<CostParams> = a
        .h_norms
        .iter()
        .map(|&h_norm| CostParams {
            regime: a.regime.into(),
            h_norm,
            gap: a.gap,
            gamma: a.gamma,
            eps: a.eps,
            tau,
            alpha: a.alpha,
        })
        .collect();
    let cost_methods: Vec<CostMethod> = methods.iter().map(|m| cost_method(*m)).collect();
    let rows = scaling_table(&cost_methods, &grid)?;
    std::fs::create_dir_all(&a.output_dir)?;
    let mut w = csv_writer(&a.output_dir.join("scaling.csv"))?;
    let mut header: Vec<&str> = SCALING_HEADER.to_vec();
    if a.simulate {
        header.extend(["sim_oracle_queries", "sim_gate_units", "query_ratio"]);
    }
    w.write_record(&header)?;
    let model = FastForwardModel::new(a.regime.into(), tau, a.alpha, 0.0)?;
    for (i, est) in rows.iter().enumerate() {
        let mut rec = estimate_record(est);
        if a.simulate {
            let method = methods[i % methods.len()];
            let h = benchmark_spectrum(est.params.h_norm, a.gap)?;
            let init = InitialState::with_overlap(h.dim(), a.gamma)?;
            let cfg_eps = a.eps;
            let report = match method {
                MethodArg::Multilevel | MethodArg::MultilevelCoherent => {
                    let plan = MultilevelPlan::new(&h, &init, cfg_eps, a.regime.into())?;
                    run_multilevel_measured(&h, &init, &plan, &model)?
                }
                MethodArg::StandardQsp => run_standard_qsp(&h, &init, cfg_eps, &model)?,
                MethodArg::Lcu => run_lcu(&h, &init, cfg_eps, &model)?,
            };
            let q = report.ledger.oracle_queries() as f64;
            rec.extend([num(q), num(report.ledger.gate_units()), num(q / est.oracle_queries)]);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    filter_curves(a)?;
    Ok(rows.len())
}

fn filter_curves(a: &CompareArgs) -> Result<()> {
    if a.curve_points < 2 {
        bail!(Error::InvalidArgument("--curve-points must be at least 2".into()));
    }
    let h_norm = a.curve_h_norm;
    let h = benchmark_spectrum(h_norm, a.gap)?;
    let init = InitialState::with_overlap(h.dim(), a.gamma)?;
    let plan = MultilevelPlan::new(&h, &init, a.eps, Regime::TauCutoff)?;
    let eps_f = (a.gamma * a.eps).min(0.49);
    let sharp = build_standard_filter(h_norm, h.mu(), h.gap(), eps_f)?;
    let mut w = csv_writer(&a.output_dir.join("filter_curves.csv"))?;
    w.write_record(["x", "multilevel", "standard"])?;
    for i in 0..a.curve_points {
        let x = h_norm * i as f64 / (a.curve_points - 1) as f64;
        let ml = plan.total_response(x);
        let st = sharp.eval_unchecked((x / (2.0 * h_norm)).cos());
        w.write_record([num(x), num(ml), num(st)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_spectrum_shape() {
        let h = benchmark_spectrum(8.0, 1.0).unwrap();
        assert_eq!(h.eigenvalues(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(h.spectral_radius(), 8.0);
        let h = benchmark_spectrum(40.0, 2.0).unwrap();
        assert_eq!(h.eigenvalues()[1], 2.0);
        assert_eq!(*h.eigenvalues().last().unwrap(), 40.0);
    }
}
