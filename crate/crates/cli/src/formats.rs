//! On-disk formats: JSON documents and CSV tables.
//!
//! Every float in a CSV cell is written with 17 significant digits in
//! scientific notation; rows end in a bare `\n`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use mlqsp_core::pipeline::{Method, RunReport, TraceRow};
use mlqsp_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Pair;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFile {
    /// Convention of `phases`; `qetu_phases` holds the same set in the other one.
    pub convention: String,
    pub degree: usize,
    pub phases: Vec<f64>,
    pub qetu_phases: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterFile {
    /// `g(x) = sum_k a_k T_{2k}(x)`.
    Polynomial {
        label: String,
        degree: usize,
        eps_achieved: f64,
        pass_edge: Option<f64>,
        stop_edge: Option<f64>,
        max_abs: f64,
        chebyshev_even_coeffs: Vec<f64>,
    },
    /// `f(x) = sum_k c_k exp(-i k x / |H|)`.
    Fourier {
        degree: usize,
        h_norm: f64,
        eps_achieved: f64,
        one_norm: f64,
        indices: Vec<i64>,
        coefficients: Vec<Pair>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcuFile {
    pub degree: usize,
    pub one_norm: f64,
    pub select_queries: u64,
    pub select_gate_units: f64,
    pub prepare_t_gates: f64,
    pub ancilla: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub method: String,
    pub seed: u64,
    pub fidelity: f64,
    pub ground_overlap: f64,
    pub success_probability: f64,
    pub oracle_queries: u64,
    pub gate_units: f64,
    pub initial_state_queries: u64,
    pub ancilla_qubits: u32,
    pub delta: f64,
    /// `oracle_queries * delta`.
    pub error_bound: f64,
    pub shift: f64,
    pub degrees: Vec<usize>,
    pub repetitions: u64,
    pub amplification_rounds: Option<u64>,
    pub lcu: Option<LcuFile>,
    pub warnings: Vec<String>,
    /// Unnormalized final state in the eigenbasis.
    pub final_state: Vec<Pair>,
    /// The same state in the input basis when the Hamiltonian was given as a matrix.
    pub final_state_input_basis: Option<Vec<Pair>>,
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::MultilevelMeasured => "multilevel",
        Method::MultilevelCoherent => "multilevel_coherent",
        Method::StandardQsp => "standard_qsp",
        Method::Lcu => "lcu",
    }
}

impl ReportFile {
    pub fn from_report(r: &RunReport, seed: u64, input_basis: Option<Vec<Complex64>>) -> Self {
        ReportFile {
            method: method_name(r.method).into(),
            seed,
            fidelity: r.fidelity,
            ground_overlap: r.ground_overlap,
            success_probability: r.success_probability,
            oracle_queries: r.ledger.oracle_queries(),
            gate_units: r.ledger.gate_units(),
            initial_state_queries: r.ledger.initial_state_queries(),
            ancilla_qubits: r.ledger.ancilla_qubits(),
            delta: r.ledger.delta(),
            error_bound: r.ledger.accumulated_error(),
            shift: r.shift,
            degrees: r.degrees.clone(),
            repetitions: r.repetitions,
            amplification_rounds: r.amplification_rounds,
            lcu: r.lcu.as_ref().map(|l| LcuFile {
                degree: l.degree,
                one_norm: l.one_norm,
                select_queries: l.select_queries,
                select_gate_units: l.select_gate_units,
                prepare_t_gates: l.prepare_t_gates,
                ancilla: l.ancilla,
            }),
            warnings: r.warnings.clone(),
            final_state: r.final_state.amplitudes().iter().map(|z| pair(*z)).collect(),
            final_state_input_basis: input_basis.map(|v| v.into_iter().map(pair).collect()),
        }
    }
}

pub const TRACE_HEADER: [&str; 5] = ["level", "t", "norm_sq", "ground_amp", "oracle_queries_cum"];

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.level.to_string(),
            num(r.t),
            num(r.norm_sq),
            num(r.ground_amp),
            r.oracle_queries_cum.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed trace row, for re-reading emitted files.
#[cfg(test)]
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TraceRecord {
    pub level: usize,
    pub t: f64,
    pub norm_sq: f64,
    pub ground_amp: f64,
    pub oracle_queries_cum: u64,
}

#[cfg(test)]
pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(20.0), "2.0000000000000000e1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn filter_file_round_trips() {
        let f = FilterFile::Fourier {
            degree: 1,
            h_norm: 20.0,
            eps_achieved: 1e-3,
            one_norm: 1.2,
            indices: vec![0, 1, -1],
            coefficients: vec![[0.5, 0.0], [0.0, 0.3], [0.0, -0.3]],
        };
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"kind\":\"fourier\""));
        assert_eq!(serde_json::from_str::<FilterFile>(&text).unwrap(), f);
    }

    #[test]
    fn run_outputs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg: crate::config::ExperimentConfig = serde_json::from_value(serde_json::json!({
            "hamiltonian": {"equally_spaced": {"n": 9, "max": 8.0}, "mu": 0.5, "gap": 1.0},
            "initial_state": {"overlap": 0.5},
            "output_dir": dir.path(),
        }))
        .unwrap();
        let written = crate::commands::run(&cfg).unwrap();
        let report: ReportFile = read_json(&dir.path().join("report.json")).unwrap();
        assert_eq!(report, written);
        let trace = read_trace(&dir.path().join("level_trace.csv")).unwrap();
        assert_eq!(trace.len(), report.degrees.len());
        assert_eq!(trace.last().unwrap().oracle_queries_cum, report.oracle_queries);
        assert!((trace.last().unwrap().norm_sq - report.success_probability).abs() < 1e-15);
    }
}
