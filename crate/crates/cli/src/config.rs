//! Experiment configuration: JSON schema and conversion into library types.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mlqsp_core::spectral::{FastForwardModel, InitialState, Regime, SpectralHamiltonian};
use mlqsp_core::Complex64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Spectrum {
        eigenvalues: Vec<f64>,
        mu: f64,
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectral_radius: Option<f64>,
    },
    EquallySpaced {
        equally_spaced: EquallySpaced,
        mu: f64,
        gap: f64,
    },
    /// Row-major Hermitian matrix; `mu` and `gap` default to the midpoint and
    /// width of the interval between the two lowest eigenvalues.
    Dense {
        dense_hermitian: Vec<Vec<Pair>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectral_radius: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquallySpaced {
    pub n: usize,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// Only `"uniform"` is accepted.
    Named(String),
    Overlap { overlap: f64 },
    /// Amplitudes in the basis the Hamiltonian was given in.
    Amplitudes { amplitudes: Vec<Pair> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Multilevel,
    MultilevelCoherent,
    StandardQsp,
    Lcu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RegimeArg {
    TauCutoff,
    AlphaSoft,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::TauCutoff => Regime::TauCutoff,
            RegimeArg::AlphaSoft => Regime::AlphaSoft,
        }
    }
}

fn default_uniform() -> StateSpec {
    StateSpec::Named("uniform".into())
}
fn default_method() -> MethodArg {
    MethodArg::Multilevel
}
fn default_regime() -> RegimeArg {
    RegimeArg::TauCutoff
}
fn default_eps() -> f64 {
    1e-2
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub hamiltonian: HamiltonianSpec,
    #[serde(default = "default_uniform")]
    pub initial_state: StateSpec,
    #[serde(default = "default_method")]
    pub method: MethodArg,
    #[serde(default = "default_regime")]
    pub regime: RegimeArg,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Cutoff time; absent means unbounded.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub alpha: f64,
    /// Per-query error for the ledger bound.
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn model(&self) -> Result<FastForwardModel> {
        let tau = self.tau.unwrap_or(f64::INFINITY);
        Ok(FastForwardModel::new(self.regime.into(), tau, self.alpha, self.delta)?)
    }

    /// Validates everything and resolves the problem into the eigenbasis.
    pub fn resolve(&self) -> Result<Problem> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            bail!(mlqsp_core::Error::InvalidArgument(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        self.model()?;
        let (hamiltonian, basis) = self.hamiltonian.build()?;
        let initial = match &self.initial_state {
            StateSpec::Named(name) if name == "uniform" => InitialState::uniform(hamiltonian.dim())?,
            StateSpec::Named(other) => {
                bail!(mlqsp_core::Error::InvalidArgument(format!("unknown initial state {other:?}")))
            }
            StateSpec::Overlap { overlap } => InitialState::with_overlap(hamiltonian.dim(), *overlap)?,
            StateSpec::Amplitudes { amplitudes } => {
                let v: Vec<Complex64> = amplitudes.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                let v = match &basis {
                    Some(b) => b.to_eigenbasis(&v)?,
                    None => v,
                };
                InitialState::new(v)?
            }
        };
        Ok(Problem {
            hamiltonian,
            initial,
            basis,
        })
    }
}

/// Eigenbasis problem plus the basis change when the input was a dense matrix.
#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: SpectralHamiltonian,
    pub initial: InitialState,
    pub basis: Option<Eigenbasis>,
}

/// Columns are eigenvectors in ascending eigenvalue order.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub vectors: DMatrix<Complex64>,
}

impl Eigenbasis {
    pub fn to_eigenbasis(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.vectors.nrows() {
            bail!(mlqsp_core::Error::InvalidArgument(format!(
                "state has {} amplitudes but the matrix is {}x{}",
                v.len(),
                self.vectors.nrows(),
                self.vectors.ncols()
            )));
        }
        let x = nalgebra::DVector::from_column_slice(v);
        Ok((self.vectors.adjoint() * x).iter().copied().collect())
    }

    pub fn to_input_basis(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.vectors * x).iter().copied().collect()
    }
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<(SpectralHamiltonian, Option<Eigenbasis>)> {
        match self {
            HamiltonianSpec::Spectrum {
                eigenvalues,
                mu,
                gap,
                spectral_radius,
            } => {
                let h = match spectral_radius {
                    Some(r) => SpectralHamiltonian::with_spectral_radius(eigenvalues.clone(), *mu, *gap, *r)?,
                    None => SpectralHamiltonian::new(eigenvalues.clone(), *mu, *gap)?,
                };
                Ok((h, None))
            }
            HamiltonianSpec::EquallySpaced { equally_spaced, mu, gap } => Ok((
                SpectralHamiltonian::equally_spaced(equally_spaced.n, equally_spaced.max, *mu, *gap)?,
                None,
            )),
            HamiltonianSpec::Dense {
                dense_hermitian,
                mu,
                gap,
                spectral_radius,
            } => {
                let (eigs, basis) = diagonalize(dense_hermitian)?;
                let (mu, gap) = match (mu, gap, eigs.get(1)) {
                    (Some(m), Some(g), _) => (*m, *g),
                    (None, None, Some(&l1)) => (0.5 * (eigs[0] + l1), l1 - eigs[0]),
                    _ => bail!(mlqsp_core::Error::InvalidArgument(
                        "give both mu and gap, or neither for a matrix with at least two eigenvalues".into()
                    )),
                };
                let h = match spectral_radius {
                    Some(r) => SpectralHamiltonian::with_spectral_radius(eigs, mu, gap, *r)?,
                    None => SpectralHamiltonian::new(eigs, mu, gap)?,
                };
                Ok((h, Some(basis)))
            }
        }
    }
}

const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Ascending eigenvalues and the matching eigenvectors of a Hermitian matrix.
pub fn diagonalize(rows: &[Vec<Pair>]) -> Result<(Vec<f64>, Eigenbasis)> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!(mlqsp_core::Error::InvalidArgument("dense_hermitian must be a nonempty square matrix".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
    let skew = (&m - m.adjoint()).norm();
    if skew > HERMITIAN_TOLERANCE * m.norm().max(1.0) {
        bail!(mlqsp_core::Error::InvalidArgument(format!(
            "matrix is not Hermitian (|M - M^dag|_F = {skew:e})"
        )));
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, Eigenbasis { vectors }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"hamiltonian": {"eigenvalues": [0, 1, 2, 4], "mu": 0.5, "gap": 1}}"#).unwrap();
        assert_eq!(c.method, MethodArg::Multilevel);
        assert_eq!(c.initial_state, default_uniform());
        let p = c.resolve().unwrap();
        assert_eq!(p.hamiltonian.dim(), 4);
        assert!(p.basis.is_none());
    }

    #[test]
    fn pauli_x_diagonalized() {
        // H = 1 + X has eigenvalues 0 and 2 with eigenvectors (1, -1)/sqrt2 and (1, 1)/sqrt2
        let rows = vec![vec![[1.0, 0.0], [1.0, 0.0]], vec![[1.0, 0.0], [1.0, 0.0]]];
        let (eigs, basis) = diagonalize(&rows).unwrap();
        assert!((eigs[0]).abs() < 1e-12 && (eigs[1] - 2.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ground = basis.to_eigenbasis(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]).unwrap();
        assert!((ground[0].norm() - 1.0).abs() < 1e-12);
        assert!(ground[1].norm() < 1e-12);
        let back = basis.to_input_basis(&ground);
        assert!((back[0].re - s).abs() < 1e-12 && (back[1].re + s).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let rows = vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]];
        assert!(diagonalize(&rows).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"hamiltonian": {"eigenvalues": [0, 1], "mu": 0.5, "gap": 1}, "epsilon": 1}"#);
        assert!(r.is_err());
    }
}
