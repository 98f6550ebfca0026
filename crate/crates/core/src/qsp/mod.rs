//! Quantum signal processing in SU(2).
//!
//! Two phase conventions are in play. QETU phases `phi` parametrize the circuit
//! `e^{i phi_0 X} c-U e^{i phi_1 X} c-U^dag ...` that acts on an eigenvector of
//! `U = e^{-iHt}`. QSP phases `varphi` parametrize
//! `e^{i varphi_0 Z} W(x) e^{i varphi_1 Z} ... W(x) e^{i varphi_d Z}` with
//! `W(x) = e^{i arccos(x) X}`. Both realize the same even polynomial
//! `g(x) = Re <0|U|0>` at `x = cos(t lambda / 2)`, up to a global sign
//! `(-1)^{d/2}` on the QETU side.

mod solver;

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::FRAC_PI_2;
use core::f64::consts::FRAC_PI_4;
use core::ops::Mul;
use libm::{cos, fabs, sin, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::FilterPolynomial;
use crate::spectral::unit_phase;

pub use solver::{solve_symmetric_phase_factors, SolveReport, SOLVER_MAX_ITERATIONS};

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2(pub [[Complex64; 2]; 2]);

impl Su2 {
    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Su2([[o, z], [z, o]])
    }

    /// `e^{i a Z}`.
    pub fn z_rotation(a: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Su2([[unit_phase(a), z], [z, unit_phase(-a)]])
    }

    /// `e^{i a X}`.
    pub fn x_rotation(a: f64) -> Self {
        let c = Complex64::new(cos(a), 0.0);
        let s = Complex64::new(0.0, sin(a));
        Su2([[c, s], [s, c]])
    }

    /// `diag(1, z)`.
    pub fn controlled_phase(z: Complex64) -> Self {
        Su2([[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), z]])
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Su2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entry modulus of `U^dag U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Su2::identity();
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max(sqrt((p.0[r][c] - id.0[r][c]).norm_sqr()));
            }
        }
        worst
    }
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, rhs: Su2) -> Su2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Su2(out)
    }
}

/// `e^{i varphi_0 Z} W(x) e^{i varphi_1 Z} ... W(x) e^{i varphi_d Z}`.
pub fn qsp_unitary(phases: &[f64], x: f64) -> Result<Su2> {
    if !(fabs(x) <= 1.0) {
        return Err(Error::invalid(format!("signal x = {x} lies outside [-1, 1]")));
    }
    if phases.is_empty() {
        return Err(Error::invalid("a QSP sequence needs at least one phase"));
    }
    Ok(qsp_product(phases, x))
}

pub(crate) fn qsp_product(phases: &[f64], x: f64) -> Su2 {
    let s = sqrt((1.0 - x * x).max(0.0));
    let w = Su2([
        [Complex64::new(x, 0.0), Complex64::new(0.0, s)],
        [Complex64::new(0.0, s), Complex64::new(x, 0.0)],
    ]);
    let mut u = Su2::z_rotation(phases[0]);
    for &p in &phases[1..] {
        u = u * w * Su2::z_rotation(p);
    }
    u
}

/// `Re <0| U |0>` for QSP phases, i.e. the induced polynomial at `x`.
pub(crate) fn induced_value(phases: &[f64], x: f64) -> f64 {
    // only the first row is needed: propagate (u00, u01) through the product
    let s = sqrt((1.0 - x * x).max(0.0));
    let mut a = unit_phase(phases[0]);
    let mut b = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    for &p in &phases[1..] {
        let (na, nb) = (a * x + b * i * s, a * i * s + b * x);
        a = na * unit_phase(p);
        b = nb * unit_phase(-p);
    }
    a.re
}

/// Which parametrization a phase vector uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// Angles of the `X` rotations in the QETU circuit.
    Qetu,
    /// Angles of the `Z` rotations in the `W(x)` QSP sequence.
    Qsp,
}

/// Symmetric phase factors of even degree `d` (length `d + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFactorSet {
    phases: Vec<f64>,
    convention: PhaseConvention,
}

impl PhaseFactorSet {
    /// Checks `phases[j] == phases[d - j]` (to 1e-12) and that `d` is even.
    pub fn new(phases: Vec<f64>, convention: PhaseConvention) -> Result<Self> {
        if phases.is_empty() || phases.len().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "symmetric phase sets have odd length d + 1 with d even, got length {}",
                phases.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("phase factors must be finite"));
        }
        let d = phases.len() - 1;
        for j in 0..=d / 2 {
            if fabs(phases[j] - phases[d - j]) > 1e-12 {
                return Err(Error::invalid(format!(
                    "phase factors are not symmetric at j = {j}: {} vs {}",
                    phases[j],
                    phases[d - j]
                )));
            }
        }
        Ok(PhaseFactorSet { phases, convention })
    }

    /// Builds the full symmetric set from its first half `(p_0, ..., p_{d/2})`.
    pub fn from_half(half: &[f64], convention: PhaseConvention) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::invalid("empty phase vector"));
        }
        let mut phases = half.to_vec();
        phases.extend(half.iter().rev().skip(1));
        PhaseFactorSet::new(phases, convention)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn degree(&self) -> usize {
        self.phases.len() - 1
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    /// Phases in the QSP convention, converting if needed.
    pub fn qsp_phases(&self) -> Vec<f64> {
        convert_phases(self, PhaseConvention::Qsp).phases
    }

    /// Phases in the QETU convention, converting if needed.
    pub fn qetu_phases(&self) -> Vec<f64> {
        convert_phases(self, PhaseConvention::Qetu).phases
    }

    /// Value of the induced polynomial `g` at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(qsp_unitary(&self.qsp_phases(), x)?.entry(0, 0).re)
    }
}

/// Offset between conventions at position `j` of a degree-`d` set:
/// `pi/4` at both ends, `pi/2` inside. A degree-zero set has offset zero.
fn convention_offset(j: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else if j == 0 || j == d {
        FRAC_PI_4
    } else {
        FRAC_PI_2
    }
}

/// Re-expresses a phase set in `target`; identity when it already is.
pub fn convert_phases(set: &PhaseFactorSet, target: PhaseConvention) -> PhaseFactorSet {
    if set.convention == target {
        return set.clone();
    }
    let d = set.degree();
    let sign = match target {
        PhaseConvention::Qsp => -1.0,
        PhaseConvention::Qetu => 1.0,
    };
    let phases = set
        .phases
        .iter()
        .enumerate()
        .map(|(j, p)| p + sign * convention_offset(j, d))
        .collect();
    PhaseFactorSet {
        phases,
        convention: target,
    }
}

const GOLDEN_HALF: [f64; 11] = [
    1.5641113, 1.5804045, 1.5942229, 1.5741280, 1.5233379, 1.5189284, 1.6198455, 1.7237235,
    1.5881872, 1.1064466, 0.7862644,
];

/// Published degree-20 QETU phase factors whose filter has uniform error about
/// 0.01333 on `x >= cos(pi/8)` and `0 <= x <= cos(pi/4)`.
pub fn golden_phase_table() -> PhaseFactorSet {
    PhaseFactorSet::from_half(&GOLDEN_HALF, PhaseConvention::Qetu).expect("table is symmetric")
}

/// Polynomial values from one QETU evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Response {
    /// Real part of the success amplitude: the filter value `g(x)`.
    pub g_val: f64,
    /// Imaginary part of the success amplitude.
    pub h_val: f64,
    /// Off-diagonal companion: `<0|U|1> = i q sqrt(1 - x^2)`.
    pub q_val: f64,
    pub x: f64,
}

impl Su2Response {
    /// `g^2 + h^2 + q^2 (1 - x^2)`, which is one for a unitary row.
    pub fn row_norm(&self) -> f64 {
        self.g_val * self.g_val + self.h_val * self.h_val + self.q_val * self.q_val * (1.0 - self.x * self.x)
    }
}

fn response_from(u: &Su2, x: f64) -> Su2Response {
    let s = sqrt((1.0 - x * x).max(0.0));
    let off = u.entry(0, 1);
    let q_val = if s > 0.0 { off.im / s } else { 0.0 };
    Su2Response {
        g_val: u.entry(0, 0).re,
        h_val: u.entry(0, 0).im,
        q_val,
        x,
    }
}

/// Response of the QETU circuit on an eigenvector with eigenvalue `lambda` of
/// `H`, evolving for time `t` per query; `x = cos(t lambda / 2)`.
pub fn qetu_response(phases: &PhaseFactorSet, t: f64, lambda: f64) -> Su2Response {
    let x = cos(0.5 * t * lambda);
    let u = qsp_product(&phases.qsp_phases(), x);
    response_from(&u, x)
}

/// `(-1)^{d/2}`.
pub(crate) fn qetu_sign(degree: usize) -> f64 {
    if (degree / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Explicit QETU circuit on the ancilla for one eigenvalue:
/// `e^{i phi_0 X} c-V_1 e^{i phi_1 X} c-V_2 ... e^{i phi_d X}`, where the
/// controlled evolutions alternate between `e^{+i t lambda}` and
/// `e^{-i t lambda}` and query `j` carries an extra phase `e^{i eta_j}`
/// (`perturbation` may be empty for an exact circuit).
///
/// The result is multiplied by `(-1)^{d/2}` so that its real upper-left entry
/// equals `g(x)` for an exact circuit.
pub fn qetu_circuit(qetu_phases: &[f64], t: f64, lambda: f64, perturbation: &[f64]) -> Su2 {
    let d = qetu_phases.len() - 1;
    let mut u = Su2::x_rotation(qetu_phases[0]);
    for (j, &p) in qetu_phases.iter().enumerate().skip(1) {
        let direction = if j % 2 == 1 { 1.0 } else { -1.0 };
        let eta = perturbation.get(j - 1).copied().unwrap_or(0.0);
        let v = unit_phase(direction * t * lambda + eta);
        u = u * Su2::controlled_phase(v) * Su2::x_rotation(p);
    }
    let sign = Complex64::new(qetu_sign(d), 0.0);
    for row in u.0.iter_mut() {
        for v in row.iter_mut() {
            *v *= sign;
        }
    }
    u
}

/// Even Chebyshev coefficients of the polynomial a phase set induces, by an
/// exact cosine transform at `d/2 + 1` nodes.
pub fn induced_polynomial(phases: &PhaseFactorSet) -> Result<FilterPolynomial> {
    let qsp = phases.qsp_phases();
    let n = phases.degree() / 2;
    let nodes = n + 1;
    let pi = core::f64::consts::PI;
    let angles: Vec<f64> = (0..nodes).map(|j| pi * (j as f64 + 0.5) / nodes as f64).collect();
    let vals: Vec<f64> = angles.iter().map(|&a| induced_value(&qsp, cos(0.5 * a))).collect();
    let coeffs = (0..=n)
        .map(|k| {
            let s: f64 = vals.iter().zip(&angles).map(|(v, a)| v * cos(k as f64 * a)).sum();
            let norm = if k == 0 { 1.0 } else { 2.0 };
            norm * s / nodes as f64
        })
        .collect();
    FilterPolynomial::from_even_coeffs(coeffs, f64::NAN)
}
