//! Multi-level QETU ground-state preparation with fast-forwarded Hamiltonian
//! evolution, plus the LCU and single-shot QSP baselines it is measured against.
//!
//! Everything here acts in the eigenbasis of the Hamiltonian: every circuit the
//! algorithms use is diagonal there, so a spectral description is exact.
//!
//! * [`spectral`]: Hamiltonian, initial state, fast-forwarding model, query ledger.
//! * [`filter`]: even Chebyshev filter polynomials and Fourier Heaviside filters.
//! * [`qsp`]: SU(2) products, QETU responses, symmetric phase-factor solver.
//! * [`pipeline`]: end-to-end runs (multi-level measured/coherent, clean-up,
//!   standard QSP, LCU) and oracle-error injection.
//! * [`cost`]: closed-form scaling estimates for the three methods.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cost;
pub mod error;
pub mod filter;
pub(crate) mod linalg;
pub mod pipeline;
pub mod qsp;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
