// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and gate-synthesis library for spectrally addressed NV-center
//! spin registers: Zeeman transition scans, strain-shifted optical lines,
//! analytic gate compilation, error budgeting, and GRAPE pulse optimization.

pub mod budget;
pub mod gates;
pub mod grape;
pub mod matrix;
pub mod orientation;
pub mod strain;
pub mod zeeman;

use thiserror::Error;

/// Crate-wide error type. Numeric tolerances quoted in messages are the
/// acceptance thresholds of the corresponding operations.
#[derive(Debug, Error)]
pub enum NvError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max |H - H^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max |U U^dag - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    EigNoConvergence { sweeps: usize },
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("{0}")]
    InvalidInput(String),
}

impl NvError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        NvError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, NvError>;
