// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Config schemas. Every file carries `schema_version`; unknown keys are
//! rejected so typos fail loudly instead of silently using defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Deserialize;

use nvforge_core::budget::ErrorParams;
use nvforge_core::gates;
use nvforge_core::grape::PairCoupling;
use nvforge_core::matrix::ComplexMatrix;

pub const SCHEMA_VERSION: u32 = 1;

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        bail!("unsupported schema_version {version}; this build expects {SCHEMA_VERSION}");
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeemanScanConfig {
    pub schema_version: u32,
    pub b_min_gauss: f64,
    pub b_max_gauss: f64,
    pub scan_step_gauss: f64,
    pub window_guard_mhz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrainScanConfig {
    pub schema_version: u32,
    pub strain_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatesConfig {
    pub schema_version: u32,
    pub nu_dip_khz: f64,
    pub rabi_mhz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBudgetConfig {
    pub schema_version: u32,
    pub params: ErrorParams,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapeConfig {
    pub schema_version: u32,
    pub n_qubits: usize,
    pub couplings_khz: CouplingsSpec,
    pub n_slices: usize,
    pub slice_us: f64,
    pub target: TargetSpec,
    pub amplitude_bound_mhz: f64,
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_target_fidelity")]
    pub target_fidelity: f64,
    #[serde(default = "default_init_scale")]
    pub init_scale_mhz: f64,
    #[serde(default = "default_true")]
    pub quarter_coupling: bool,
}

fn default_max_iters() -> usize {
    2000
}

fn default_target_fidelity() -> f64 {
    0.99
}

fn default_init_scale() -> f64 {
    nvforge_core::grape::DEFAULT_INIT_SCALE_MHZ
}

fn default_true() -> bool {
    true
}

/// Either one strength shared by every pair or an explicit pair list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CouplingsSpec {
    Uniform(f64),
    PerPair(Vec<PairCoupling>),
}

impl CouplingsSpec {
    pub fn pair_list(&self, n_qubits: usize) -> Vec<PairCoupling> {
        match self {
            CouplingsSpec::Uniform(nu_khz) => {
                let mut pairs = Vec::new();
                for a in 0..n_qubits {
                    for b in (a + 1)..n_qubits {
                        pairs.push(PairCoupling {
                            pair: (a, b),
                            nu_khz: *nu_khz,
                        });
                    }
                }
                pairs
            }
            CouplingsSpec::PerPair(pairs) => pairs.clone(),
        }
    }
}

/// Target unitary: a named gate or an explicit matrix.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Named(String),
    Matrix(MatrixSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TargetSpec {
    pub fn to_matrix(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        let dim = 1usize << n_qubits;
        let m = match self {
            TargetSpec::Named(name) => match name.as_str() {
                "identity" => ComplexMatrix::identity(dim),
                "cnot" => {
                    if n_qubits != 2 {
                        bail!("named target 'cnot' needs n_qubits = 2");
                    }
                    gates::cnot_matrix(2, 0, 1)?
                }
                "cz" => {
                    if n_qubits != 2 {
                        bail!("named target 'cz' needs n_qubits = 2");
                    }
                    gates::cz_matrix()
                }
                "toffoli" => {
                    if n_qubits != 3 {
                        bail!("named target 'toffoli' needs n_qubits = 3");
                    }
                    gates::toffoli_matrix()
                }
                other => bail!("unknown named target '{other}'"),
            },
            TargetSpec::Matrix(spec) => {
                if spec.re.len() != dim || spec.im.len() != dim {
                    bail!("target matrix must be {dim}x{dim} for n_qubits = {n_qubits}");
                }
                let mut m = ComplexMatrix::zeros(dim);
                for i in 0..dim {
                    if spec.re[i].len() != dim || spec.im[i].len() != dim {
                        bail!("target matrix must be {dim}x{dim} for n_qubits = {n_qubits}");
                    }
                    for j in 0..dim {
                        m.set(i, j, Complex64::new(spec.re[i][j], spec.im[i][j]));
                    }
                }
                m
            }
        };
        Ok(m)
    }
}
