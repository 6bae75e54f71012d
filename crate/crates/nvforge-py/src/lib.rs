// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings for the workbench: transition spectra, addressing
//! windows, strain detunings, analytic gate constructions, error budgets,
//! and pulse optimization with process tomography. Complex matrices cross
//! the boundary as nested lists of `(re, im)` tuples so the module has no
//! numpy requirement.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nvforge_core::budget;
use nvforge_core::gates;
use nvforge_core::grape;
use nvforge_core::matrix::ComplexMatrix;
use nvforge_core::orientation::NvOrientation;
use nvforge_core::strain;
use nvforge_core::zeeman;
use nvforge_core::NvError;

fn value_err(e: NvError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_orientation(label: &str) -> PyResult<NvOrientation> {
    NvOrientation::from_label(label).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown orientation '{label}'; expected one of [-1-1-1], [-111], [1-11], [11-1]"
        ))
    })
}

/// Complex matrix flattened to rows of (re, im) tuples.
type ComplexRows = Vec<Vec<(f64, f64)>>;

fn matrix_tuples(m: &ComplexMatrix) -> ComplexRows {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    (z.re, z.im)
                })
                .collect()
        })
        .collect()
}

fn named_target(name: &str, n_qubits: usize) -> PyResult<ComplexMatrix> {
    let dim = 1usize << n_qubits;
    match name {
        "identity" => Ok(ComplexMatrix::identity(dim)),
        "cnot" if n_qubits == 2 => gates::cnot_matrix(2, 0, 1).map_err(value_err),
        "cz" if n_qubits == 2 => Ok(gates::cz_matrix()),
        "toffoli" if n_qubits == 3 => Ok(gates::toffoli_matrix()),
        _ => Err(PyValueError::new_err(format!(
            "unknown target '{name}' for {n_qubits} qubits"
        ))),
    }
}

/// Angle between distinct NV axes in degrees, arccos(-1/3).
#[pyfunction]
fn tilt_angle_deg() -> f64 {
    nvforge_core::orientation::tilt_angle_deg()
}

/// Ground-state transition frequencies in MHz at an applied field:
/// (|0>->|+1>, |0>->|-1>, |+1>->|-1|).
#[pyfunction]
fn transition_frequencies(b_gauss: f64, orientation: &str) -> PyResult<(f64, f64, f64)> {
    let cfg = zeeman::NvConfiguration::new(parse_orientation(orientation)?);
    let p = zeeman::ZeemanParameters::default();
    let f = zeeman::transition_frequencies(b_gauss, &cfg, &p).map_err(value_err)?;
    Ok((f.zero_to_plus_mhz, f.zero_to_minus_mhz, f.plus_to_minus_mhz))
}

/// P1 impurity Zeeman line in MHz.
#[pyfunction]
fn p1_transition(b_gauss: f64) -> PyResult<f64> {
    zeeman::p1_transition(b_gauss, &zeeman::ZeemanParameters::default()).map_err(value_err)
}

/// Cross-relaxation-free field windows as (b_min_gauss, b_max_gauss,
/// span_mhz) tuples.
#[pyfunction]
fn cross_relaxation_windows(
    b_min_gauss: f64,
    b_max_gauss: f64,
    step_gauss: f64,
    guard_mhz: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let p = zeeman::ZeemanParameters::default();
    let windows =
        zeeman::cross_relaxation_windows(b_min_gauss, b_max_gauss, step_gauss, guard_mhz, &p)
            .map_err(value_err)?;
    Ok(windows
        .into_iter()
        .map(|w| (w.b_min, w.b_max, w.span_mhz))
        .collect())
}

/// How many spectrally distinct NVs fit in a frequency span at a given
/// linewidth.
#[pyfunction]
fn addressable_count(span_mhz: f64, linewidth_mhz: f64) -> PyResult<u64> {
    zeeman::addressable_count(span_mhz, linewidth_mhz).map_err(value_err)
}

/// Optical (Ex, Ey) detunings in GHz under uniaxial cantilever strain.
#[pyfunction]
fn optical_detunings(strain: f64, orientation: &str) -> PyResult<(f64, f64)> {
    let d = strain::ex_detuning_at_strain(
        strain,
        parse_orientation(orientation)?,
        &strain::StrainCouplings::default(),
        strain::POISSON_RATIO_DIAMOND,
    )
    .map_err(value_err)?;
    Ok((d.ex_ghz, d.ey_ghz))
}

/// How many NVs the Ex shift across a strain ramp can address optically.
#[pyfunction]
#[pyo3(signature = (strain_max, linewidth_mhz = strain::OPTICAL_LINEWIDTH_MHZ, orientation = "[-1-1-1]"))]
fn strain_addressable_count(
    strain_max: f64,
    linewidth_mhz: f64,
    orientation: &str,
) -> PyResult<u64> {
    strain::strain_addressable_count(
        strain_max,
        linewidth_mhz,
        parse_orientation(orientation)?,
        &strain::StrainCouplings::default(),
        strain::POISSON_RATIO_DIAMOND,
    )
    .map_err(value_err)
}

/// Dipolar coupling strength in kHz at a separation, scaled from the
/// reference distance by 1/r^3.
#[pyfunction]
#[pyo3(signature = (separation_nm, parallel = true))]
fn dipolar_strength_khz(separation_nm: f64, parallel: bool) -> PyResult<f64> {
    gates::dipolar_strength(separation_nm, parallel).map_err(value_err)
}

/// Six-term gate-error budget; returns the individual probabilities and
/// their total as a dict.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn error_budget(
    gate_time_us: f64,
    t1_ms: f64,
    t2_ms: f64,
    delta1_khz: f64,
    omega_mw_khz: f64,
    omega_opt_mhz: f64,
    delta_mag_mhz: f64,
    delta_str_mhz: f64,
    nu_dip_khz: f64,
) -> PyResult<HashMap<String, f64>> {
    let params = budget::ErrorParams {
        gate_time_us,
        t1_ms,
        t2_ms,
        delta1_khz,
        omega_mw_khz,
        omega_opt_mhz,
        delta_mag_mhz,
        delta_str_mhz,
        nu_dip_khz,
    };
    let b = budget::error_probability(&params).map_err(value_err)?;
    Ok(HashMap::from([
        ("p_t1".to_string(), b.p_t1),
        ("p_t2".to_string(), b.p_t2),
        ("p_mw".to_string(), b.p_mw),
        ("p_mag".to_string(), b.p_mag),
        ("p_str".to_string(), b.p_str),
        ("p_dip".to_string(), b.p_dip),
        ("total".to_string(), b.total),
    ]))
}

/// Names of the analytic gate constructions.
#[pyfunction]
fn construction_names() -> PyResult<Vec<String>> {
    Ok(gates::named_constructions()
        .map_err(value_err)?
        .into_iter()
        .map(|c| c.name.to_string())
        .collect())
}

/// For one named construction: (fidelity vs ideal, (cnot, single) census,
/// duration in us at the given coupling and Rabi rates).
#[pyfunction]
fn construction_report(
    name: &str,
    nu_dip_khz: f64,
    rabi_mhz: f64,
) -> PyResult<(f64, (usize, usize), f64)> {
    let constructions = gates::named_constructions().map_err(value_err)?;
    let c = constructions
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown construction '{name}'")))?;
    let compiled = gates::compile(&c.sequence).map_err(value_err)?;
    let fidelity = grape::fidelity(&compiled, &c.ideal).map_err(value_err)?;
    let duration = gates::total_gate_time(&c.sequence, nu_dip_khz, rabi_mhz).map_err(value_err)?;
    Ok((fidelity, (c.census.cnot, c.census.single), duration))
}

/// Compiled unitary of a named construction as nested (re, im) tuples.
#[pyfunction]
fn construction_unitary(name: &str) -> PyResult<ComplexRows> {
    let constructions = gates::named_constructions().map_err(value_err)?;
    let c = constructions
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown construction '{name}'")))?;
    let compiled = gates::compile(&c.sequence).map_err(value_err)?;
    Ok(matrix_tuples(&compiled))
}

/// Result of a pulse optimization run.
#[pyclass]
struct PulseResult {
    #[pyo3(get)]
    fidelity: f64,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    fidelity_trace: Vec<f64>,
    #[pyo3(get)]
    amplitudes_mhz: Vec<Vec<f64>>,
    #[pyo3(get)]
    control_names: Vec<String>,
    #[pyo3(get)]
    chi_labels: Vec<String>,
    #[pyo3(get)]
    chi: ComplexRows,
}

/// Optimize piecewise-constant pulses toward a named target gate and run
/// process tomography on the optimized propagator. All qubit pairs share
/// one dipolar coupling strength.
#[pyfunction]
#[pyo3(signature = (
    n_qubits,
    nu_khz,
    n_slices,
    slice_us,
    target,
    seed,
    amplitude_bound_mhz = grape::DEFAULT_AMPLITUDE_BOUND_MHZ,
    init_scale_mhz = grape::DEFAULT_INIT_SCALE_MHZ,
    max_iters = 2000,
    target_fidelity = 0.99,
))]
#[allow(clippy::too_many_arguments)]
fn optimize_pulses(
    n_qubits: usize,
    nu_khz: f64,
    n_slices: usize,
    slice_us: f64,
    target: &str,
    seed: u64,
    amplitude_bound_mhz: f64,
    init_scale_mhz: f64,
    max_iters: usize,
    target_fidelity: f64,
) -> PyResult<PulseResult> {
    let target = named_target(target, n_qubits)?;
    let problem = grape::ControlProblem::with_uniform_coupling(
        n_qubits,
        nu_khz,
        n_slices,
        slice_us,
        target,
        amplitude_bound_mhz,
    )
    .map_err(value_err)?;
    let init = grape::PulseSequence::seeded_uniform(
        n_slices,
        problem.n_controls(),
        slice_us,
        init_scale_mhz,
        seed,
    );
    let options = grape::OptimizeOptions {
        max_iters,
        target_fidelity,
        ..Default::default()
    };
    let result = grape::optimize(&problem, &init, &options).map_err(value_err)?;
    let propagator = grape::propagate(&problem, &result.pulses).map_err(value_err)?;
    let chi = grape::chi_matrix(&propagator, n_qubits).map_err(value_err)?;
    Ok(PulseResult {
        fidelity: result.fidelity,
        iterations: result.iterations,
        converged: result.converged,
        fidelity_trace: result.fidelity_trace,
        amplitudes_mhz: result.pulses.amplitudes,
        control_names: problem.control_names.clone(),
        chi_labels: chi.labels(),
        chi: matrix_tuples(&chi.chi),
    })
}

/// chi matrix of a named ideal gate: (labels, matrix as (re, im) tuples).
#[pyfunction]
fn chi_of_named(name: &str, n_qubits: usize) -> PyResult<(Vec<String>, ComplexRows)> {
    let u = named_target(name, n_qubits)?;
    let chi = grape::chi_matrix(&u, n_qubits).map_err(value_err)?;
    Ok((chi.labels(), matrix_tuples(&chi.chi)))
}

#[pymodule]
fn nvforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tilt_angle_deg, m)?)?;
    m.add_function(wrap_pyfunction!(transition_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(p1_transition, m)?)?;
    m.add_function(wrap_pyfunction!(cross_relaxation_windows, m)?)?;
    m.add_function(wrap_pyfunction!(addressable_count, m)?)?;
    m.add_function(wrap_pyfunction!(optical_detunings, m)?)?;
    m.add_function(wrap_pyfunction!(strain_addressable_count, m)?)?;
    m.add_function(wrap_pyfunction!(dipolar_strength_khz, m)?)?;
    m.add_function(wrap_pyfunction!(error_budget, m)?)?;
    m.add_function(wrap_pyfunction!(construction_names, m)?)?;
    m.add_function(wrap_pyfunction!(construction_report, m)?)?;
    m.add_function(wrap_pyfunction!(construction_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_pulses, m)?)?;
    m.add_function(wrap_pyfunction!(chi_of_named, m)?)?;
    m.add_class::<PulseResult>()?;
    Ok(())
}
