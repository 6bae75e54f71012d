// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each loads a JSON config, runs one
//! analysis from `nvforge-core`, and writes its artifact set plus
//! `run_metadata.json` into the output directory.

use anyhow::{Context, Result};
use serde::Serialize;

use nvforge_core::budget;
use nvforge_core::gates;
use nvforge_core::grape;
use nvforge_core::strain;
use nvforge_core::zeeman;

use crate::config::{
    self, ErrorBudgetConfig, GatesConfig, GrapeConfig, StrainScanConfig, ZeemanScanConfig,
};
use crate::emit::{self, OutDir, RunMetadata};
use crate::RunArgs;

pub fn zeeman_scan(args: &RunArgs) -> Result<()> {
    let cfg: ZeemanScanConfig = config::load(&args.config)?;
    config::check_schema(cfg.schema_version)?;
    let out = OutDir::create(&args.out)?;
    let p = zeeman::ZeemanParameters::default();

    let rows = zeeman::scan_rows(cfg.b_min_gauss, cfg.b_max_gauss, cfg.scan_step_gauss, &p)
        .context("scanning transition curves")?;
    out.write_csv("transitions.csv", &rows)?;

    let windows = zeeman::cross_relaxation_windows(
        cfg.b_min_gauss,
        cfg.b_max_gauss,
        cfg.scan_step_gauss,
        cfg.window_guard_mhz,
        &p,
    )
    .context("detecting cross-relaxation-free windows")?;

    #[derive(Serialize)]
    struct WindowsFile {
        schema_version: u32,
        guard_mhz: f64,
        windows: Vec<zeeman::FieldWindow>,
    }
    out.write_json(
        "windows.json",
        &WindowsFile {
            schema_version: config::SCHEMA_VERSION,
            guard_mhz: cfg.window_guard_mhz,
            windows,
        },
    )?;

    let meta = RunMetadata::new(
        "zeeman-scan",
        &["transitions.csv", "windows.json", "run_metadata.json"],
    );
    out.write_json("run_metadata.json", &meta)
}

pub fn strain_scan(args: &RunArgs) -> Result<()> {
    let cfg: StrainScanConfig = config::load(&args.config)?;
    config::check_schema(cfg.schema_version)?;
    let out = OutDir::create(&args.out)?;

    let rows = strain::scan_rows(
        cfg.strain_max,
        cfg.n_points,
        &strain::StrainCouplings::default(),
        strain::POISSON_RATIO_DIAMOND,
    )
    .context("scanning optical detunings")?;
    out.write_csv("detunings.csv", &rows)?;

    let meta = RunMetadata::new("strain-scan", &["detunings.csv", "run_metadata.json"]);
    out.write_json("run_metadata.json", &meta)
}

pub fn gates(args: &RunArgs) -> Result<()> {
    let cfg: GatesConfig = config::load(&args.config)?;
    config::check_schema(cfg.schema_version)?;
    let out = OutDir::create(&args.out)?;

    #[derive(Serialize)]
    struct ConstructionReport {
        name: String,
        fidelity_vs_ideal: f64,
        duration_us: f64,
        census: gates::GateCensus,
    }

    #[derive(Serialize)]
    struct SequenceFile {
        schema_version: u32,
        name: String,
        sequence: gates::GateSequence,
    }

    #[derive(Serialize)]
    struct ReportFile {
        schema_version: u32,
        nu_dip_khz: f64,
        rabi_mhz: f64,
        constructions: Vec<ConstructionReport>,
    }

    let mut reports = Vec::new();
    let mut outputs = vec!["report.json".to_string()];
    for construction in gates::named_constructions().context("building gate constructions")? {
        let compiled = gates::compile(&construction.sequence)
            .with_context(|| format!("compiling {}", construction.name))?;
        let fidelity = grape::fidelity(&compiled, &construction.ideal)?;
        let duration_us =
            gates::total_gate_time(&construction.sequence, cfg.nu_dip_khz, cfg.rabi_mhz)?;
        reports.push(ConstructionReport {
            name: construction.name.to_string(),
            fidelity_vs_ideal: fidelity,
            duration_us,
            census: construction.census,
        });

        let seq_name = format!("{}_sequence.json", construction.name);
        out.write_json(
            &seq_name,
            &SequenceFile {
                schema_version: config::SCHEMA_VERSION,
                name: construction.name.to_string(),
                sequence: construction.sequence,
            },
        )?;
        outputs.push(seq_name);

        let unitary_name = format!("{}_unitary.csv", construction.name);
        let (header, rows) = emit::matrix_csv(&compiled);
        out.write_csv_records(&unitary_name, &header, &rows)?;
        outputs.push(unitary_name);
    }
    out.write_json(
        "report.json",
        &ReportFile {
            schema_version: config::SCHEMA_VERSION,
            nu_dip_khz: cfg.nu_dip_khz,
            rabi_mhz: cfg.rabi_mhz,
            constructions: reports,
        },
    )?;

    outputs.push("run_metadata.json".to_string());
    let output_refs: Vec<&str> = outputs.iter().map(|s| s.as_str()).collect();
    let meta = RunMetadata::new("gates", &output_refs);
    out.write_json("run_metadata.json", &meta)
}

pub fn error_budget(args: &RunArgs) -> Result<()> {
    let cfg: ErrorBudgetConfig = config::load(&args.config)?;
    config::check_schema(cfg.schema_version)?;
    let out = OutDir::create(&args.out)?;

    let result = budget::error_probability(&cfg.params).context("evaluating error budget")?;

    #[derive(Serialize)]
    struct BudgetFile {
        schema_version: u32,
        params: budget::ErrorParams,
        budget: budget::ErrorBudget,
        dipolar_formula_value: f64,
        dipolar_tabulated_value: f64,
        dipolar_note: String,
    }
    out.write_json(
        "budget.json",
        &BudgetFile {
            schema_version: config::SCHEMA_VERSION,
            params: cfg.params,
            budget: result,
            dipolar_formula_value: result.p_dip,
            dipolar_tabulated_value: budget::TABULATED_DIPOLAR_ERROR,
            dipolar_note: budget::dipolar_note(&result),
        },
    )?;

    let meta = RunMetadata::new("error-budget", &["budget.json", "run_metadata.json"]);
    out.write_json("run_metadata.json", &meta)
}

pub fn grape(args: &RunArgs) -> Result<()> {
    let cfg: GrapeConfig = config::load(&args.config)?;
    config::check_schema(cfg.schema_version)?;
    let out = OutDir::create(&args.out)?;
    let seed = args.seed.unwrap_or(cfg.seed);

    let couplings = cfg.couplings_khz.pair_list(cfg.n_qubits);
    let target = cfg.target.to_matrix(cfg.n_qubits)?;
    let problem = grape::ControlProblem::new(
        cfg.n_qubits,
        &couplings,
        cfg.quarter_coupling,
        cfg.n_slices,
        cfg.slice_us,
        target.clone(),
        cfg.amplitude_bound_mhz,
    )
    .context("setting up control problem")?;

    let init = grape::PulseSequence::seeded_uniform(
        cfg.n_slices,
        problem.n_controls(),
        cfg.slice_us,
        cfg.init_scale_mhz,
        seed,
    );
    let options = grape::OptimizeOptions {
        max_iters: cfg.max_iters,
        target_fidelity: cfg.target_fidelity,
        step_rule: grape::StepRule::Backtracking { initial_step: 1.0 },
    };
    let result = grape::optimize(&problem, &init, &options).context("optimizing pulses")?;
    let optimized = grape::propagate(&problem, &result.pulses)?;

    #[derive(Serialize)]
    struct PulseRow {
        slice_index: usize,
        control_name: String,
        amplitude_mhz: f64,
    }
    let mut pulse_rows = Vec::new();
    for (k, row) in result.pulses.amplitudes.iter().enumerate() {
        for (c, &amplitude) in row.iter().enumerate() {
            pulse_rows.push(PulseRow {
                slice_index: k,
                control_name: problem.control_names[c].clone(),
                amplitude_mhz: amplitude,
            });
        }
    }
    out.write_csv("pulses.csv", &pulse_rows)?;

    #[derive(Serialize)]
    struct TraceRow {
        iteration: usize,
        fidelity: f64,
    }
    let trace_rows: Vec<TraceRow> = result
        .fidelity_trace
        .iter()
        .enumerate()
        .map(|(iteration, &fidelity)| TraceRow {
            iteration,
            fidelity,
        })
        .collect();
    out.write_csv("fidelity_trace.csv", &trace_rows)?;

    #[derive(Serialize)]
    struct ChiFile {
        schema_version: u32,
        labels: Vec<String>,
        chi: Vec<Vec<emit::ReIm>>,
    }
    let chi_file = |process: &grape::ProcessMatrix| ChiFile {
        schema_version: config::SCHEMA_VERSION,
        labels: process.labels(),
        chi: emit::matrix_to_json(&process.chi),
    };
    let chi_opt = grape::chi_matrix(&optimized, cfg.n_qubits)
        .context("process tomography of optimized pulse")?;
    out.write_json("chi_optimized.json", &chi_file(&chi_opt))?;
    let chi_ideal =
        grape::chi_matrix(&target, cfg.n_qubits).context("process tomography of target")?;
    out.write_json("chi_ideal.json", &chi_file(&chi_ideal))?;

    let mut meta = RunMetadata::new(
        "grape",
        &[
            "pulses.csv",
            "fidelity_trace.csv",
            "chi_optimized.json",
            "chi_ideal.json",
            "run_metadata.json",
        ],
    );
    meta.seed = Some(seed);
    meta.converged = Some(result.converged);
    meta.final_fidelity = Some(result.fidelity);
    meta.iterations = Some(result.iterations);
    out.write_json("run_metadata.json", &meta)
}
