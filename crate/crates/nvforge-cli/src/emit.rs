// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Artifact writers. Output is deterministic by construction: no
//! timestamps, no absolute paths, JSON pretty-printed with a trailing
//! newline, CSV with a header row. Rerunning a command with the same
//! config and seed reproduces every file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Serialize;

use nvforge_core::matrix::ComplexMatrix;

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        fs::create_dir_all(path)
            .with_context(|| format!("creating output directory {}", path.display()))?;
        Ok(OutDir {
            root: path.to_path_buf(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
        text.push('\n');
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// CSV file whose header comes from the row struct's field names.
    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.path(name);
        let mut writer =
            csv::Writer::from_path(&path).with_context(|| format!("opening {}", path.display()))?;
        for row in rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// CSV file with an explicit header, for tables whose width depends on
    /// the data (e.g. unitary matrices).
    pub fn write_csv_records(
        &self,
        name: &str,
        header: &[String],
        rows: &[Vec<String>],
    ) -> Result<()> {
        let path = self.path(name);
        let mut writer =
            csv::Writer::from_path(&path).with_context(|| format!("opening {}", path.display()))?;
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Exit metadata recording what ran and what it produced. Optimization
/// commands additionally report convergence.
#[derive(Serialize)]
pub struct RunMetadata {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl RunMetadata {
    pub fn new(command: &str, outputs: &[&str]) -> Self {
        RunMetadata {
            schema_version: crate::config::SCHEMA_VERSION,
            command: command.to_string(),
            seed: None,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            converged: None,
            final_fidelity: None,
            iterations: None,
        }
    }
}

#[derive(Serialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

/// Complex matrix as nested arrays of `{re, im}` objects.
pub fn matrix_to_json(m: &ComplexMatrix) -> Vec<Vec<ReIm>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| ReIm::from(m.get(i, j))).collect())
        .collect()
}

/// Complex matrix as CSV rows: row index, then interleaved re/im columns.
pub fn matrix_csv(m: &ComplexMatrix) -> (Vec<String>, Vec<Vec<String>>) {
    let dim = m.dim();
    let mut header = vec!["row_index".to_string()];
    for j in 0..dim {
        header.push(format!("col{j}_re"));
        header.push(format!("col{j}_im"));
    }
    let rows = (0..dim)
        .map(|i| {
            let mut row = vec![i.to_string()];
            for j in 0..dim {
                let z = m.get(i, j);
                row.push(format!("{}", z.re));
                row.push(format!("{}", z.im));
            }
            row
        })
        .collect();
    (header, rows)
}
