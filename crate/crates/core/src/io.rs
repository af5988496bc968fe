//! CSV and JSON sidecar files for sample batches.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::couplings::{Approximation, CouplingKind, MatrixBatch, SampleBatch};
use crate::error::{Error, Result};
use crate::generators::CharacteristicGenerator;

/// Metadata written next to a CSV of draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub seed: u64,
    pub rows: usize,
    pub joint_center: Option<f64>,
    pub kind: CouplingKind,
    pub generator: Option<CharacteristicGenerator>,
    pub approximation: Option<Approximation>,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl Sidecar {
    pub fn for_batch(batch: &SampleBatch<f64>, config: serde_json::Value) -> Self {
        Self {
            seed: batch.seed,
            rows: batch.len(),
            joint_center: batch.joint_center,
            kind: batch.kind,
            generator: batch.generator.clone(),
            approximation: batch.approximation,
            config,
        }
    }

    pub fn for_matrix(batch: &MatrixBatch<f64>, config: serde_json::Value) -> Self {
        Self {
            seed: batch.seed,
            rows: batch.len(),
            joint_center: Some(0.0),
            kind: CouplingKind::MatrixVariate,
            generator: Some(batch.generator.clone()),
            approximation: None,
            config,
        }
    }
}

/// Shortest round-trip representation, so files reload bit-identically.
pub fn format_value(x: f64) -> String {
    format!("{x:e}")
}

fn header(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("X{j}")).collect()
}

/// Header `X1..Xn`, plus the row sum `S` when `with_sum` is set.
pub fn write_batch_csv<W: Write>(batch: &SampleBatch<f64>, writer: W, with_sum: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut head = header(batch.n_vars);
    if with_sum {
        head.push("S".into());
    }
    w.write_record(&head)?;
    let sums = batch.row_sums();
    for (row, s) in batch.rows().zip(sums) {
        let mut rec: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        if with_sum {
            rec.push(format_value(s));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row per draw and coordinate: `draw, coord, X1..Xn`.
pub fn write_matrix_csv<W: Write>(batch: &MatrixBatch<f64>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut head = vec!["draw".to_string(), "coord".to_string()];
    head.extend(header(batch.n));
    w.write_record(&head)?;
    for d in 0..batch.len() {
        for i in 0..batch.p {
            let mut rec = vec![d.to_string(), i.to_string()];
            rec.extend((0..batch.n).map(|j| format_value(batch.vector(d, j)[i])));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the `X*` columns of a batch CSV; other columns such as `S` are ignored.
pub fn read_batch_csv<R: Read>(reader: R) -> Result<SampleBatch<f64>> {
    let mut r = csv::Reader::from_reader(reader);
    let cols: Vec<usize> = r
        .headers()?
        .iter()
        .enumerate()
        .filter(|(_, h)| h.trim().starts_with('X'))
        .map(|(i, _)| i)
        .collect();
    if cols.is_empty() {
        return Err(Error::Parse("CSV header has no X columns".into()));
    }
    let mut data = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for &c in &cols {
            let field = rec.get(c).ok_or_else(|| Error::Parse(format!("row {} is short", line + 1)))?;
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}, column {}: {e}", line + 1, c + 1)))?;
            data.push(x);
        }
    }
    Ok(SampleBatch::external(cols.len(), data))
}

/// Sidecar path for a CSV output: `out.csv` becomes `out.csv.json`.
pub fn sidecar_path(csv: &std::path::Path) -> std::path::PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
