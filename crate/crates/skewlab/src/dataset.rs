//! Dataset schemas, CSV ingestion with missing-value filtering, and
//! deterministic synthetic stand-ins shaped like the two benchmark tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkewError};
use crate::params::{ClassicalParams, SdbParams};
use crate::sample::{sample_classical, sample_sdb};
use crate::spd::SpdMatrix;

/// Declares which columns of a CSV file form the continuous block and which
/// single categorical column is the reference label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub continuous: Vec<String>,
    pub label: String,
}

impl DatasetSchema {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let schema: DatasetSchema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.continuous.is_empty() {
            return Err(SkewError::InvalidParameter(
                "schema needs at least one continuous column".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.continuous {
            if !seen.insert(c.as_str()) {
                return Err(SkewError::InvalidParameter(format!(
                    "duplicate continuous column {c}"
                )));
            }
        }
        if seen.contains(self.label.as_str()) {
            return Err(SkewError::InvalidParameter(format!(
                "label column {} also declared continuous",
                self.label
            )));
        }
        Ok(())
    }
}

/// In-memory table: a dense continuous block plus one label string per row.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub continuous_names: Vec<String>,
    pub values: DMatrix<f64>,
    pub labels: Vec<String>,
    /// Rows removed during ingestion because a continuous cell or the label
    /// was missing.
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Label strings mapped to indices of the sorted distinct levels, so the
    /// coding does not depend on row order.
    pub fn label_codes(&self) -> Vec<usize> {
        let mut levels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        levels.sort_unstable();
        levels.dedup();
        let index: BTreeMap<&str, usize> =
            levels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        self.labels.iter().map(|l| index[l.as_str()]).collect()
    }

    pub fn label_level_count(&self) -> usize {
        let mut levels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len()
    }

    /// Column block selected by name, in the order requested.
    pub fn columns(&self, names: &[String]) -> Result<DMatrix<f64>> {
        let mut idx = Vec::with_capacity(names.len());
        for name in names {
            match self.continuous_names.iter().position(|c| c == name) {
                Some(j) => idx.push(j),
                None => return Err(SkewError::MissingColumn(name.clone())),
            }
        }
        let n = self.n();
        let mut out = DMatrix::zeros(n, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..n {
                out[(i, k)] = self.values[(i, j)];
            }
        }
        Ok(out)
    }

    /// Writes header plus rows as CSV, continuous columns first, label last.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = self.continuous_names.iter().map(String::as_str).collect();
        header.push("label");
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec: Vec<String> = (0..self.values.ncols())
                .map(|j| format!("{:.6}", self.values[(i, j)]))
                .collect();
            rec.push(self.labels[i].clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

/// Reads a headered CSV against `schema`. Rows with a missing continuous
/// cell or missing label are dropped (counted in `dropped_rows`); cells that
/// are present but not numeric fail the whole ingestion with the offending
/// data-row numbers (1-based, header excluded).
pub fn ingest_csv(path: &Path, schema: &DatasetSchema) -> Result<Dataset> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| SkewError::MissingColumn(name.to_string()))
    };
    let cont_idx: Vec<usize> = schema
        .continuous
        .iter()
        .map(|c| col_index(c))
        .collect::<Result<_>>()?;
    let label_idx = col_index(&schema.label)?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut dropped = 0usize;
    let mut bad: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let label = record.get(label_idx).unwrap_or("");
        let incomplete = is_missing(label)
            || cont_idx
                .iter()
                .any(|&ci| is_missing(record.get(ci).unwrap_or("")));
        if incomplete {
            dropped += 1;
            continue;
        }
        let mut vals = Vec::with_capacity(cont_idx.len());
        for (k, &ci) in cont_idx.iter().enumerate() {
            let cell = record.get(ci).unwrap_or("");
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => vals.push(v),
                _ => {
                    bad.entry(schema.continuous[k].clone())
                        .or_default()
                        .push(row_no + 1);
                }
            }
        }
        if vals.len() == cont_idx.len() {
            rows.push(vals);
            labels.push(label.to_string());
        }
    }
    if let Some((column, rows)) = bad.into_iter().next() {
        return Err(SkewError::BadNumeric { column, rows });
    }
    if rows.is_empty() {
        return Err(SkewError::InvalidParameter(format!(
            "no complete rows left in {} after filtering",
            path.display()
        )));
    }
    let n = rows.len();
    let p = cont_idx.len();
    let values = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    Ok(Dataset {
        name: schema.name.clone(),
        continuous_names: schema.continuous.clone(),
        values,
        labels,
        dropped_rows: dropped,
    })
}

/// Reads only the named continuous columns from a headered CSV, without a
/// schema or label. Same filtering contract as `ingest_csv`: incomplete rows
/// drop (second return value counts them), non-numeric cells fail with row
/// numbers.
pub fn read_continuous_csv(path: &Path, columns: &[String]) -> Result<(DMatrix<f64>, usize)> {
    if columns.is_empty() {
        return Err(SkewError::InvalidParameter(
            "need at least one column name".into(),
        ));
    }
    let schema = DatasetSchema {
        name: "unnamed".into(),
        continuous: columns.to_vec(),
        label: "\u{0}internal-no-label".into(),
    };
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let cont_idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| SkewError::MissingColumn(c.clone()))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dropped = 0usize;
    let mut bad: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        if cont_idx
            .iter()
            .any(|&ci| is_missing(record.get(ci).unwrap_or("")))
        {
            dropped += 1;
            continue;
        }
        let mut vals = Vec::with_capacity(cont_idx.len());
        for (k, &ci) in cont_idx.iter().enumerate() {
            match record.get(ci).unwrap_or("").parse::<f64>() {
                Ok(v) if v.is_finite() => vals.push(v),
                _ => bad
                    .entry(columns[k].clone())
                    .or_default()
                    .push(row_no + 1),
            }
        }
        if vals.len() == cont_idx.len() {
            rows.push(vals);
        }
    }
    if let Some((column, rows)) = bad.into_iter().next() {
        return Err(SkewError::BadNumeric { column, rows });
    }
    if rows.is_empty() {
        return Err(SkewError::InvalidParameter(format!(
            "no complete rows left in {} after filtering",
            path.display()
        )));
    }
    let values = DMatrix::from_fn(rows.len(), columns.len(), |i, j| rows[i][j]);
    Ok((values, dropped))
}

fn correlation_with_decay(d: usize, decay: f64, floor: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            1.0
        } else {
            decay.powi((i as i32 - j as i32).abs()) + floor
        }
    })
}

fn scaled_spd(corr: &DMatrix<f64>, scales: &[f64]) -> SpdMatrix {
    let d = scales.len();
    let m = DMatrix::from_fn(d, d, |i, j| corr[(i, j)] * scales[i] * scales[j]);
    SpdMatrix::new(m).expect("scaled correlation stays positive definite")
}

fn group_block(
    xi: &[f64],
    scale: &SpdMatrix,
    alpha: &[f64],
    n: usize,
    seed: u64,
) -> DMatrix<f64> {
    let p = ClassicalParams::new(
        DVector::from_row_slice(xi),
        scale.clone(),
        DVector::from_row_slice(alpha),
        None,
    )
    .expect("stand-in parameters are valid");
    sample_classical(&p, n, seed).expect("stand-in sampling cannot fail")
}

fn group_block_diag_slant(
    xi: &[f64],
    scale: &SpdMatrix,
    lambda: &[f64],
    n: usize,
    seed: u64,
) -> DMatrix<f64> {
    let p = SdbParams::new(
        DVector::from_row_slice(xi),
        scale.clone(),
        DVector::from_row_slice(lambda),
        None,
    )
    .expect("stand-in parameters are valid");
    sample_sdb(&p, n, seed).expect("stand-in sampling cannot fail")
}

fn stack_groups(
    name: &str,
    cols: &[&str],
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    label_a: &str,
    label_b: &str,
) -> Dataset {
    let p = a.ncols();
    let n = a.nrows() + b.nrows();
    let mut values = DMatrix::zeros(n, p);
    values.view_mut((0, 0), (a.nrows(), p)).copy_from(&a);
    values.view_mut((a.nrows(), 0), (b.nrows(), p)).copy_from(&b);
    let mut labels = vec![label_a.to_string(); a.nrows()];
    labels.extend(vec![label_b.to_string(); b.nrows()]);
    Dataset {
        name: name.to_string(),
        continuous_names: cols.iter().map(|c| c.to_string()).collect(),
        values,
        labels,
        dropped_rows: 0,
    }
}

/// Deterministic stand-in with the shape of the crab morphometry table:
/// 200 rows, five strongly correlated continuous columns, two balanced label
/// groups. Group separation varies across column pairs so subset analyses
/// spread over the ARI range instead of all saturating.
pub fn synthetic_crabs(seed: u64) -> Dataset {
    let cols = ["fl", "rw", "cl", "cw", "bd"];
    let corr = correlation_with_decay(5, 0.82, 0.06);
    let scales = [3.0, 2.2, 5.1, 4.4, 1.9];
    let omega = scaled_spd(&corr, &scales);
    let xi_a = [15.0, 13.0, 30.0, 34.0, 12.0];
    let xi_b = [17.2, 11.9, 32.8, 37.5, 12.6];
    let alpha_a = [3.0, 0.0, -2.0, 0.0, 1.0];
    let alpha_b = [-2.0, 1.0, 0.0, 2.0, 0.0];
    let a = group_block(&xi_a, &omega, &alpha_a, 100, seed.wrapping_mul(2).wrapping_add(1));
    let b = group_block(&xi_b, &omega, &alpha_b, 100, seed.wrapping_mul(2).wrapping_add(2));
    stack_groups("crabs-synthetic", &cols, a, b, "B", "O")
}

/// Deterministic stand-in with the shape of the athlete biomedical table:
/// 202 rows, 11 continuous columns, two nearly balanced label groups with
/// group differences concentrated in a few columns. Generated with the
/// diagonal-slant construction so the two stand-ins do not both favor the
/// same formulation.
pub fn synthetic_ais(seed: u64) -> Dataset {
    let cols = [
        "rcc", "wcc", "hc", "hg", "ferr", "bmi", "ssf", "pcbfat", "lbm", "ht", "wt",
    ];
    let corr = correlation_with_decay(11, 0.55, 0.04);
    let scales = [0.46, 1.8, 3.7, 1.3, 47.0, 2.8, 32.0, 5.6, 13.0, 9.7, 13.6];
    let delta = scaled_spd(&corr, &scales);
    let xi_a = [
        4.4, 7.1, 40.2, 13.6, 57.0, 21.8, 87.0, 17.5, 54.9, 174.6, 67.3,
    ];
    let xi_b = [
        5.0, 7.2, 45.6, 15.6, 96.0, 23.0, 52.0, 9.3, 74.7, 185.5, 82.5,
    ];
    // Slants carry the column units.
    let mult_a = [0.0, 1.2, 0.0, 0.0, 1.6, 0.7, 1.0, 0.5, 0.0, 0.0, 0.3];
    let mult_b = [0.3, 1.2, 0.0, -0.5, 1.6, 0.7, 0.5, 1.0, 0.0, 0.0, 0.0];
    let lambda_a: Vec<f64> = mult_a.iter().zip(&scales).map(|(m, s)| m * s).collect();
    let lambda_b: Vec<f64> = mult_b.iter().zip(&scales).map(|(m, s)| m * s).collect();
    let a = group_block_diag_slant(
        &xi_a,
        &delta,
        &lambda_a,
        100,
        seed.wrapping_mul(2).wrapping_add(11),
    );
    let b = group_block_diag_slant(
        &xi_b,
        &delta,
        &lambda_b,
        102,
        seed.wrapping_mul(2).wrapping_add(12),
    );
    stack_groups("ais-synthetic", &cols, a, b, "f", "m")
}
