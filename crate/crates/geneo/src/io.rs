//! File formats: group JSON, measure JSON, matrix CSV and signal CSV.
//!
//! Groups: `{ "degree": n, "generators": [[images...] | "(1 2)(3 4)", ...] }`
//! with 0-based image arrays; cycle-notation strings are 1-based.
//! Measures: JSON array of `{ "perm": [images...], "weight": w }`.
//! Matrices: `n` CSV rows of `n` decimals, row `i` = matrix row `i`.
//! Signals: a single CSV row.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::operator::{OperatorMatrix, Signal};
use crate::perm::{Permutation, PermutationGroup};

#[derive(Debug, Deserialize)]
struct GroupFile {
    degree: usize,
    generators: Vec<GeneratorSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GeneratorSpec {
    Images(Vec<usize>),
    Cycles(String),
}

/// Parses a group description and closes the generators.
pub fn parse_group_json(text: &str) -> Result<PermutationGroup> {
    let file: GroupFile = serde_json::from_str(text)?;
    if file.degree == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    if file.generators.is_empty() {
        return Err(Error::InvalidInput("generator list is empty".into()));
    }
    let mut generators = Vec::with_capacity(file.generators.len());
    for spec in file.generators {
        let p = match spec {
            GeneratorSpec::Images(images) => {
                if images.len() != file.degree {
                    return Err(Error::InvalidInput(format!(
                        "generator has {} images, expected degree {}",
                        images.len(),
                        file.degree
                    )));
                }
                Permutation::from_images(images)?
            }
            GeneratorSpec::Cycles(text) => Permutation::from_cycles(&text, file.degree)?,
        };
        generators.push(p);
    }
    PermutationGroup::close(&generators)
}

pub fn read_group_json(path: &Path) -> Result<PermutationGroup> {
    parse_group_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureEntry {
    perm: Vec<usize>,
    weight: f64,
}

/// Parses a measure file, rejecting duplicate permutations.
pub fn parse_measure_json(text: &str) -> Result<SignedMeasure> {
    let entries: Vec<MeasureEntry> = serde_json::from_str(text)?;
    let first = entries
        .first()
        .ok_or_else(|| Error::InvalidInput("measure file is empty".into()))?;
    let degree = first.perm.len();
    let mut seen = std::collections::BTreeSet::new();
    let mut pairs = Vec::with_capacity(entries.len());
    for entry in &entries {
        let p = Permutation::from_images(entry.perm.clone())?;
        if p.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: p.degree(),
            });
        }
        if !seen.insert(p.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate permutation {p} in measure file"
            )));
        }
        pairs.push((p, entry.weight));
    }
    SignedMeasure::new(degree, pairs)
}

pub fn read_measure_json(path: &Path) -> Result<SignedMeasure> {
    parse_measure_json(&std::fs::read_to_string(path)?)
}

/// Serializes a measure as a JSON array in canonical support order.
pub fn measure_to_json(m: &SignedMeasure) -> String {
    let entries: Vec<MeasureEntry> = m
        .support()
        .map(|(h, w)| MeasureEntry {
            perm: h.images().to_vec(),
            weight: w,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("measure serialization cannot fail")
}

pub fn write_measure_json(m: &SignedMeasure, path: &Path) -> Result<()> {
    std::fs::write(path, measure_to_json(m))?;
    Ok(())
}

/// Parses a dense square matrix from CSV text.
pub fn parse_matrix_csv(text: &str) -> Result<OperatorMatrix> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|line| !line.trim().is_empty())
        .map(parse_csv_row)
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(Error::InvalidInput("matrix file is empty".into()));
    }
    OperatorMatrix::from_rows(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<OperatorMatrix> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn matrix_to_csv(m: &OperatorMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &OperatorMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

/// Parses a signal from a single CSV row.
pub fn parse_signal_csv(text: &str) -> Result<Signal> {
    let mut rows = text.lines().filter(|line| !line.trim().is_empty());
    let row = rows
        .next()
        .ok_or_else(|| Error::InvalidInput("signal file is empty".into()))?;
    if rows.next().is_some() {
        return Err(Error::InvalidInput(
            "signal file must contain a single row".into(),
        ));
    }
    Signal::new(parse_csv_row(row)?)
}

pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    parse_signal_csv(&std::fs::read_to_string(path)?)
}

pub fn signal_to_csv(s: &Signal) -> String {
    let row: Vec<String> = s.values().iter().map(|v| format!("{v}")).collect();
    format!("{}\n", row.join(","))
}

fn parse_csv_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad numeric field {field:?}")))
        })
        .collect()
}
