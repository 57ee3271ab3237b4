//! File formats: attribution tables, distance matrices, baseline vectors and
//! clustering reports.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusteringResult;
use crate::error::{GamError, Result};
use crate::rank::{AttributionVector, DistanceMatrix};

/// Local attributions sharing one feature list; CSV form is a header of
/// feature names followed by one row per attribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl AttributionTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if feature_names.len() < 2 {
            return Err(GamError::TooFewFeatures(feature_names.len()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != feature_names.len()) {
            return Err(GamError::LengthMismatch {
                expected: feature_names.len(),
                found: bad.len(),
            });
        }
        Ok(Self { feature_names, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn vectors(&self) -> Result<Vec<AttributionVector>> {
        self.rows
            .iter()
            .map(|r| AttributionVector::new(self.feature_names.clone(), r.clone()))
            .collect()
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let feature_names: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| parse_float(field, line + 2))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::new(feature_names, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(BufReader::new(File::open(path)?))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.feature_names)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(f64::to_string))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| GamError::MalformedCsv(format!("line {line}: {field:?} is not a finite number")))
}

/// Writes an `n × n` matrix with no header.
pub fn write_distance_csv<W: Write>(d: &DistanceMatrix, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in d.rows() {
        writer.write_record(row.iter().map(f64::to_string))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn distance_csv_string(d: &DistanceMatrix) -> Result<String> {
    let mut buf = Vec::new();
    write_distance_csv(d, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_distance_csv<R: Read>(input: R) -> Result<DistanceMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        rows.push(
            record?
                .iter()
                .map(|field| parse_float(field, line + 1))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    DistanceMatrix::from_rows(rows)
}

pub fn load_distance_csv(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    read_distance_csv(BufReader::new(File::open(path)?))
}

/// Reads a single vector of numbers, one line of comma-separated values. A
/// leading header line of names is skipped.
pub fn read_vector_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = reader.records();
    while let Some(record) = records.next() {
        let record = record?;
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if parsed.iter().all(Option::is_none) {
            continue;
        }
        let values = record
            .iter()
            .map(|field| parse_float(field, 0))
            .collect::<Result<Vec<f64>>>()?;
        if records.next().is_some() {
            return Err(GamError::MalformedCsv("expected a single row of values".into()));
        }
        return Ok(values);
    }
    Err(GamError::MalformedCsv("no numeric row found".into()))
}

pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector_csv(BufReader::new(File::open(path)?))
}

/// Summary of a clustering run as written by the `cluster` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub k: usize,
    pub seed: u64,
    pub medoid_indices: Vec<usize>,
    pub assignment: Vec<usize>,
    pub cost: f64,
    /// Absent when fewer than two clusters are populated.
    pub silhouette_mean: Option<f64>,
}

impl ClusteringReport {
    pub fn new(result: &ClusteringResult, silhouette_mean: Option<f64>) -> Self {
        Self {
            k: result.k,
            seed: result.seed,
            medoid_indices: result.medoid_indices.clone(),
            assignment: result.assignment.clone(),
            cost: result.cost,
            silhouette_mean,
        }
    }
}
