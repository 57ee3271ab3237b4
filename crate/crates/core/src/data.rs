//! Datasets: the two-feature synthetic generators, bundled Iris and CSV ingestion.
//!
//! The synthetic task has a binary label and features `A`, `B`. In group A
//! only feature A separates the classes (`A ~ U[0,1]` vs `U[1,2]`, with
//! `B ~ U[0,2]`); in group B only feature B does (`B ~ U[3,4]` vs `U[4,5]`,
//! with `A ~ U[3,5]`). A mixture concatenates the two groups.

use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GamError, Result};
use crate::seed::{derive_seed, rng};

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Labelled feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(GamError::RowCountMismatch {
                expected: features.len(),
                found: labels.len(),
            });
        }
        if let Some(row) = features.iter().find(|r| r.len() != feature_names.len()) {
            return Err(GamError::LengthMismatch {
                expected: feature_names.len(),
                found: row.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(GamError::IndexOutOfRange {
                index: bad,
                width: class_names.len(),
            });
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn stats(&self) -> Result<FeatureStats> {
        if self.is_empty() {
            return Err(GamError::EmptyDataset);
        }
        let n = self.len() as f64;
        let m = self.n_features();
        let mut mean = vec![0.0; m];
        for row in &self.features {
            for (acc, v) in mean.iter_mut().zip(row) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= n);
        let mut var = vec![0.0; m];
        for row in &self.features {
            for ((acc, v), mu) in var.iter_mut().zip(row).zip(&mean) {
                *acc += (v - mu) * (v - mu);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(FeatureStats { mean, std })
    }

    /// Per-feature `(min, max)`.
    pub fn ranges(&self) -> Result<Vec<(f64, f64)>> {
        if self.is_empty() {
            return Err(GamError::EmptyDataset);
        }
        let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); self.n_features()];
        for row in &self.features {
            for ((lo, hi), &v) in out.iter_mut().zip(row) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        Ok(out)
    }

    /// Writes a header plus one row per sample; the label column holds class indices.
    pub fn write_csv<W: std::io::Write>(&self, out: W, label_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.feature_names.clone();
        header.push(label_column.to_string());
        w.write_record(&header)?;
        for (row, label) in self.features.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(label.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Which synthetic group generated a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SynthGroup {
    /// Feature A carries the label.
    A,
    /// Feature B carries the label.
    B,
}

fn synth_names() -> (Vec<String>, Vec<String>) {
    (vec!["A".into(), "B".into()], vec!["class 1".into(), "class 2".into()])
}

fn synth_group(n: usize, seed: u64, group: SynthGroup) -> Result<Dataset> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(GamError::OddCount(n));
    }
    let mut rng = rng(seed);
    let mut rows: Vec<(Vec<f64>, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let lo = class as f64;
        let row = match group {
            SynthGroup::A => vec![rng.random_range(lo..=lo + 1.0), rng.random_range(0.0..=2.0)],
            SynthGroup::B => vec![rng.random_range(3.0..=5.0), rng.random_range(3.0 + lo..=4.0 + lo)],
        };
        rows.push((row, class));
    }
    rows.shuffle(&mut rng);
    let (features, labels) = rows.into_iter().unzip();
    let (feature_names, class_names) = synth_names();
    Dataset::new(features, labels, feature_names, class_names)
}

/// Balanced group where only feature A predicts the class.
pub fn synth_group_a(n: usize, seed: u64) -> Result<Dataset> {
    synth_group(n, seed, SynthGroup::A)
}

/// Balanced group where only feature B predicts the class.
pub fn synth_group_b(n: usize, seed: u64) -> Result<Dataset> {
    synth_group(n, seed, SynthGroup::B)
}

/// A shuffled mixture of both groups plus the group of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub dataset: Dataset,
    pub groups: Vec<SynthGroup>,
}

/// `round(n · fraction_a)` rows from group A, the rest from group B.
pub fn synth_mixture(n: usize, fraction_a: f64, seed: u64) -> Result<Mixture> {
    let n_a = (n as f64 * fraction_a).round() as usize;
    if !(fraction_a > 0.0 && fraction_a < 1.0) || n_a == 0 || n_a >= n {
        return Err(GamError::DegenerateFraction {
            fraction: fraction_a,
            n,
        });
    }
    let a = synth_group_a(n_a, derive_seed(seed, 1))?;
    let b = synth_group_b(n - n_a, derive_seed(seed, 2))?;
    let mut rows: Vec<(Vec<f64>, usize, SynthGroup)> = a
        .features
        .into_iter()
        .zip(a.labels)
        .map(|(f, l)| (f, l, SynthGroup::A))
        .chain(b.features.into_iter().zip(b.labels).map(|(f, l)| (f, l, SynthGroup::B)))
        .collect();
    rows.shuffle(&mut rng(derive_seed(seed, 3)));

    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(n);
    for (f, l, g) in rows {
        features.push(f);
        labels.push(l);
        groups.push(g);
    }
    let (feature_names, class_names) = synth_names();
    Ok(Mixture {
        dataset: Dataset::new(features, labels, feature_names, class_names)?,
        groups,
    })
}

/// The 150-row Iris flower dataset.
pub fn load_iris() -> Dataset {
    read_csv(IRIS_CSV.as_bytes(), "species", false).expect("bundled iris CSV is well formed")
}

/// Loads a dataset from a CSV file with a header row.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str, one_hot: bool) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, label_column, one_hot)
}

/// Parses a dataset from CSV text.
///
/// Labels that are all non-negative integers are used as class indices;
/// otherwise classes are numbered by first appearance. With `one_hot`,
/// text columns expand into `column=value` indicators in first-appearance order.
pub fn read_csv<R: Read>(input: R, label_column: &str, one_hot: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| GamError::UnknownLabelColumn(label_column.to_string()))?;

    let mut records: Vec<Vec<String>> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(GamError::MalformedCsv(format!(
                "row {} has {} fields, header has {}",
                records.len() + 1,
                rec.len(),
                header.len()
            )));
        }
        records.push(rec.iter().map(str::to_string).collect());
    }
    if records.is_empty() {
        return Err(GamError::EmptyDataset);
    }

    let (labels, class_names) = encode_labels(records.iter().map(|r| r[label_idx].as_str()));

    let mut feature_names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (c, name) in header.iter().enumerate() {
        if c == label_idx {
            continue;
        }
        let parsed: Option<Vec<f64>> = records.iter().map(|r| r[c].parse::<f64>().ok()).collect();
        match parsed {
            Some(values) => {
                feature_names.push(name.clone());
                columns.push(values);
            }
            None if one_hot => {
                let mut levels: IndexMap<&str, usize> = IndexMap::new();
                for r in &records {
                    let next = levels.len();
                    levels.entry(r[c].as_str()).or_insert(next);
                }
                for level in levels.keys() {
                    feature_names.push(format!("{name}={level}"));
                    columns.push(records.iter().map(|r| if r[c] == *level { 1.0 } else { 0.0 }).collect());
                }
            }
            None => return Err(GamError::NonNumericWithoutOneHot(name.clone())),
        }
    }

    let features = (0..records.len())
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    Dataset::new(features, labels, feature_names, class_names)
}

fn encode_labels<'a>(values: impl Iterator<Item = &'a str> + Clone) -> (Vec<usize>, Vec<String>) {
    let numeric: Option<Vec<usize>> = values.clone().map(|v| v.parse::<usize>().ok()).collect();
    if let Some(labels) = numeric {
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        return (labels, (0..classes).map(|c| c.to_string()).collect());
    }
    let mut classes: IndexMap<String, usize> = IndexMap::new();
    let labels = values
        .map(|v| {
            let next = classes.len();
            *classes.entry(v.to_string()).or_insert(next)
        })
        .collect();
    (labels, classes.into_keys().collect())
}

/// Disjoint train/test partition of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Class-stratified split: each class contributes `round(count · test_fraction)` test rows.
pub fn train_test_split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(GamError::InvalidConfig(format!(
            "test fraction {test_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut rng = rng(seed);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for class in 0..data.n_classes() {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * test_fraction).round() as usize;
        test_indices.extend_from_slice(&idx[..n_test]);
        train_indices.extend_from_slice(&idx[n_test..]);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok(Split {
        train: data.subset(&train_indices),
        test: data.subset(&test_indices),
        train_indices,
        test_indices,
    })
}
