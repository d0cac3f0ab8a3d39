//! Concept-annotated tabular data: CSV ingestion, validation, booleanization
//! and seeded splitting.

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nn::Matrix;

pub const DEFAULT_LABEL_COLUMN: &str = "label";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),
    #[error("row {row} has {found} fields, header has {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("row {row}, column '{column}': '{value}' is not a number")]
    NotNumeric { row: usize, column: String, value: String },
    #[error("row {row}, column '{column}': value {value} is outside [0, 1]")]
    OutOfRange { row: usize, column: String, value: f64 },
    #[error("dataset has no rows")]
    Empty,
    #[error("duplicate name '{0}'")]
    DuplicateName(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("invalid split: {0}")]
    Split(String),
}

/// Concept activations in `[0, 1]` with integer class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<usize>,
    pub concept_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        x: Matrix,
        y: Vec<usize>,
        concept_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if x.rows() != y.len() {
            return Err(DataError::Invalid(format!(
                "{} rows but {} labels",
                x.rows(),
                y.len()
            )));
        }
        if concept_names.len() != x.cols() {
            return Err(DataError::Invalid(format!(
                "{} concept names for {} columns",
                concept_names.len(),
                x.cols()
            )));
        }
        check_unique(&concept_names)?;
        check_unique(&class_names)?;
        if let Some(&bad) = y.iter().find(|&&l| l >= class_names.len()) {
            return Err(DataError::Invalid(format!(
                "label {bad} but only {} classes",
                class_names.len()
            )));
        }
        check_unit(&x, &concept_names)?;
        Ok(Self {
            x,
            y,
            concept_names,
            class_names,
        })
    }

    /// Dataset with default names `x1..xk` and `0..C-1`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], y: Vec<usize>, n_classes: usize) -> Result<Self, DataError> {
        let x = Matrix::from_rows(rows).map_err(|e| DataError::Invalid(e.to_string()))?;
        let concept_names = (1..=x.cols()).map(|i| format!("x{i}")).collect();
        let class_names = (0..n_classes).map(|c| c.to_string()).collect();
        Self::new(x, y, concept_names, class_names)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_concepts(&self) -> usize {
        self.x.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Rows selected by `indices`, keeping both name tables.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            concept_names: self.concept_names.clone(),
            class_names: self.class_names.clone(),
        }
    }
}

fn check_unique(names: &[String]) -> Result<(), DataError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(DataError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

fn check_unit(x: &Matrix, names: &[String]) -> Result<(), DataError> {
    for (r, row) in x.iter_rows().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(DataError::OutOfRange {
                    row: r + 1,
                    column: names[c].clone(),
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Loads a CSV file with a header row. Every column except `label_column`
/// is a concept; rows in errors are 1-based data rows (header excluded).
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, label_column)
}

pub fn read_csv<R: Read>(reader: R, label_column: &str) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_string()))?;
    let concept_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    check_unique(&header)?;

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        if rec.len() != header.len() {
            return Err(DataError::Ragged {
                row,
                found: rec.len(),
                expected: header.len(),
            });
        }
        for (i, field) in rec.iter().enumerate() {
            if i == label_idx {
                raw_labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| DataError::NotNumeric {
                row,
                column: header[i].clone(),
                value: field.to_string(),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(DataError::OutOfRange {
                    row,
                    column: header[i].clone(),
                    value: v,
                });
            }
            values.push(v);
        }
    }
    if raw_labels.is_empty() {
        return Err(DataError::Empty);
    }

    let class_names = sorted_labels(&raw_labels);
    let y = raw_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).expect("label in table"))
        .collect();
    let x = Matrix::from_vec(raw_labels.len(), concept_names.len(), values)
        .map_err(|e| DataError::Invalid(e.to_string()))?;
    Dataset::new(x, y, concept_names, class_names)
}

/// Distinct labels, numerically sorted when they are all integers.
fn sorted_labels(raw: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = raw.iter().collect();
    let mut names: Vec<String> = distinct.into_iter().cloned().collect();
    if names.iter().all(|n| n.parse::<i64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<i64>().unwrap());
    }
    names
}

/// Writes `data` as CSV with the label column last.
pub fn write_csv<W: Write>(data: &Dataset, writer: W, label_column: &str) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.concept_names.iter().map(String::as_str).collect();
    header.push(label_column);
    w.write_record(&header)?;
    for (row, &label) in data.x.iter_rows().zip(&data.y) {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        rec.push(data.class_names[label].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>, label_column: &str) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv(data, file, label_column)
}

/// Row indices of the train, validation and test partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle followed by a contiguous cut. Zero fractions give empty
/// partitions; a positive fraction that rounds to zero rows is an error.
pub fn split(n: usize, fractions: (f64, f64, f64), seed: u64) -> Result<Split, DataError> {
    let (ft, fv, fs) = fractions;
    if [ft, fv, fs].iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(DataError::Split(format!("fractions must be non-negative, got {fractions:?}")));
    }
    if (ft + fv + fs - 1.0).abs() > 1e-9 {
        return Err(DataError::Split(format!("fractions sum to {}, not 1", ft + fv + fs)));
    }
    if ft == 0.0 {
        return Err(DataError::Split("training fraction must be positive".into()));
    }
    let n_val = (n as f64 * fv).round() as usize;
    let n_test = (n as f64 * fs).round() as usize;
    if n_val + n_test > n {
        return Err(DataError::Split(format!("{n} rows cannot hold {n_val} + {n_test} held-out rows")));
    }
    let n_train = n - n_val - n_test;
    for (name, f, size) in [("train", ft, n_train), ("validation", fv, n_val), ("test", fs, n_test)] {
        if n > 0 && f > 0.0 && size == 0 {
            return Err(DataError::Split(format!(
                "{name} fraction {f} leaves no rows out of {n}"
            )));
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let test = idx.split_off(n_train + n_val);
    let validation = idx.split_off(n_train);
    Ok(Split {
        train: idx,
        validation,
        test,
    })
}

/// `x > threshold`, elementwise.
pub fn booleanize(x: &Matrix, threshold: f64) -> Result<Vec<Vec<bool>>, DataError> {
    for (r, row) in x.iter_rows().enumerate() {
        if let Some((c, &v)) = row.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(DataError::OutOfRange {
                row: r + 1,
                column: format!("#{c}"),
                value: v,
            });
        }
    }
    Ok(x.iter_rows()
        .map(|row| row.iter().map(|&v| v > threshold).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = "x1,x2,label\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n";

    #[test]
    fn xor_csv_loads() {
        let d = read_csv(XOR.as_bytes(), "label").unwrap();
        assert_eq!(d.n_concepts(), 2);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.y, vec![0, 1, 1, 0]);
        assert_eq!(d.concept_names, vec!["x1", "x2"]);
    }

    #[test]
    fn out_of_range_names_row_and_column() {
        let err = read_csv("a,b,label\n0,0.2,x\n0.3,1.5,y\n".as_bytes(), "label").unwrap_err();
        match err {
            DataError::OutOfRange { row, column, value } => {
                assert_eq!((row, column.as_str(), value), (2, "b", 1.5));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        assert!(matches!(read_csv("a,label\n".as_bytes(), "label"), Err(DataError::Empty)));
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(
            read_csv("a,b\n0,1\n".as_bytes(), "label"),
            Err(DataError::MissingLabelColumn(_))
        ));
        assert!(matches!(
            read_csv("a,b,label\n0,1\n".as_bytes(), "label"),
            Err(DataError::Ragged { row: 1, found: 2, expected: 3 })
        ));
        assert!(matches!(
            read_csv("a,label\nyes,1\n".as_bytes(), "label"),
            Err(DataError::NotNumeric { .. })
        ));
    }

    #[test]
    fn string_labels_sorted() {
        let d = read_csv("a,cls\n0,wolf\n1,husky\n0.5,wolf\n".as_bytes(), "cls").unwrap();
        assert_eq!(d.class_names, vec!["husky", "wolf"]);
        assert_eq!(d.y, vec![1, 0, 1]);
        let d = read_csv("a,label\n0,10\n1,9\n".as_bytes(), "label").unwrap();
        assert_eq!(d.class_names, vec!["9", "10"]);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let s = split(10, (0.6, 0.2, 0.2), 42).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (6, 2, 2));
        assert_eq!(s, split(10, (0.6, 0.2, 0.2), 42).unwrap());
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_vanishing_partition() {
        assert!(split(3, (0.8, 0.1, 0.1), 0).is_err());
        assert!(split(10, (0.5, 0.2, 0.2), 0).is_err());
        let s = split(4, (1.0, 0.0, 0.0), 0).unwrap();
        assert_eq!(s.train.len(), 4);
    }

    #[test]
    fn booleanize_is_strict() {
        let x = Matrix::from_rows(&[[0.5, 0.51, 1.0, 0.0]]).unwrap();
        assert_eq!(booleanize(&x, 0.5).unwrap(), vec![vec![false, true, true, false]]);
    }
}
