//! UCR time-series files: one series per line, class label first.
//!
//! The separator (tab, comma or runs of whitespace) is detected from the
//! first non-empty line. Rows and columns in diagnostics are 1-based, with
//! column 1 holding the label.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use frfx_core::{FunctionalDataset, Matrix, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, IoError, Result};

/// Raw label values for classes 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelMap {
    pub zero: f64,
    pub one: f64,
}

impl LabelMap {
    /// Smaller raw label maps to 0 unless `positive` names the class-1 label.
    pub fn infer(raw: &[f64], positive: Option<f64>) -> Result<Self> {
        let mut distinct: Vec<f64> = Vec::new();
        for &v in raw {
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        if distinct.len() != 2 {
            return Err(IoError::UnknownLabelArity {
                found: distinct.len(),
            });
        }
        distinct.sort_by(f64::total_cmp);
        let (zero, one) = (distinct[0], distinct[1]);
        match positive {
            None => Ok(Self { zero, one }),
            Some(p) if p == one => Ok(Self { zero, one }),
            Some(p) if p == zero => Ok(Self { zero: one, one: zero }),
            Some(p) => Err(IoError::UnknownLabel { row: 0, label: p }),
        }
    }

    pub fn encode(&self, raw: f64) -> Option<u8> {
        if raw == self.zero {
            Some(0)
        } else if raw == self.one {
            Some(1)
        } else {
            None
        }
    }

    pub fn decode(&self, label: u8) -> f64 {
        if label == 0 {
            self.zero
        } else {
            self.one
        }
    }
}

#[derive(Debug, Clone)]
pub struct UcrData {
    pub dataset: FunctionalDataset,
    pub labels: LabelMap,
}

#[derive(Clone, Copy)]
enum Separator {
    Tab,
    Comma,
    Whitespace,
}

fn detect(line: &str) -> Separator {
    if line.contains('\t') {
        Separator::Tab
    } else if line.contains(',') {
        Separator::Comma
    } else {
        Separator::Whitespace
    }
}

fn fields(line: &str, sep: Separator) -> Vec<&str> {
    match sep {
        Separator::Tab => line.split('\t').map(str::trim).collect(),
        Separator::Comma => line.split(',').map(str::trim).collect(),
        Separator::Whitespace => line.split_whitespace().collect(),
    }
}

/// Parses UCR text. With `map` given (e.g. the training file's), labels must
/// belong to it; otherwise the mapping is inferred from this file.
pub fn parse_ucr(text: &str, map: Option<&LabelMap>, positive: Option<f64>) -> Result<UcrData> {
    let mut sep = None;
    let mut raw_labels = Vec::new();
    let mut values = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let sep = *sep.get_or_insert_with(|| detect(line));
        let parts = fields(line, sep);
        let mut parsed = Vec::with_capacity(parts.len());
        for (col, part) in parts.iter().enumerate() {
            let v: f64 = part.parse().map_err(|_| IoError::UnparseableField {
                row,
                column: col + 1,
                value: (*part).to_owned(),
            })?;
            parsed.push(v);
        }
        let t = parsed.len() - 1;
        match width {
            None => width = Some(t),
            Some(w) if w != t => {
                return Err(IoError::RaggedRows {
                    row,
                    expected: w,
                    found: t,
                })
            }
            Some(_) => {}
        }
        raw_labels.push(parsed[0]);
        values.extend_from_slice(&parsed[1..]);
    }
    let t = width.ok_or(IoError::EmptyFile)?;
    let n = raw_labels.len();
    let labels = match map {
        Some(m) => *m,
        None => LabelMap::infer(&raw_labels, positive)?,
    };
    let encoded = raw_labels
        .iter()
        .enumerate()
        .map(|(i, &raw)| {
            labels
                .encode(raw)
                .ok_or(IoError::UnknownLabel { row: i + 1, label: raw })
        })
        .collect::<Result<Vec<u8>>>()?;
    let grid = TimeGrid::uniform(0.0, 1.0, t)?;
    let matrix = Matrix::from_vec(n, t, values)?;
    let dataset = FunctionalDataset::new(grid, matrix, Some(encoded))?;
    Ok(UcrData { dataset, labels })
}

pub fn load_ucr(path: impl AsRef<Path>) -> Result<UcrData> {
    load_ucr_with(path, None, None)
}

pub fn load_ucr_with(
    path: impl AsRef<Path>,
    map: Option<&LabelMap>,
    positive: Option<f64>,
) -> Result<UcrData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    parse_ucr(&text, map, positive)
}

/// Comma-separated, shortest round-trip formatting for every value.
pub fn format_ucr(dataset: &FunctionalDataset, map: &LabelMap) -> String {
    let labels = dataset.labels().unwrap_or(&[]);
    let mut out = String::new();
    for (i, row) in dataset.values().row_iter().enumerate() {
        let raw = labels.get(i).map_or(map.zero, |&y| map.decode(y));
        write!(out, "{raw}").unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_ucr(path: impl AsRef<Path>, dataset: &FunctionalDataset, map: &LabelMap) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_ucr(dataset, map)).map_err(io_at(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_minus_one_and_one() {
        let text = "-1 0.1 0.2 0.3 0.4 0.5\n1 1 2 3 4 5\n-1 5 4 3 2 1\n";
        let d = parse_ucr(text, None, None).unwrap();
        assert_eq!(d.dataset.len(), 3);
        assert_eq!(d.dataset.grid().len(), 5);
        assert_eq!(d.dataset.labels().unwrap(), &[0, 1, 0]);
        assert_eq!(d.labels, LabelMap { zero: -1.0, one: 1.0 });
        assert_eq!(d.dataset.grid().start(), 0.0);
        assert_eq!(d.dataset.grid().end(), 1.0);
    }

    #[test]
    fn separators() {
        for text in ["1\t2\t3\t4\t5\n2\t1\t1\t1\t1\n", "1,2,3,4,5\n2,1,1,1,1\n", "1  2 3   4 5\n2 1 1 1 1\n"] {
            let d = parse_ucr(text, None, None).unwrap();
            assert_eq!(d.dataset.values().row(0), &[2.0, 3.0, 4.0, 5.0]);
        }
    }

    #[test]
    fn ragged_rows_name_the_row() {
        let text = "1 1 2 3 4 5\n2 1 2 3 4\n";
        match parse_ucr(text, None, None).unwrap_err() {
            IoError::RaggedRows { row, expected, found } => {
                assert_eq!((row, expected, found), (2, 5, 4));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn header_and_bad_fields() {
        let err = parse_ucr("label,a,b,c,d\n1,1,2,3,4\n", None, None).unwrap_err();
        assert!(matches!(err, IoError::UnparseableField { row: 1, column: 1, .. }));
        let err = parse_ucr("1,1,2,x,4\n", None, None).unwrap_err();
        assert!(matches!(err, IoError::UnparseableField { row: 1, column: 4, .. }));
    }

    #[test]
    fn label_arity() {
        let err = parse_ucr("1 1 2 3 4\n2 1 2 3 4\n3 1 2 3 4\n", None, None).unwrap_err();
        assert!(matches!(err, IoError::UnknownLabelArity { found: 3 }));
    }

    #[test]
    fn positive_label_override() {
        let d = parse_ucr("-1 1 2 3 4\n1 1 2 3 4\n", None, Some(-1.0)).unwrap();
        assert_eq!(d.dataset.labels().unwrap(), &[1, 0]);
    }

    #[test]
    fn format_round_trip() {
        let text = "1 0.1 0.30000000000000004 1e-7 -2.5\n-1 3 2 1 0\n";
        let d = parse_ucr(text, None, None).unwrap();
        let again = parse_ucr(&format_ucr(&d.dataset, &d.labels), None, None).unwrap();
        assert_eq!(again.dataset, d.dataset);
        assert_eq!(again.labels, d.labels);
    }
}
