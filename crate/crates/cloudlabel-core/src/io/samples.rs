//! Split-generation input: one row per sample with planar coordinates,
//! sequence/season/environment tags, and per-class counts.
//!
//! Columns: `id,x,y,sequence,season,environment` followed by one count column
//! per class; the class names are taken from the header.

use std::path::Path;

use super::FormatError;
use crate::split::SampleRecord;

const FIXED: [&str; 6] = ["id", "x", "y", "sequence", "season", "environment"];

pub fn read_samples_csv(
    path: impl AsRef<Path>,
) -> Result<(Vec<SampleRecord>, Vec<String>), FormatError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let headers = reader
        .headers()
        .map_err(|e| FormatError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .clone();
    let mut fixed_cols = [0usize; 6];
    for (slot, name) in fixed_cols.iter_mut().zip(FIXED) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| FormatError::MissingColumn {
                path: path.to_path_buf(),
                name: name.to_string(),
            })?;
    }
    let class_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| !fixed_cols.contains(i))
        .map(|(i, name)| (i, name.trim().to_string()))
        .collect();
    if class_cols.is_empty() {
        return Err(FormatError::MissingColumn {
            path: path.to_path_buf(),
            name: "<class counts>".to_string(),
        });
    }

    let mut samples = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FormatError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        let field = |c: usize| record.get(c).unwrap_or("").trim().to_string();
        let parse_f64 = |c: usize| -> Result<f64, FormatError> {
            let v: f64 = field(c).parse().map_err(|_| FormatError::NonFiniteValue {
                path: path.to_path_buf(),
                row: row_idx + 1,
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FormatError::NonFiniteValue {
                    path: path.to_path_buf(),
                    row: row_idx + 1,
                })
            }
        };
        let mut class_counts = Vec::with_capacity(class_cols.len());
        for (c, _) in &class_cols {
            let v: u64 = field(*c).parse().map_err(|_| FormatError::Invalid {
                path: path.to_path_buf(),
                message: format!("row {}: `{}` is not a count", row_idx + 1, field(*c)),
            })?;
            class_counts.push(v);
        }
        if class_counts.iter().all(|&c| c == 0) {
            return Err(FormatError::Invalid {
                path: path.to_path_buf(),
                message: format!("row {}: sample has zero total class count", row_idx + 1),
            });
        }
        samples.push(SampleRecord {
            id: field(fixed_cols[0]),
            xy: [parse_f64(fixed_cols[1])?, parse_f64(fixed_cols[2])?],
            sequence: field(fixed_cols[3]),
            season: field(fixed_cols[4]),
            environment: field(fixed_cols[5]),
            class_counts,
        });
    }
    Ok((samples, class_cols.into_iter().map(|(_, n)| n).collect()))
}

pub fn write_samples_csv(
    path: impl AsRef<Path>,
    samples: &[SampleRecord],
    class_names: &[String],
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let emit = |w: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
        let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
        header.extend(class_names.iter().cloned());
        w.write_record(&header)?;
        for s in samples {
            let mut row = vec![
                s.id.clone(),
                s.xy[0].to_string(),
                s.xy[1].to_string(),
                s.sequence.clone(),
                s.season.clone(),
                s.environment.clone(),
            ];
            row.extend(s.class_counts.iter().map(|c| c.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)
    };
    emit(&mut writer).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })
}
