//! Per-point label-histogram CSV: a header row of class names followed by one
//! row of counts per 3D point, in cloud point order.

use std::path::Path;

use super::FormatError;
use crate::cloud::LabelHistograms;
use crate::ontology::ClassOntology;

pub fn write_histogram_csv(
    path: impl AsRef<Path>,
    histograms: &LabelHistograms,
    ontology: &ClassOntology,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let emit = |w: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
        w.write_record(ontology.eval2d())?;
        let mut row: Vec<String> = Vec::with_capacity(histograms.num_classes());
        for i in 0..histograms.num_points() {
            row.clear();
            row.extend(histograms.row(i).iter().map(|c| c.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)
    };
    emit(&mut writer).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn read_histogram_csv(path: impl AsRef<Path>) -> Result<LabelHistograms, FormatError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let num_classes = reader
        .headers()
        .map_err(|e| FormatError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .len();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FormatError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        if record.len() != num_classes {
            return Err(FormatError::RowLengthMismatch {
                path: path.to_path_buf(),
                row: row_idx + 1,
                expected: num_classes,
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(num_classes);
        for field in record.iter() {
            let v = field
                .trim()
                .parse::<u32>()
                .map_err(|_| FormatError::Invalid {
                    path: path.to_path_buf(),
                    message: format!("row {}: `{}` is not a count", row_idx + 1, field),
                })?;
            row.push(v);
        }
        rows.push(row);
    }
    LabelHistograms::from_rows(rows, num_classes).map_err(|e| FormatError::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
