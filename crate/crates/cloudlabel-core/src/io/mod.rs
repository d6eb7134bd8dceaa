//! Readers and writers for the on-disk sequence formats.
//!
//! All binary formats are little-endian and fixed-record: point clouds are
//! 4 x f32 `(x, y, z, intensity)` records, labels one u32 per point, and the
//! optional per-point time sidecar one f64 per point. CSV files are RFC 4180
//! with a header row; label rasters are 8-bit single-channel PNG; camera
//! calibration is a small YAML document. Truncated input is always rejected,
//! never silently shortened.

mod bin;
mod calib;
mod hist;
mod label;
mod layout;
mod poses;
mod raster;
mod samples;

pub use bin::{read_cloud_bin, read_times, write_cloud_bin, write_times, BinLayout, CloudBin};
pub use calib::{read_calibration, write_calibration, Calibration};
pub use hist::{read_histogram_csv, write_histogram_csv};
pub use label::{read_label_file, write_label_file};
pub use layout::{
    stem_for_timestamp, validate_sequence, SequenceLayout, SequenceReport, Violation, DIR_CLOUDS,
    DIR_HISTS, DIR_IMAGE, DIR_INDEX_LABEL, DIR_LABELS, DIR_PALETTE_LABEL, DIR_TIMES,
    FILE_CALIBRATION, FILE_POSES,
};
pub use poses::{read_poses_csv, write_poses_csv};
pub use raster::{read_index_label_png, write_index_label_png};
pub use samples::{read_samples_csv, write_samples_csv};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {len} bytes is not a multiple of the {record}-byte point record")]
    MalformedBin {
        path: PathBuf,
        len: u64,
        record: usize,
    },
    #[error("{path}: {len} bytes is not a multiple of the 4-byte label record")]
    MalformedLabel { path: PathBuf, len: u64 },
    #[error("{path}: {len} bytes is not a multiple of the 8-byte time record")]
    MalformedTimes { path: PathBuf, len: u64 },
    #[error("{path}: duplicate timestamp {t}")]
    DuplicateTimestamp { path: PathBuf, t: f64 },
    #[error("{path}: non-finite value in row {row}")]
    NonFiniteValue { path: PathBuf, row: usize },
    #[error("{path}: missing column `{name}`")]
    MissingColumn { path: PathBuf, name: String },
    #[error("{path}: missing field `{name}`")]
    MissingField { path: PathBuf, name: String },
    #[error("{path}: focal length must be positive, got {value}")]
    NonPositiveFocal { path: PathBuf, value: f64 },
    #[error("{path}: unknown class index {value} ({count} occurrences)")]
    UnknownClassIndex {
        path: PathBuf,
        value: u32,
        count: usize,
    },
    #[error("{path}: row {row} has {found} count columns, expected {expected}")]
    RowLengthMismatch {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}: expected an 8-bit single-channel (grayscale) PNG")]
    NotGrayscale8 { path: PathBuf },
    #[error("{path}: csv: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: yaml: {source}")]
    Yaml {
        path: PathBuf,
        #[source]
        source: serde_yaml::Error,
    },
    #[error("{path}: png: {source}")]
    Png {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

impl FormatError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.into(),
            source,
        }
    }
}
