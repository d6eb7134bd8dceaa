//! `poses.csv`: timestamped 6-DoF trajectory with columns
//! `timestamp,x,y,z,qx,qy,qz,qw`. Quaternions are normalized on load; rows
//! may arrive unordered (a warning is logged and they are sorted), but
//! duplicate timestamps are a hard error.

use std::path::Path;

use nalgebra::Vector3;

use super::FormatError;
use crate::pose::{Pose, PoseError, Trajectory};

const COLUMNS: [&str; 8] = ["timestamp", "x", "y", "z", "qx", "qy", "qz", "qw"];

pub fn read_poses_csv(path: impl AsRef<Path>) -> Result<Trajectory, FormatError> {
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
    let mut col = [0usize; 8];
    for (slot, name) in col.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| FormatError::MissingColumn {
                path: path.to_path_buf(),
                name: name.to_string(),
            })?;
    }

    let mut poses = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FormatError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut values = [0.0f64; 8];
        for (v, &c) in values.iter_mut().zip(&col) {
            let field = record.get(c).ok_or_else(|| FormatError::MissingColumn {
                path: path.to_path_buf(),
                name: COLUMNS[c.min(7)].to_string(),
            })?;
            *v = field
                .trim()
                .parse::<f64>()
                .map_err(|_| FormatError::NonFiniteValue {
                    path: path.to_path_buf(),
                    row: row_idx + 1,
                })?;
            if !v.is_finite() {
                return Err(FormatError::NonFiniteValue {
                    path: path.to_path_buf(),
                    row: row_idx + 1,
                });
            }
        }
        let [t, x, y, z, qx, qy, qz, qw] = values;
        poses.push(Pose::new(t, Vector3::new(x, y, z), qx, qy, qz, qw));
    }

    let sorted = poses.windows(2).all(|w| w[0].t < w[1].t);
    if !sorted {
        log::warn!("{}: rows out of timestamp order; sorting", path.display());
    }
    Trajectory::new(poses).map_err(|e| match e {
        PoseError::DuplicateTimestamp(t) => FormatError::DuplicateTimestamp {
            path: path.to_path_buf(),
            t,
        },
        other => FormatError::Invalid {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

pub fn write_poses_csv(path: impl AsRef<Path>, trajectory: &Trajectory) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let emit = |w: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
        w.write_record(COLUMNS)?;
        for pose in trajectory.poses() {
            let p = pose.position();
            let orientation = pose.orientation();
            let q = orientation.quaternion();
            w.write_record([
                format!("{}", pose.t),
                format!("{}", p.x),
                format!("{}", p.y),
                format!("{}", p.z),
                format!("{}", q.i),
                format!("{}", q.j),
                format!("{}", q.k),
                format!("{}", q.w),
            ])?;
        }
        w.flush().map_err(csv::Error::from)
    };
    emit(&mut writer).map_err(|e| FormatError::Csv {
        path: path.to_path_buf(),
        source: e,
    })
}
