//! `camera_calibration.yaml`: pinhole intrinsics and the body<-camera
//! extrinsic as a translation plus (qx, qy, qz, qw) quaternion.

use std::fs;
use std::path::Path;

use nalgebra::{Isometry3, Quaternion, Translation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::camera::CameraModel;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IntrinsicsDoc {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExtrinsicDoc {
    x: f64,
    y: f64,
    z: f64,
    qx: f64,
    qy: f64,
    qz: f64,
    qw: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CalibrationDoc {
    intrinsics: IntrinsicsDoc,
    extrinsic: ExtrinsicDoc,
}

/// A parsed, validated calibration file.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub camera: CameraModel,
}

pub fn read_calibration(path: impl AsRef<Path>) -> Result<Calibration, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let doc: CalibrationDoc = serde_yaml::from_str(&text).map_err(|e| {
        // serde reports missing fields as parse errors; surface the field name.
        let msg = e.to_string();
        if let Some(rest) = msg.split("missing field `").nth(1) {
            FormatError::MissingField {
                path: path.to_path_buf(),
                name: rest.split('`').next().unwrap_or("").to_string(),
            }
        } else {
            FormatError::Yaml {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;

    let i = &doc.intrinsics;
    if i.fx <= 0.0 || i.fy <= 0.0 {
        return Err(FormatError::NonPositiveFocal {
            path: path.to_path_buf(),
            value: i.fx.min(i.fy),
        });
    }
    let e = &doc.extrinsic;
    let extrinsic = Isometry3::from_parts(
        Translation3::new(e.x, e.y, e.z),
        UnitQuaternion::from_quaternion(Quaternion::new(e.qw, e.qx, e.qy, e.qz)),
    );
    let camera = CameraModel::new(i.fx, i.fy, i.cx, i.cy, i.width, i.height, extrinsic)
        .map_err(|err| FormatError::Invalid {
            path: path.to_path_buf(),
            message: err.to_string(),
        })?;
    Ok(Calibration { camera })
}

pub fn write_calibration(path: impl AsRef<Path>, camera: &CameraModel) -> Result<(), FormatError> {
    let path = path.as_ref();
    let t = camera.extrinsic.translation.vector;
    let q = camera.extrinsic.rotation.quaternion();
    let doc = CalibrationDoc {
        intrinsics: IntrinsicsDoc {
            fx: camera.fx,
            fy: camera.fy,
            cx: camera.cx,
            cy: camera.cy,
            width: camera.width,
            height: camera.height,
        },
        extrinsic: ExtrinsicDoc {
            x: t.x,
            y: t.y,
            z: t.z,
            qx: q.i,
            qy: q.j,
            qz: q.k,
            qw: q.w,
        },
    };
    let text = serde_yaml::to_string(&doc).map_err(|e| FormatError::Yaml {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, text).map_err(|e| FormatError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    const MINIMAL: &str = "\
intrinsics:
  fx: 1400.0
  fy: 1400.0
  cx: 1008.0
  cy: 756.0
  width: 2016
  height: 1512
extrinsic:
  x: 0.0
  y: 0.0
  z: 0.0
  qx: 0.0
  qy: 0.0
  qz: 0.0
  qw: 1.0
";

    #[test]
    fn minimal_document_parses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("camera_calibration.yaml");
        std::fs::write(&path, MINIMAL).unwrap();
        let calib = read_calibration(&path).unwrap();
        assert_eq!(calib.camera.width, 2016);
        assert_eq!(calib.camera.height, 1512);
        assert_eq!(calib.camera.extrinsic, Isometry3::identity());
    }

    #[test]
    fn zero_focal_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("camera_calibration.yaml");
        std::fs::write(&path, MINIMAL.replace("fx: 1400.0", "fx: 0.0")).unwrap();
        assert!(matches!(
            read_calibration(&path),
            Err(FormatError::NonPositiveFocal { .. })
        ));
    }

    #[test]
    fn missing_field_is_reported() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("camera_calibration.yaml");
        std::fs::write(&path, MINIMAL.replace("  qw: 1.0\n", "")).unwrap();
        assert!(matches!(
            read_calibration(&path),
            Err(FormatError::MissingField { .. })
        ));
    }

    #[test]
    fn roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("camera_calibration.yaml");
        std::fs::write(&path, MINIMAL).unwrap();
        let calib = read_calibration(&path).unwrap();
        let path2 = dir.path().join("copy.yaml");
        write_calibration(&path2, &calib.camera).unwrap();
        let again = read_calibration(&path2).unwrap();
        assert_eq!(again.camera, calib.camera);
    }
}
