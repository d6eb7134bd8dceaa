//! Point-cloud `.bin` files (little-endian f32 records) and the `.times`
//! sidecar (little-endian f64 per point).

use std::fs;
use std::path::Path;

use nalgebra::Point3;

use super::FormatError;

/// Record layout of a `.bin` cloud file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinLayout {
    /// `(x, y, z, intensity)`, 16 bytes per point.
    #[default]
    XyzIntensity,
    /// `(x, y, z)`, 12 bytes per point.
    Xyz,
}

impl BinLayout {
    pub fn record_size(self) -> usize {
        match self {
            BinLayout::XyzIntensity => 16,
            BinLayout::Xyz => 12,
        }
    }
}

/// A raw cloud as stored on disk: coordinates plus the auxiliary intensity
/// channel (zeros when the layout has none).
#[derive(Debug, Clone, Default)]
pub struct CloudBin {
    pub points: Vec<Point3<f64>>,
    pub intensity: Vec<f32>,
}

pub fn read_cloud_bin(path: impl AsRef<Path>, layout: BinLayout) -> Result<CloudBin, FormatError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    let record = layout.record_size();
    if bytes.len() % record != 0 {
        return Err(FormatError::MalformedBin {
            path: path.to_path_buf(),
            len: bytes.len() as u64,
            record,
        });
    }
    let n = bytes.len() / record;
    let mut points = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    for rec in bytes.chunks_exact(record) {
        let x = f32::from_le_bytes(rec[0..4].try_into().unwrap());
        let y = f32::from_le_bytes(rec[4..8].try_into().unwrap());
        let z = f32::from_le_bytes(rec[8..12].try_into().unwrap());
        points.push(Point3::new(x as f64, y as f64, z as f64));
        intensity.push(match layout {
            BinLayout::XyzIntensity => f32::from_le_bytes(rec[12..16].try_into().unwrap()),
            BinLayout::Xyz => 0.0,
        });
    }
    Ok(CloudBin { points, intensity })
}

/// Writes a cloud in the given layout. Coordinates are narrowed to f32 as the
/// format requires; `intensity`, when absent, is written as zeros.
pub fn write_cloud_bin(
    path: impl AsRef<Path>,
    points: &[Point3<f64>],
    intensity: Option<&[f32]>,
    layout: BinLayout,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(points.len() * layout.record_size());
    for (i, p) in points.iter().enumerate() {
        bytes.extend_from_slice(&(p.x as f32).to_le_bytes());
        bytes.extend_from_slice(&(p.y as f32).to_le_bytes());
        bytes.extend_from_slice(&(p.z as f32).to_le_bytes());
        if layout == BinLayout::XyzIntensity {
            let v = intensity.map_or(0.0, |a| a[i]);
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| FormatError::io(path, e))
}

pub fn read_times(path: impl AsRef<Path>) -> Result<Vec<f64>, FormatError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(FormatError::MalformedTimes {
            path: path.to_path_buf(),
            len: bytes.len() as u64,
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect())
}

pub fn write_times(path: impl AsRef<Path>, times: &[f64]) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(times.len() * 8);
    for t in times {
        bytes.extend_from_slice(&t.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| FormatError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn empty_file_is_empty_cloud() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.bin");
        std::fs::write(&path, []).unwrap();
        let cloud = read_cloud_bin(&path, BinLayout::XyzIntensity).unwrap();
        assert!(cloud.points.is_empty());
    }

    #[test]
    fn single_record_decodes_directly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("one.bin");
        let mut bytes = Vec::new();
        for v in [1.0f32, 2.0, 3.0, 0.5] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(&path, bytes).unwrap();
        let cloud = read_cloud_bin(&path, BinLayout::XyzIntensity).unwrap();
        assert_eq!(cloud.points, vec![Point3::new(1.0, 2.0, 3.0)]);
        assert_eq!(cloud.intensity, vec![0.5]);
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, vec![0u8; 17]).unwrap();
        assert!(matches!(
            read_cloud_bin(&path, BinLayout::XyzIntensity),
            Err(FormatError::MalformedBin { .. })
        ));
        std::fs::write(&path, vec![0u8; 13]).unwrap();
        assert!(matches!(
            read_cloud_bin(&path, BinLayout::Xyz),
            Err(FormatError::MalformedBin { .. })
        ));
    }

    #[test]
    fn times_roundtrip_and_truncation() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.times");
        let times = vec![0.0, 1.5, 2.25, 1.0e9 + 0.125];
        write_times(&path, &times).unwrap();
        assert_eq!(read_times(&path).unwrap(), times);
        std::fs::write(&path, vec![0u8; 9]).unwrap();
        assert!(matches!(
            read_times(&path),
            Err(FormatError::MalformedTimes { .. })
        ));
    }
}
