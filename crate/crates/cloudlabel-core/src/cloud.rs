//! Point clouds with per-point observation times, label histograms, and mode
//! labels, plus the 2D label raster type.

use nalgebra::Point3;
use thiserror::Error;

use crate::ontology::{ClassOntology, IGNORE};

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("times length {times} does not match point count {points}")]
    TimesLengthMismatch { points: usize, times: usize },
    #[error("histogram rows {rows} do not match point count {points}")]
    HistogramLengthMismatch { points: usize, rows: usize },
    #[error("modes length {modes} does not match point count {points}")]
    ModesLengthMismatch { points: usize, modes: usize },
    #[error("mode {mode} at point {index} is not the histogram argmax {argmax:?}")]
    InconsistentMode {
        index: usize,
        mode: u8,
        argmax: Option<u8>,
    },
    #[error("histogram shape mismatch: {0} classes vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("raster value {value} at pixel {count} is not a class index or ignore")]
    InvalidRasterValue { value: u8, count: usize },
    #[error("raster data length {len} does not match {width}x{height}")]
    RasterSizeMismatch { len: usize, width: u32, height: u32 },
}

/// Flat per-point label-count storage: row `i` holds the number of times each
/// class was observed for point `i` across all images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelHistograms {
    num_classes: usize,
    counts: Vec<u32>,
}

impl LabelHistograms {
    pub fn new(num_points: usize, num_classes: usize) -> Self {
        Self {
            num_classes,
            counts: vec![0; num_points * num_classes],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u32>>, num_classes: usize) -> Result<Self, CloudError> {
        let mut counts = Vec::with_capacity(rows.len() * num_classes);
        for row in &rows {
            if row.len() != num_classes {
                return Err(CloudError::ShapeMismatch(row.len(), num_classes));
            }
            counts.extend_from_slice(row);
        }
        Ok(Self {
            num_classes,
            counts,
        })
    }

    pub fn num_points(&self) -> usize {
        self.counts.len().checked_div(self.num_classes).unwrap_or(0)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.num_classes..(i + 1) * self.num_classes]
    }

    pub fn add(&mut self, point: usize, class: u8) {
        self.counts[point * self.num_classes + class as usize] += 1;
    }

    pub fn total(&self, i: usize) -> u64 {
        self.row(i).iter().map(|&c| c as u64).sum()
    }

    /// Argmax class of row `i` with ties broken toward the lowest class
    /// index; `None` if the row is all zeros.
    pub fn mode_of(&self, i: usize) -> Option<u8> {
        let row = self.row(i);
        let mut best: Option<(u32, usize)> = None;
        for (c, &count) in row.iter().enumerate() {
            if count > 0 && best.is_none_or(|(b, _)| count > b) {
                best = Some((count, c));
            }
        }
        best.map(|(_, c)| c as u8)
    }

    /// Elementwise sum with another histogram array of identical shape.
    pub fn merge(&mut self, other: &LabelHistograms) -> Result<(), CloudError> {
        if self.num_classes != other.num_classes || self.counts.len() != other.counts.len() {
            return Err(CloudError::ShapeMismatch(
                self.counts.len(),
                other.counts.len(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// Sum of every count in the array.
    pub fn grand_total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Keeps only the rows selected by `keep`, in order.
    pub fn select(&self, keep: &[u32]) -> LabelHistograms {
        let mut counts = Vec::with_capacity(keep.len() * self.num_classes);
        for &i in keep {
            counts.extend_from_slice(self.row(i as usize));
        }
        LabelHistograms {
            num_classes: self.num_classes,
            counts,
        }
    }
}

/// 3D points in the world frame with per-point first-observation times and,
/// once labels have been transferred, per-point histograms and mode labels.
#[derive(Debug, Clone)]
pub struct LabeledCloud {
    pub points: Vec<Point3<f64>>,
    pub times: Vec<f64>,
    pub histograms: Option<LabelHistograms>,
    pub modes: Option<Vec<u8>>,
}

impl LabeledCloud {
    pub fn new(points: Vec<Point3<f64>>, times: Vec<f64>) -> Result<Self, CloudError> {
        if points.len() != times.len() {
            return Err(CloudError::TimesLengthMismatch {
                points: points.len(),
                times: times.len(),
            });
        }
        Ok(Self {
            points,
            times,
            histograms: None,
            modes: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Validates the structural invariants: matching lengths and, if both
    /// histograms and modes are present, mode = histogram argmax.
    pub fn validate(&self) -> Result<(), CloudError> {
        if self.times.len() != self.points.len() {
            return Err(CloudError::TimesLengthMismatch {
                points: self.points.len(),
                times: self.times.len(),
            });
        }
        if let Some(h) = &self.histograms {
            if h.num_points() != self.points.len() {
                return Err(CloudError::HistogramLengthMismatch {
                    points: self.points.len(),
                    rows: h.num_points(),
                });
            }
        }
        if let Some(modes) = &self.modes {
            if modes.len() != self.points.len() {
                return Err(CloudError::ModesLengthMismatch {
                    points: self.points.len(),
                    modes: modes.len(),
                });
            }
            if let Some(h) = &self.histograms {
                for (i, &mode) in modes.iter().enumerate() {
                    let argmax = h.mode_of(i);
                    if argmax != Some(mode) {
                        return Err(CloudError::InconsistentMode {
                            index: i,
                            mode,
                            argmax,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A per-pixel class-index image. Values are 2D evaluation indices or
/// [`IGNORE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRaster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl LabelRaster {
    pub fn new(
        width: u32,
        height: u32,
        data: Vec<u8>,
        ontology: &ClassOntology,
    ) -> Result<Self, CloudError> {
        if data.len() != (width as usize) * (height as usize) {
            return Err(CloudError::RasterSizeMismatch {
                len: data.len(),
                width,
                height,
            });
        }
        let mut bad_value = None;
        let mut bad_count = 0usize;
        for &v in &data {
            if !ontology.is_valid_eval2d_or_ignore(v) {
                bad_value.get_or_insert(v);
                bad_count += 1;
            }
        }
        if let Some(value) = bad_value {
            return Err(CloudError::InvalidRasterValue {
                value,
                count: bad_count,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; (width as usize) * (height as usize)],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y as usize) * (self.width as usize) + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.data[(y as usize) * (self.width as usize) + x as usize] = value;
    }

    /// The class at a pixel, or `None` for ignore pixels.
    pub fn class_at(&self, x: u32, y: u32) -> Option<u8> {
        let v = self.get(x, y);
        if v == IGNORE {
            None
        } else {
            Some(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_ties_break_to_lowest_class() {
        let mut h = LabelHistograms::new(1, 4);
        h.add(0, 3);
        h.add(0, 1);
        assert_eq!(h.mode_of(0), Some(1));
        h.add(0, 3);
        assert_eq!(h.mode_of(0), Some(3));
    }

    #[test]
    fn zero_histogram_has_no_mode() {
        let h = LabelHistograms::new(2, 5);
        assert_eq!(h.mode_of(0), None);
        assert_eq!(h.mode_of(1), None);
    }

    #[test]
    fn merge_requires_matching_shape() {
        let mut a = LabelHistograms::new(2, 3);
        let b = LabelHistograms::new(3, 3);
        assert!(matches!(a.merge(&b), Err(CloudError::ShapeMismatch(..))));
    }

    #[test]
    fn merge_sums_elementwise() {
        let mut a = LabelHistograms::new(2, 2);
        a.add(0, 0);
        a.add(1, 1);
        let mut b = LabelHistograms::new(2, 2);
        b.add(0, 0);
        b.add(0, 1);
        a.merge(&b).unwrap();
        assert_eq!(a.row(0), &[2, 1]);
        assert_eq!(a.row(1), &[0, 1]);
    }

    #[test]
    fn validate_checks_mode_against_argmax() {
        let mut h = LabelHistograms::new(1, 3);
        h.add(0, 2);
        let cloud = LabeledCloud {
            points: vec![Point3::origin()],
            times: vec![0.0],
            histograms: Some(h),
            modes: Some(vec![1]),
        };
        assert!(matches!(
            cloud.validate(),
            Err(CloudError::InconsistentMode { .. })
        ));
    }

    #[test]
    fn raster_rejects_unknown_values() {
        let ont = ClassOntology::benchmark();
        let err = LabelRaster::new(2, 1, vec![0, 200], &ont);
        assert!(matches!(
            err,
            Err(CloudError::InvalidRasterValue { value: 200, count: 1 })
        ));
        let ok = LabelRaster::new(2, 1, vec![14, IGNORE], &ont);
        assert!(ok.is_ok());
    }
}
