//! Index-label rasters: 8-bit single-channel PNG where each pixel value is a
//! 2D evaluation class index or the ignore sentinel.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader};

use super::FormatError;
use crate::cloud::{CloudError, LabelRaster};
use crate::ontology::ClassOntology;

pub fn read_index_label_png(
    path: impl AsRef<Path>,
    ontology: &ClassOntology,
) -> Result<LabelRaster, FormatError> {
    let path = path.as_ref();
    let image = ImageReader::open(path)
        .map_err(|e| FormatError::io(path, e))?
        .decode()
        .map_err(|e| FormatError::Png {
            path: path.to_path_buf(),
            source: e,
        })?;
    let gray: GrayImage = match image {
        DynamicImage::ImageLuma8(img) => img,
        _ => {
            return Err(FormatError::NotGrayscale8 {
                path: path.to_path_buf(),
            })
        }
    };
    let (width, height) = gray.dimensions();
    LabelRaster::new(width, height, gray.into_raw(), ontology).map_err(|e| match e {
        CloudError::InvalidRasterValue { value, count } => FormatError::UnknownClassIndex {
            path: path.to_path_buf(),
            value: value as u32,
            count,
        },
        other => FormatError::Invalid {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

pub fn write_index_label_png(
    path: impl AsRef<Path>,
    raster: &LabelRaster,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let img = GrayImage::from_raw(raster.width(), raster.height(), raster.data().to_vec())
        .expect("raster dimensions match data length");
    img.save(path).map_err(|e| FormatError::Png {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::IGNORE;
    use tempfile::tempdir;

    #[test]
    fn uniform_raster_roundtrip() {
        let ont = ClassOntology::benchmark();
        let dir = tempdir().unwrap();
        let path = dir.path().join("u.png");
        let raster = LabelRaster::filled(8, 4, 2);
        write_index_label_png(&path, &raster).unwrap();
        let back = read_index_label_png(&path, &ont).unwrap();
        assert_eq!(back, raster);
    }

    #[test]
    fn unknown_value_rejected_with_count() {
        let ont = ClassOntology::benchmark();
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.png");
        let mut raster = LabelRaster::filled(4, 4, 0);
        // Bypass validation by writing raw pixels through the image crate.
        raster.set(1, 1, 0);
        let mut img = GrayImage::from_raw(4, 4, raster.data().to_vec()).unwrap();
        img.put_pixel(2, 2, image::Luma([200u8]));
        img.put_pixel(3, 3, image::Luma([200u8]));
        img.save(&path).unwrap();
        match read_index_label_png(&path, &ont) {
            Err(FormatError::UnknownClassIndex { value, count, .. }) => {
                assert_eq!(value, 200);
                assert_eq!(count, 2);
            }
            other => panic!("expected UnknownClassIndex, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_pattern_roundtrip() {
        let ont = ClassOntology::benchmark();
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.png");
        let mut raster = LabelRaster::filled(4, 4, IGNORE);
        for y in 0..4 {
            for x in 0..4 {
                raster.set(x, y, ((x + y) % 15) as u8);
            }
        }
        write_index_label_png(&path, &raster).unwrap();
        assert_eq!(read_index_label_png(&path, &ont).unwrap(), raster);
    }
}
