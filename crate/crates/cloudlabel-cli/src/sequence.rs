//! Shared sequence loading: trajectory, calibration, frames, and clouds.

use std::path::Path;

use anyhow::{bail, Context};
use nalgebra::Point3;

use cloudlabel_core::cloud::LabeledCloud;
use cloudlabel_core::io::{
    read_calibration, read_cloud_bin, read_index_label_png, read_poses_csv, read_times, BinLayout,
    SequenceLayout, DIR_INDEX_LABEL,
};
use cloudlabel_core::ontology::ClassOntology;
use cloudlabel_core::pose::{LookupMode, Trajectory};
use cloudlabel_core::transfer::CameraFrame;

pub struct Sequence {
    pub layout: SequenceLayout,
    pub trajectory: Trajectory,
    pub camera: cloudlabel_core::camera::CameraModel,
}

pub fn load_sequence(root: &Path) -> anyhow::Result<Sequence> {
    let layout = SequenceLayout::new(root);
    let trajectory = read_poses_csv(layout.poses_path()).context("loading poses")?;
    let calibration = read_calibration(layout.calibration_path()).context("loading calibration")?;
    Ok(Sequence {
        layout,
        trajectory,
        camera: calibration.camera,
    })
}

impl Sequence {
    /// Loads every annotated frame: raster from `indexLabel/`, camera world
    /// pose from the trajectory (exact timestamp lookup) composed with the
    /// calibration extrinsic.
    pub fn load_frames(&self, ontology: &ClassOntology) -> anyhow::Result<Vec<CameraFrame>> {
        let stems = self
            .layout
            .stems(DIR_INDEX_LABEL)
            .context("listing indexLabel")?;
        if stems.is_empty() {
            bail!("no label rasters in {}", self.layout.dir(DIR_INDEX_LABEL).display());
        }
        let mut frames = Vec::with_capacity(stems.len());
        for stem in &stems {
            let t: f64 = stem
                .parse()
                .with_context(|| format!("stem `{stem}` is not a timestamp"))?;
            let body = self
                .trajectory
                .pose_at(t, LookupMode::exact())
                .with_context(|| format!("no pose for frame `{stem}`"))?;
            let raster = read_index_label_png(self.layout.index_label_path(stem), ontology)?;
            frames.push(CameraFrame {
                timestamp: t,
                pose: body.compose(&self.camera.extrinsic),
                camera: self.camera.clone(),
                raster,
            });
        }
        Ok(frames)
    }
}

/// Loads a cloud plus its per-point time sidecar into a `LabeledCloud`.
pub fn load_cloud_with_times(
    cloud_path: &Path,
    times_path: &Path,
) -> anyhow::Result<(LabeledCloud, Vec<f32>)> {
    let bin = read_cloud_bin(cloud_path, BinLayout::XyzIntensity)
        .with_context(|| format!("reading {}", cloud_path.display()))?;
    let times =
        read_times(times_path).with_context(|| format!("reading {}", times_path.display()))?;
    if times.len() != bin.points.len() {
        bail!(
            "{}: {} times for {} points",
            times_path.display(),
            times.len(),
            bin.points.len()
        );
    }
    Ok((LabeledCloud::new(bin.points, times)?, bin.intensity))
}

/// World-frame copy of a sensor-frame cloud.
pub fn to_world_frame(
    cloud: &LabeledCloud,
    pose: &cloudlabel_core::pose::Pose,
) -> anyhow::Result<LabeledCloud> {
    let points: Vec<Point3<f64>> = cloud
        .points
        .iter()
        .map(|p| pose.transform_point(p))
        .collect();
    Ok(LabeledCloud::new(points, cloud.times.clone())?)
}
