//! The label-transfer pipeline: trajectory-centric frame sampling, submap
//! extraction, and multi-view transfer of 2D label rasters onto a 3D cloud
//! with per-point histogram voting.
//!
//! Frames are processed independently (optionally in parallel); each yields a
//! private set of (point, class) hits, and histogram accumulation is a
//! commutative sum, so outputs are byte-identical for any thread count.

use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{world_to_camera, CameraModel};
use crate::cloud::{CloudError, LabelHistograms, LabelRaster, LabeledCloud};
use crate::pose::{Pose, PoseError, Trajectory};
use crate::visibility::{estimate_normals, facing_check, ghpr_visible, GhprConfig, NormalError};

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("no frames to transfer from")]
    NoFrames,
    #[error(transparent)]
    Pose(#[from] PoseError),
    #[error(transparent)]
    Normals(#[from] NormalError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
}

/// Emission rule for trajectory-centric frame sampling: a frame is emitted
/// whenever the carrier has traveled `distance_step` meters or turned
/// `heading_step_deg` degrees (cumulative absolute yaw) since the last
/// emission.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameSampleRule {
    pub distance_step: f64,
    pub heading_step_deg: f64,
}

impl Default for FrameSampleRule {
    fn default() -> Self {
        Self {
            distance_step: 5.0,
            heading_step_deg: 5.0,
        }
    }
}

/// Submap extraction window around an image timestamp.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SubmapSpec {
    /// Spatial radius around the sensor position, meters.
    pub radius: f64,
    /// Temporal half-window around the image timestamp, seconds.
    pub time_window: f64,
    /// Points closer than this to the carrier at their own observation time
    /// are masked out.
    pub self_strike_radius: f64,
}

impl Default for SubmapSpec {
    fn default() -> Self {
        Self {
            radius: 45.0,
            time_window: 1.0,
            self_strike_radius: 2.0,
        }
    }
}

/// A posed, labeled image: raster, intrinsics, and the camera's world pose at
/// capture time.
#[derive(Debug, Clone)]
pub struct CameraFrame {
    pub timestamp: f64,
    /// world <- camera.
    pub pose: Pose,
    pub camera: CameraModel,
    pub raster: LabelRaster,
}

/// Emits frame timestamps along a trajectory: the first pose always, then one
/// whenever cumulative translation reaches `distance_step` or cumulative
/// absolute heading change reaches `heading_step_deg`. Both counters reset on
/// every emission.
pub fn sample_frames(trajectory: &Trajectory, rule: &FrameSampleRule) -> Vec<f64> {
    let poses = trajectory.poses();
    if poses.is_empty() {
        return Vec::new();
    }
    // Accumulated increments carry float rounding; the tolerance keeps
    // exact-boundary trajectories (5 x 1 m, 5 x 1 deg) emitting on the
    // boundary step.
    const BOUNDARY_EPS: f64 = 1.0e-9;
    let mut emitted = vec![poses[0].t];
    let mut dist = 0.0;
    let mut heading = 0.0;
    for pair in poses.windows(2) {
        dist += (pair[1].position() - pair[0].position()).norm();
        heading += wrap_angle(pair[1].yaw() - pair[0].yaw()).abs();
        if dist >= rule.distance_step - BOUNDARY_EPS
            || heading >= rule.heading_step_deg.to_radians() - BOUNDARY_EPS
        {
            emitted.push(pair[1].t);
            dist = 0.0;
            heading = 0.0;
        }
    }
    emitted
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a < -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}

/// A submap extracted around a timestamp, expressed in the sensor frame at
/// that time.
#[derive(Debug, Clone)]
pub struct Submap {
    pub cloud: LabeledCloud,
    /// Indices of the kept points in the source cloud.
    pub kept: Vec<u32>,
    /// The sensor pose the submap is expressed in.
    pub pose: Pose,
}

/// Cuts the window of `global_cloud` around timestamp `t`: points within
/// `spec.radius` of the sensor position, observed within `spec.time_window`
/// of `t`, and not within `spec.self_strike_radius` of the carrier at the
/// point's own observation time. The result is expressed in the sensor frame
/// at `t`.
pub fn extract_submap(
    global_cloud: &LabeledCloud,
    t: f64,
    trajectory: &Trajectory,
    spec: &SubmapSpec,
) -> Result<Submap, TransferError> {
    let pose = trajectory.pose_at(t, crate::pose::LookupMode::Interpolate)?;
    let sensor = pose.position();

    let mut kept: Vec<u32> = Vec::new();
    for (i, (p, &pt)) in global_cloud
        .points
        .iter()
        .zip(&global_cloud.times)
        .enumerate()
    {
        if (pt - t).abs() > spec.time_window {
            continue;
        }
        if (p.coords - sensor).norm() > spec.radius {
            continue;
        }
        let carrier = trajectory.position_at_clamped(pt);
        if (p.coords - carrier).norm() < spec.self_strike_radius {
            continue;
        }
        kept.push(i as u32);
    }
    if kept.is_empty() {
        log::warn!("submap at t={t} is empty");
    }

    let points: Vec<Point3<f64>> = kept
        .iter()
        .map(|&i| pose.inverse_transform_point(&global_cloud.points[i as usize]))
        .collect();
    let times: Vec<f64> = kept
        .iter()
        .map(|&i| global_cloud.times[i as usize])
        .collect();
    let mut cloud = LabeledCloud::new(points, times)?;
    if let Some(h) = &global_cloud.histograms {
        cloud.histograms = Some(h.select(&kept));
    }
    if let Some(m) = &global_cloud.modes {
        cloud.modes = Some(kept.iter().map(|&i| m[i as usize]).collect());
    }
    Ok(Submap { cloud, kept, pose })
}

/// Tunables of the transfer stage.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransferConfig {
    pub ghpr: GhprConfig,
    /// Facing-check slack past grazing incidence, degrees.
    pub slack_deg: f64,
    /// Neighbor count for normal estimation.
    pub normal_k: usize,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            ghpr: GhprConfig::default(),
            slack_deg: 10.0,
            normal_k: 10,
        }
    }
}

/// Summary statistics of one transfer run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferReport {
    pub frames: usize,
    pub points_in: usize,
    pub points_labeled: usize,
    pub points_dropped: usize,
    /// Total label hits per class across all (point, frame) pairs.
    pub per_class_hits: Vec<u64>,
    pub frames_with_degenerate_hull: usize,
}

/// Output of [`transfer_labels`]: the surviving points with histograms and
/// mode labels, plus the mapping back into the input cloud.
#[derive(Debug, Clone)]
pub struct TransferOutput {
    pub cloud: LabeledCloud,
    /// Index into the input cloud for each output point.
    pub kept: Vec<u32>,
    pub report: TransferReport,
}

/// Transfers labels from every frame onto the cloud.
///
/// Per frame: (1) range filter around the camera center, (2) projection to a
/// valid pixel, (3) facing check against the estimated normals, (4) hidden
/// point removal from the camera center; every surviving point casts one vote
/// for the class at its pixel (ignore pixels cast nothing). After all frames,
/// each point's label is its histogram mode (ties to the lowest class index)
/// and points with empty histograms are dropped.
pub fn transfer_labels(
    cloud: &LabeledCloud,
    frames: &[CameraFrame],
    trajectory: &Trajectory,
    cfg: &TransferConfig,
    num_classes: usize,
) -> Result<TransferOutput, TransferError> {
    if frames.is_empty() {
        return Err(TransferError::NoFrames);
    }
    let normals = estimate_normals(cloud, cfg.normal_k, trajectory)?;
    let ghpr = cfg.ghpr;

    let per_frame: Vec<(Vec<(u32, u8)>, bool)> = frames
        .par_iter()
        .map(|frame| frame_hits(cloud, &normals.normals, frame, &ghpr, cfg.slack_deg))
        .collect();

    let mut histograms = LabelHistograms::new(cloud.len(), num_classes);
    let mut per_class_hits = vec![0u64; num_classes];
    let mut degenerate = 0usize;
    for (hits, was_degenerate) in &per_frame {
        if *was_degenerate {
            degenerate += 1;
        }
        for &(point, class) in hits {
            histograms.add(point as usize, class);
            per_class_hits[class as usize] += 1;
        }
    }

    let kept: Vec<u32> = (0..cloud.len() as u32)
        .filter(|&i| histograms.total(i as usize) > 0)
        .collect();
    let points: Vec<Point3<f64>> = kept.iter().map(|&i| cloud.points[i as usize]).collect();
    let times: Vec<f64> = kept.iter().map(|&i| cloud.times[i as usize]).collect();
    let histograms = histograms.select(&kept);
    let modes: Vec<u8> = (0..kept.len())
        .map(|i| histograms.mode_of(i).expect("kept points have votes"))
        .collect();

    let report = TransferReport {
        frames: frames.len(),
        points_in: cloud.len(),
        points_labeled: kept.len(),
        points_dropped: cloud.len() - kept.len(),
        per_class_hits,
        frames_with_degenerate_hull: degenerate,
    };
    let mut out = LabeledCloud::new(points, times)?;
    out.histograms = Some(histograms);
    out.modes = Some(modes);
    Ok(TransferOutput {
        cloud: out,
        kept,
        report,
    })
}

/// One frame's (point index, class) votes. A point votes at most once per
/// frame. The bool reports whether the visibility hull was degenerate.
fn frame_hits(
    cloud: &LabeledCloud,
    normals: &[Option<nalgebra::Unit<nalgebra::Vector3<f64>>>],
    frame: &CameraFrame,
    ghpr: &GhprConfig,
    slack_deg: f64,
) -> (Vec<(u32, u8)>, bool) {
    let cam_center = Point3::from(frame.pose.position());

    // Range filter, projection filter, facing check.
    let mut candidates: Vec<u32> = Vec::new();
    let mut pixels: Vec<(u32, u32)> = Vec::new();
    let mut positions: Vec<Point3<f64>> = Vec::new();
    for (i, p) in cloud.points.iter().enumerate() {
        let d = (p - cam_center).norm();
        if d < ghpr.min_range || d > ghpr.max_range {
            continue;
        }
        let p_cam = world_to_camera(p, &frame.pose);
        let pixel = match frame.camera.project_to_pixel(&p_cam) {
            Some(px) => px,
            None => continue,
        };
        if !facing_check(p, normals[i].as_ref(), &cam_center, slack_deg) {
            continue;
        }
        candidates.push(i as u32);
        pixels.push(pixel);
        positions.push(*p);
    }
    if candidates.is_empty() {
        return (Vec::new(), false);
    }

    let vis = ghpr_visible(&positions, &cam_center, &GhprConfig::unbounded(ghpr.gamma));
    let hits = vis
        .visible
        .iter()
        .filter_map(|&vi| {
            let (u, v) = pixels[vi as usize];
            frame
                .raster
                .class_at(u, v)
                .map(|class| (candidates[vi as usize], class))
        })
        .collect();
    (hits, vis.hull_degenerate)
}

/// Elementwise sum of per-frame partial histograms. Commutative and
/// associative, so any merge order yields identical output.
pub fn merge_histograms(parts: &[LabelHistograms]) -> Result<LabelHistograms, TransferError> {
    let first = parts.first().ok_or(TransferError::NoFrames)?;
    let mut out = first.clone();
    for part in &parts[1..] {
        out.merge(part)?;
    }
    Ok(out)
}
