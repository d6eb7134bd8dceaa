#![allow(dead_code)] // each test binary uses a different subset

//! Shared fixtures for CLI tests: a synthetic walk-along-a-ground-plane
//! sequence written to disk in the real formats, plus an independent
//! brute-force oracle for the expected label histograms.
//!
//! The scene is occlusion-free by construction (one ground plane seen from
//! above), so a point receives a vote from a frame exactly when it passes the
//! range filter and projects into the image. That makes the oracle exact, not
//! approximate.

use std::path::{Path, PathBuf};
use std::process::Command;

use nalgebra::{Isometry3, Matrix3, Point3, Rotation3, Translation3, UnitQuaternion, Vector3};

use cloudlabel_core::camera::CameraModel;
use cloudlabel_core::cloud::LabelRaster;
use cloudlabel_core::io::{
    stem_for_timestamp, write_calibration, write_cloud_bin, write_index_label_png, write_poses_csv,
    write_times, BinLayout, DIR_INDEX_LABEL,
};
use cloudlabel_core::pose::{Pose, Trajectory};
use cloudlabel_core::IGNORE;

pub const NUM_CLASSES: usize = 15;
pub const FX: f64 = 300.0;
pub const FY: f64 = 300.0;
pub const CX: f64 = 320.0;
pub const CY: f64 = 240.0;
pub const WIDTH: u32 = 640;
pub const HEIGHT: u32 = 480;
pub const CARRIER_HEIGHT: f64 = 1.75;
pub const MIN_RANGE: f64 = 2.0;
pub const MAX_RANGE: f64 = 45.0;

/// Frame timestamps and the left/right class pair painted into each raster.
pub const FRAMES: [(f64, u8, u8); 3] = [(2.0, 1, 2), (5.0, 1, 3), (8.0, 2, 3)];

pub struct Scene {
    pub root: PathBuf,
    pub cloud_path: PathBuf,
    pub times_path: PathBuf,
    pub points: Vec<Point3<f64>>,
    pub times: Vec<f64>,
}

/// body <- camera: camera +z is body +x (forward), +x is body -y, +y is
/// body -z. All quaternion components are exactly 0.5, so the transform is
/// bit-exact on dyadic coordinates.
pub fn extrinsic() -> Isometry3<f64> {
    let rot = Rotation3::from_matrix_unchecked(Matrix3::new(
        0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, //
        0.0, -1.0, 0.0,
    ));
    Isometry3::from_parts(
        Translation3::identity(),
        UnitQuaternion::from_rotation_matrix(&rot),
    )
}

/// Walk along +x at 1 m/s, 11 poses, carrier at 1.75 m height (dyadic, so
/// the pose arithmetic stays bit-exact), identity
/// orientation (body x forward).
pub fn trajectory() -> Trajectory {
    let poses = (0..=10)
        .map(|i| {
            Pose::new(
                i as f64,
                Vector3::new(i as f64, 0.0, CARRIER_HEIGHT),
                0.0,
                0.0,
                0.0,
                1.0,
            )
        })
        .collect();
    Trajectory::new(poses).unwrap()
}

/// Ground grid on z = 0: x in [0, 20], y in [-5, 5], 0.5 m spacing. Every
/// coordinate is exactly representable in f32, so the .bin narrowing is
/// lossless. A point's observation time is the moment the carrier passes it.
pub fn ground_points() -> (Vec<Point3<f64>>, Vec<f64>) {
    let mut points = Vec::new();
    let mut times = Vec::new();
    for xi in 0..=40 {
        for yi in 0..=20 {
            let x = xi as f64 * 0.5;
            let y = yi as f64 * 0.5 - 5.0;
            points.push(Point3::new(x, y, 0.0));
            times.push(x.clamp(0.0, 10.0));
        }
    }
    (points, times)
}

fn raster_split(left: u8, right: u8) -> LabelRaster {
    let mut raster = LabelRaster::filled(WIDTH, HEIGHT, right);
    for y in 0..HEIGHT {
        for x in 0..WIDTH / 2 {
            raster.set(x, y, left);
        }
    }
    raster
}

/// Writes the full sequence to `root` and the global cloud beside it.
pub fn build_scene(root: &Path) -> Scene {
    std::fs::create_dir_all(root.join(DIR_INDEX_LABEL)).unwrap();
    let traj = trajectory();
    write_poses_csv(root.join("poses.csv"), &traj).unwrap();

    let camera = CameraModel::new(FX, FY, CX, CY, WIDTH, HEIGHT, extrinsic()).unwrap();
    write_calibration(root.join("camera_calibration.yaml"), &camera).unwrap();

    for (t, left, right) in FRAMES {
        let stem = stem_for_timestamp(t);
        write_index_label_png(
            root.join(DIR_INDEX_LABEL).join(format!("{stem}.png")),
            &raster_split(left, right),
        )
        .unwrap();
    }

    let (points, times) = ground_points();
    let cloud_path = root.join("global.bin");
    let times_path = root.join("global.times");
    write_cloud_bin(&cloud_path, &points, None, BinLayout::XyzIntensity).unwrap();
    write_times(&times_path, &times).unwrap();

    Scene {
        root: root.to_path_buf(),
        cloud_path,
        times_path,
        points,
        times,
    }
}

/// Hand-rolled projection through the walk pose at time `t` composed with the
/// camera extrinsic, written with the same multiply-then-divide order as the
/// pinhole model.
pub fn oracle_project(p: &Point3<f64>, t: f64) -> Option<(u32, u32)> {
    // body frame (identity orientation): p - (t, 0, h)
    let bx = p.x - t;
    let by = p.y;
    let bz = p.z - CARRIER_HEIGHT;
    // camera frame: x = -by, y = -bz, z = bx
    let x_cam = -by;
    let y_cam = -bz;
    let z_cam = bx;
    if z_cam <= 1.0e-6 {
        return None;
    }
    let u = FX * x_cam / z_cam + CX;
    let v = FY * y_cam / z_cam + CY;
    if u < 0.0 || u >= WIDTH as f64 || v < 0.0 || v >= HEIGHT as f64 {
        return None;
    }
    Some((u.floor() as u32, v.floor() as u32))
}

/// Expected per-point histograms: one vote per frame whose range filter and
/// image bounds the point passes (the scene has no occluders and the ground
/// always faces the elevated cameras within the slack).
pub fn oracle_histograms(points: &[Point3<f64>]) -> Vec<[u32; NUM_CLASSES]> {
    let mut hists = vec![[0u32; NUM_CLASSES]; points.len()];
    for (t, left, right) in FRAMES {
        let cam = Point3::new(t, 0.0, CARRIER_HEIGHT);
        for (i, p) in points.iter().enumerate() {
            let d = (p - cam).norm();
            if !(MIN_RANGE..=MAX_RANGE).contains(&d) {
                continue;
            }
            if let Some((u, _v)) = oracle_project(p, t) {
                let class = if u < WIDTH / 2 { left } else { right };
                if class != IGNORE {
                    hists[i][class as usize] += 1;
                }
            }
        }
    }
    hists
}

/// Oracle modes with the lowest-index tie-break; `None` for unobserved points.
pub fn oracle_modes(hists: &[[u32; NUM_CLASSES]]) -> Vec<Option<u8>> {
    hists
        .iter()
        .map(|h| {
            let mut best: Option<(u32, usize)> = None;
            for (c, &count) in h.iter().enumerate() {
                if count > 0 && best.is_none_or(|(b, _)| count > b) {
                    best = Some((count, c));
                }
            }
            best.map(|(_, c)| c as u8)
        })
        .collect()
}

pub fn cloudlabel_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cloudlabel"))
}
