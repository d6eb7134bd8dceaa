//! Pinhole camera model for rectified images (zero distortion).

use nalgebra::{Isometry3, Point3};
use thiserror::Error;

use crate::pose::Pose;

/// Points closer than this along the optical axis project to [`Projection::Behind`].
pub const MIN_DEPTH: f64 = 1.0e-6;

#[derive(Debug, Error)]
pub enum CameraError {
    #[error("focal length must be positive, got {0}")]
    NonPositiveFocal(f64),
    #[error("principal point ({cx}, {cy}) outside image {width}x{height}")]
    PrincipalPointOutside {
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    },
}

/// Rectified pinhole intrinsics plus the rigid transform from the camera
/// frame to the sensor-body frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// body <- camera.
    pub extrinsic: Isometry3<f64>,
}

/// Result of projecting a camera-frame point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// The point is at or behind the image plane.
    Behind,
    /// Continuous pixel coordinates; the caller checks image bounds.
    Pixel { u: f64, v: f64 },
}

impl CameraModel {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        extrinsic: Isometry3<f64>,
    ) -> Result<Self, CameraError> {
        if fx <= 0.0 {
            return Err(CameraError::NonPositiveFocal(fx));
        }
        if fy <= 0.0 {
            return Err(CameraError::NonPositiveFocal(fy));
        }
        if cx <= 0.0 || cx >= width as f64 || cy <= 0.0 || cy >= height as f64 {
            return Err(CameraError::PrincipalPointOutside {
                cx,
                cy,
                width,
                height,
            });
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            extrinsic,
        })
    }

    /// Projects a camera-frame point onto the image plane.
    pub fn project(&self, p_cam: &Point3<f64>) -> Projection {
        if p_cam.z <= MIN_DEPTH {
            return Projection::Behind;
        }
        Projection::Pixel {
            u: self.fx * p_cam.x / p_cam.z + self.cx,
            v: self.fy * p_cam.y / p_cam.z + self.cy,
        }
    }

    /// True if continuous pixel coordinates fall inside the image.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && u < self.width as f64 && v >= 0.0 && v < self.height as f64
    }

    /// Projects to an integer pixel (`floor(u), floor(v)`), or `None` if the
    /// point is behind the camera or outside the image.
    pub fn project_to_pixel(&self, p_cam: &Point3<f64>) -> Option<(u32, u32)> {
        match self.project(p_cam) {
            Projection::Behind => None,
            Projection::Pixel { u, v } => {
                if self.contains(u, v) {
                    Some((u.floor() as u32, v.floor() as u32))
                } else {
                    None
                }
            }
        }
    }
}

/// World-frame point into the frame of a camera with world pose `cam_pose`.
pub fn world_to_camera(p_world: &Point3<f64>, cam_pose: &Pose) -> Point3<f64> {
    cam_pose.inverse_transform_point(p_world)
}
