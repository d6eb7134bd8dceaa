//! Timestamped 6-DoF poses and trajectory lookup.
//!
//! A [`Pose`] maps sensor-frame coordinates to world-frame coordinates
//! (`p_world = R * p_sensor + t`). Trajectories are strictly increasing in
//! time; lookups are either exact (within a synchronization tolerance) or
//! interpolated (linear position, spherical-linear orientation).

use nalgebra::{Isometry3, Point3, Quaternion, Translation3, UnitQuaternion, Vector3};
use thiserror::Error;

/// Default tolerance for exact timestamp lookup, in seconds. Poses are
/// provided per frame, so exact lookups should normally match; the tolerance
/// absorbs float formatting of timestamps.
pub const DEFAULT_SYNC_TOLERANCE: f64 = 0.010;

#[derive(Debug, Error)]
pub enum PoseError {
    #[error("no pose within {tolerance} s of t={t}")]
    NoPoseAtTime { t: f64, tolerance: f64 },
    #[error("t={t} outside trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("duplicate timestamp {0} in trajectory")]
    DuplicateTimestamp(f64),
    #[error("trajectory is empty")]
    Empty,
}

/// A timestamped rigid transform from the sensor frame to the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub t: f64,
    pub isometry: Isometry3<f64>,
}

impl Pose {
    /// Builds a pose from a position and an (x, y, z, w) quaternion, which is
    /// normalized on construction.
    pub fn new(t: f64, position: Vector3<f64>, qx: f64, qy: f64, qz: f64, qw: f64) -> Self {
        let orientation = UnitQuaternion::from_quaternion(Quaternion::new(qw, qx, qy, qz));
        Self {
            t,
            isometry: Isometry3::from_parts(Translation3::from(position), orientation),
        }
    }

    pub fn identity(t: f64) -> Self {
        Self {
            t,
            isometry: Isometry3::identity(),
        }
    }

    pub fn position(&self) -> Vector3<f64> {
        self.isometry.translation.vector
    }

    pub fn orientation(&self) -> UnitQuaternion<f64> {
        self.isometry.rotation
    }

    /// Sensor-frame point to world frame.
    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.isometry.transform_point(p)
    }

    /// World-frame point to sensor frame: `R^-1 (p - t)`.
    pub fn inverse_transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.isometry.inverse_transform_point(p)
    }

    /// Composes with a rigid transform on the right: if `self` maps frame A
    /// to world and `inner` maps frame B to A, the result maps B to world.
    pub fn compose(&self, inner: &Isometry3<f64>) -> Pose {
        Pose {
            t: self.t,
            isometry: self.isometry * inner,
        }
    }

    /// Heading angle about the world z axis, in radians.
    pub fn yaw(&self) -> f64 {
        let q = self.isometry.rotation.quaternion();
        let (w, x, y, z) = (q.w, q.i, q.j, q.k);
        (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z))
    }
}

/// How [`Trajectory::pose_at`] resolves a query timestamp.
#[derive(Debug, Clone, Copy)]
pub enum LookupMode {
    /// Require an existing pose with `|t_i - t| <= tolerance`.
    Exact { tolerance: f64 },
    /// Linear position and slerp orientation between the bracketing poses.
    Interpolate,
}

impl LookupMode {
    pub fn exact() -> Self {
        LookupMode::Exact {
            tolerance: DEFAULT_SYNC_TOLERANCE,
        }
    }
}

/// An ordered sequence of poses with strictly increasing timestamps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    poses: Vec<Pose>,
}

impl Trajectory {
    /// Sorts the poses by timestamp and validates strict monotonicity.
    pub fn new(mut poses: Vec<Pose>) -> Result<Self, PoseError> {
        if poses.is_empty() {
            return Err(PoseError::Empty);
        }
        poses.sort_by(|a, b| a.t.total_cmp(&b.t));
        for pair in poses.windows(2) {
            if pair[0].t >= pair[1].t {
                return Err(PoseError::DuplicateTimestamp(pair[0].t));
            }
        }
        Ok(Self { poses })
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Inclusive time span `(start, end)`.
    pub fn span(&self) -> (f64, f64) {
        (self.poses[0].t, self.poses[self.poses.len() - 1].t)
    }

    /// Looks up the pose at `t`, either exactly or by interpolation.
    pub fn pose_at(&self, t: f64, mode: LookupMode) -> Result<Pose, PoseError> {
        match mode {
            LookupMode::Exact { tolerance } => {
                let idx = self.nearest_index(t);
                let pose = &self.poses[idx];
                if (pose.t - t).abs() <= tolerance {
                    Ok(*pose)
                } else {
                    Err(PoseError::NoPoseAtTime { t, tolerance })
                }
            }
            LookupMode::Interpolate => {
                let (start, end) = self.span();
                if t < start || t > end {
                    return Err(PoseError::OutOfRange { t, start, end });
                }
                let hi = self.poses.partition_point(|p| p.t < t);
                if hi == 0 {
                    return Ok(self.poses[0]);
                }
                if self.poses[hi].t == t {
                    return Ok(self.poses[hi]);
                }
                let (a, b) = (&self.poses[hi - 1], &self.poses[hi]);
                let s = (t - a.t) / (b.t - a.t);
                let position = a.position() + (b.position() - a.position()) * s;
                let orientation = slerp(&a.orientation(), &b.orientation(), s);
                Ok(Pose {
                    t,
                    isometry: Isometry3::from_parts(Translation3::from(position), orientation),
                })
            }
        }
    }

    /// Interpolated carrier position at `t`, clamped to the trajectory span.
    /// Used for the self-strike mask, where a point observed fractionally
    /// outside the span should still be masked against the nearest pose.
    pub fn position_at_clamped(&self, t: f64) -> Vector3<f64> {
        let (start, end) = self.span();
        let t = t.clamp(start, end);
        self.pose_at(t, LookupMode::Interpolate)
            .expect("clamped time is within span")
            .position()
    }

    fn nearest_index(&self, t: f64) -> usize {
        let hi = self.poses.partition_point(|p| p.t < t);
        if hi == 0 {
            return 0;
        }
        if hi >= self.poses.len() {
            return self.poses.len() - 1;
        }
        if (self.poses[hi].t - t).abs() < (t - self.poses[hi - 1].t).abs() {
            hi
        } else {
            hi - 1
        }
    }
}

/// Shortest-path spherical-linear interpolation between two orientations.
fn slerp(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>, s: f64) -> UnitQuaternion<f64> {
    a.try_slerp(b, s, 1.0e-12).unwrap_or_else(|| {
        // Nearly antipodal or identical: fall back to normalized lerp along
        // the shortest arc.
        let mut qb = *b.quaternion();
        if a.quaternion().dot(&qb) < 0.0 {
            qb = -qb;
        }
        let q = a.quaternion() * (1.0 - s) + qb * s;
        UnitQuaternion::from_quaternion(q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn straight_trajectory() -> Trajectory {
        let poses = (0..5)
            .map(|i| Pose::new(i as f64, Vector3::new(i as f64, 0.0, 0.0), 0.0, 0.0, 0.0, 1.0))
            .collect();
        Trajectory::new(poses).unwrap()
    }

    #[test]
    fn exact_lookup_returns_matching_pose() {
        let traj = straight_trajectory();
        for mode in [LookupMode::exact(), LookupMode::Interpolate] {
            let p = traj.pose_at(2.0, mode).unwrap();
            assert_eq!(p.position(), Vector3::new(2.0, 0.0, 0.0));
        }
    }

    #[test]
    fn exact_lookup_fails_between_poses() {
        let traj = straight_trajectory();
        let err = traj.pose_at(2.5, LookupMode::exact());
        assert!(matches!(err, Err(PoseError::NoPoseAtTime { .. })));
    }

    #[test]
    fn interpolation_midpoint_position() {
        let poses = vec![
            Pose::new(0.0, Vector3::new(0.0, 0.0, 0.0), 0.0, 0.0, 0.0, 1.0),
            Pose::new(1.0, Vector3::new(2.0, 0.0, 0.0), 0.0, 0.0, 0.0, 1.0),
        ];
        let traj = Trajectory::new(poses).unwrap();
        let p = traj.pose_at(0.5, LookupMode::Interpolate).unwrap();
        assert_relative_eq!(p.position().x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.position().y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn interpolation_out_of_range_errors() {
        let traj = straight_trajectory();
        assert!(matches!(
            traj.pose_at(-0.1, LookupMode::Interpolate),
            Err(PoseError::OutOfRange { .. })
        ));
        assert!(matches!(
            traj.pose_at(4.1, LookupMode::Interpolate),
            Err(PoseError::OutOfRange { .. })
        ));
    }

    #[test]
    fn duplicate_timestamps_rejected() {
        let poses = vec![Pose::identity(1.0), Pose::identity(1.0)];
        assert!(matches!(
            Trajectory::new(poses),
            Err(PoseError::DuplicateTimestamp(_))
        ));
    }

    /// Brute-force oracle for the rotation curve: walks the geodesic from `a`
    /// toward `b` in many tiny fixed-axis increments and reports the pose at
    /// the queried fraction.
    fn dense_sampled_rotation(
        a: &UnitQuaternion<f64>,
        b: &UnitQuaternion<f64>,
        s: f64,
        steps: usize,
    ) -> UnitQuaternion<f64> {
        let delta = a.inverse() * b;
        let (axis, angle) = match delta.axis_angle() {
            Some((axis, angle)) => (axis, angle),
            None => return *a,
        };
        let target = angle * s;
        let step = angle / steps as f64;
        let mut walked = 0.0;
        let mut q = *a;
        while walked + step <= target {
            q *= UnitQuaternion::from_axis_angle(&axis, step);
            walked += step;
        }
        q * UnitQuaternion::from_axis_angle(&axis, target - walked)
    }

    #[test]
    fn slerp_midpoint_matches_dense_sampling_oracle() {
        let a = UnitQuaternion::identity();
        let b = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2);
        let poses = vec![
            Pose {
                t: 0.0,
                isometry: Isometry3::from_parts(Translation3::identity(), a),
            },
            Pose {
                t: 1.0,
                isometry: Isometry3::from_parts(Translation3::identity(), b),
            },
        ];
        let traj = Trajectory::new(poses).unwrap();
        let mid = traj.pose_at(0.5, LookupMode::Interpolate).unwrap();

        // 45 degrees about z.
        let expected = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2 / 2.0);
        assert!(mid.orientation().angle_to(&expected) < 1e-9);

        let oracle = dense_sampled_rotation(&a, &b, 0.5, 10_000);
        assert!(mid.orientation().angle_to(&oracle) < 1e-6);

        // A few off-midpoint fractions against the same oracle.
        for &s in &[0.25, 0.7, 0.9] {
            let p = traj.pose_at(s, LookupMode::Interpolate).unwrap();
            let oracle = dense_sampled_rotation(&a, &b, s, 10_000);
            assert!(p.orientation().angle_to(&oracle) < 1e-6, "s={s}");
        }
    }

    #[test]
    fn yaw_of_pure_z_rotation() {
        let p = Pose {
            t: 0.0,
            isometry: Isometry3::from_parts(
                Translation3::identity(),
                UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 0.3),
            ),
        };
        assert_relative_eq!(p.yaw(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn compose_then_inverse_is_identity() {
        let pose = Pose::new(
            0.0,
            Vector3::new(1.0, -2.0, 0.5),
            0.1, 0.2, -0.3, 0.9,
        );
        let p = Point3::new(4.0, 5.0, -6.0);
        let roundtrip = pose.inverse_transform_point(&pose.transform_point(&p));
        assert!((roundtrip - p).norm() < 1e-9);
    }
}
