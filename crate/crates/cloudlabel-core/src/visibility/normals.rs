//! Surface normal estimation from local neighborhoods.
//!
//! The normal of a point is the eigenvector of the smallest eigenvalue of the
//! covariance matrix of its k nearest neighbors. The sign ambiguity is
//! resolved toward the sensor position at the time the point was first
//! observed.

use nalgebra::{Matrix3, Point3, SymmetricEigen, Unit, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::cloud::LabeledCloud;
use crate::pose::{LookupMode, PoseError, Trajectory};
use crate::spatial::KdTree;

/// Neighborhoods whose dominant eigenvalue carries more than this fraction of
/// the total variance are effectively collinear: the normal direction is
/// arbitrary, so the point is marked invalid (and later passes the facing
/// check permissively).
const LINE_DOMINANCE: f64 = 0.9;

#[derive(Debug, Error)]
pub enum NormalError {
    #[error("cloud has {have} points but k={need} neighbors were requested")]
    InsufficientPoints { have: usize, need: usize },
    #[error("neighbor count k={0} must be at least 3")]
    KTooSmall(usize),
    #[error(transparent)]
    Pose(#[from] PoseError),
}

/// Per-point estimated normals. `None` marks a degenerate neighborhood;
/// `quality` is the smallest-eigenvalue ratio (0 for a perfect plane).
#[derive(Debug, Clone)]
pub struct NormalField {
    pub normals: Vec<Option<Unit<Vector3<f64>>>>,
    pub quality: Vec<f64>,
}

impl NormalField {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }
}

type OrientedNormal = (Option<Unit<Vector3<f64>>>, f64);

/// Estimates one normal per cloud point from its `k` nearest neighbors
/// (including the point itself), oriented toward the trajectory position at
/// the point's own observation time.
pub fn estimate_normals(
    cloud: &LabeledCloud,
    k: usize,
    trajectory: &Trajectory,
) -> Result<NormalField, NormalError> {
    if k < 3 {
        return Err(NormalError::KTooSmall(k));
    }
    if cloud.len() < k {
        return Err(NormalError::InsufficientPoints {
            have: cloud.len(),
            need: k,
        });
    }
    let tree = KdTree::build(&cloud.points);

    let per_point: Result<Vec<OrientedNormal>, NormalError> = cloud
        .points
        .par_iter()
        .zip(cloud.times.par_iter())
        .map(|(p, &t)| {
            let neighbors = tree.k_nearest(p, k);
            let (normal, quality) = fit_plane_normal(&cloud.points, &neighbors);
            let oriented = match normal {
                Some(n) => {
                    let observer = trajectory.pose_at(t, LookupMode::Interpolate)?.position();
                    let toward = observer - p.coords;
                    if n.dot(&toward) < 0.0 {
                        Some(Unit::new_unchecked(-n.into_inner()))
                    } else {
                        Some(n)
                    }
                }
                None => None,
            };
            Ok((oriented, quality))
        })
        .collect();

    let per_point = per_point?;
    let (normals, quality) = per_point.into_iter().unzip();
    Ok(NormalField { normals, quality })
}

/// Covariance eigen-decomposition of a neighborhood. Returns the unoriented
/// normal (eigenvector of the smallest eigenvalue) and the smallest-eigenvalue
/// ratio; `None` for degenerate (coincident or line-like) neighborhoods.
fn fit_plane_normal(
    points: &[Point3<f64>],
    neighbors: &[u32],
) -> (Option<Unit<Vector3<f64>>>, f64) {
    let n = neighbors.len() as f64;
    let mut centroid = Vector3::zeros();
    for &i in neighbors {
        centroid += points[i as usize].coords;
    }
    centroid /= n;

    let mut cov = Matrix3::zeros();
    for &i in neighbors {
        let d = points[i as usize].coords - centroid;
        cov += d * d.transpose();
    }
    cov /= n;

    let eigen = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let [lo, mid, hi] = order;
    let total: f64 = eigen.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return (None, 0.0);
    }
    let quality = eigen.eigenvalues[lo].max(0.0) / total;
    if eigen.eigenvalues[hi] >= LINE_DOMINANCE * total {
        return (None, quality);
    }
    // The normal direction is ill-defined when the two smallest eigenvalues
    // coincide (the eigenplane can rotate freely).
    if eigen.eigenvalues[mid] - eigen.eigenvalues[lo] <= 1.0e-9 * eigen.eigenvalues[hi] {
        return (None, quality);
    }
    let normal = eigen.eigenvectors.column(lo).into_owned();
    match Unit::try_new(normal, 1.0e-12) {
        Some(u) => (Some(u), quality),
        None => (None, quality),
    }
}

/// True when the surface at `point` (with the given normal) can be observed
/// from `viewpoint`, allowing `slack_deg` degrees past grazing incidence.
/// Points without a valid normal pass permissively.
pub fn facing_check(
    point: &Point3<f64>,
    normal: Option<&Unit<Vector3<f64>>>,
    viewpoint: &Point3<f64>,
    slack_deg: f64,
) -> bool {
    let n = match normal {
        Some(n) => n,
        None => return true,
    };
    let toward = viewpoint - point;
    let norm = toward.norm();
    if norm <= 0.0 {
        return true;
    }
    // angle(n, toward) <= 90 deg + slack  <=>  cos(angle) >= -sin(slack)
    n.dot(&toward) / norm >= -slack_deg.to_radians().sin() - 1.0e-12
}
