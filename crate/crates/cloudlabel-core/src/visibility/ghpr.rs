//! Generalized hidden point removal: visibility of a point cloud from a
//! viewpoint, decided by spherically reflecting the cloud about the viewpoint
//! and taking the convex hull of the reflection.
//!
//! The reflection kernel is the exponential inversion `f(d) = d^gamma` with
//! `gamma < 0`: reflected distance is strictly decreasing in original
//! distance, so the order of points along each ray is reversed, and because
//! the kernel is multiplicative the visible set is invariant under uniform
//! scaling of the cloud about the viewpoint.

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::hull::{quickhull3, Degeneracy};

/// Relative tolerance for the "on a hull face" inclusive visibility rule.
const BOUNDARY_REL_EPS: f64 = 1.0e-9;

/// Points closer to the viewpoint than this are dropped (they violate the
/// operator's precondition that no point coincides with the viewpoint).
const MIN_VIEW_DIST: f64 = 1.0e-9;

/// Configuration of the hidden point removal operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhprConfig {
    /// Exponent of the inversion kernel `f(d) = d^gamma`; must be negative.
    pub gamma: f64,
    /// Points farther than this from the viewpoint do not participate.
    pub max_range: f64,
    /// Points closer than this to the viewpoint do not participate.
    pub min_range: f64,
}

impl Default for GhprConfig {
    fn default() -> Self {
        Self {
            gamma: -0.01,
            max_range: 45.0,
            min_range: 2.0,
        }
    }
}

impl GhprConfig {
    /// A configuration without range limits, for callers that pre-filter.
    pub fn unbounded(gamma: f64) -> Self {
        Self {
            gamma,
            max_range: f64::INFINITY,
            min_range: 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.gamma < 0.0 && self.min_range >= 0.0 && self.min_range < self.max_range
    }
}

/// Result of a visibility query.
#[derive(Debug, Clone)]
pub struct GhprOutput {
    /// Indices of visible points (into the input slice), sorted ascending.
    pub visible: Vec<u32>,
    /// Number of points that passed the range filter.
    pub in_range: usize,
    /// True when the reflected cloud had no 3D hull and visibility was
    /// decided in the degenerate (line or plane) subspace instead.
    pub hull_degenerate: bool,
}

/// Computes the set of points visible from `viewpoint`.
///
/// Points outside `[min_range, max_range]` are excluded before reflection.
/// A point counts as visible when its reflection lies on the convex hull of
/// the reflected in-range cloud plus the viewpoint itself; reflections within
/// a relative tolerance of a hull face also count (inclusive rule), so
/// exactly-coplanar surface patches are not split by arbitrary triangulation
/// choices.
pub fn ghpr_visible(
    points: &[Point3<f64>],
    viewpoint: &Point3<f64>,
    cfg: &GhprConfig,
) -> GhprOutput {
    debug_assert!(cfg.is_valid(), "invalid GHPR config: {cfg:?}");

    // Work in viewpoint-centered coordinates.
    let mut indices: Vec<u32> = Vec::new();
    let mut reflected: Vec<Point3<f64>> = Vec::new();
    let mut max_radius = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        let rel = p - viewpoint;
        let d = rel.norm();
        if d < MIN_VIEW_DIST.max(cfg.min_range) || d > cfg.max_range {
            continue;
        }
        let r = d.powf(cfg.gamma);
        let q = rel * (r / d);
        max_radius = max_radius.max(r);
        indices.push(i as u32);
        reflected.push(Point3::from(q));
    }
    let in_range = indices.len();
    if in_range == 0 {
        return GhprOutput {
            visible: Vec::new(),
            in_range,
            hull_degenerate: false,
        };
    }

    // The viewpoint itself participates in the hull.
    reflected.push(Point3::origin());
    let tol = BOUNDARY_REL_EPS * max_radius;

    let (mut visible, hull_degenerate) = match quickhull3(&reflected) {
        Ok(hull) => {
            let vis = indices
                .iter()
                .zip(&reflected)
                .filter(|(_, q)| hull.on_or_outside(q, tol))
                .map(|(&i, _)| i)
                .collect();
            (vis, false)
        }
        Err(Degeneracy::Coincident) => {
            // Everything reflects onto (essentially) one location: all of it
            // is boundary.
            (indices.clone(), true)
        }
        Err(Degeneracy::Collinear { dir, .. }) => {
            (collinear_visible(&indices, &reflected, &dir, tol), true)
        }
        Err(Degeneracy::Coplanar { origin, normal }) => (
            coplanar_visible(&indices, &reflected, origin, &normal, tol),
            true,
        ),
    };
    visible.sort_unstable();
    GhprOutput {
        visible,
        in_range,
        hull_degenerate,
    }
}

/// 1D hull: on a line the boundary is the two extreme points. The viewpoint
/// (origin) is one of the candidates, so points strictly between the extremes
/// are hidden.
fn collinear_visible(
    indices: &[u32],
    reflected: &[Point3<f64>],
    dir: &Vector3<f64>,
    tol: f64,
) -> Vec<u32> {
    let coords: Vec<f64> = reflected.iter().map(|q| q.coords.dot(dir)).collect();
    let min = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let max = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    indices
        .iter()
        .zip(&coords)
        .filter(|(_, &s)| s >= max - tol || s <= min + tol)
        .map(|(&i, _)| i)
        .collect()
}

/// 2D hull in the spanned plane: monotone chain, then the inclusive
/// on-boundary test against the polygon's edge half-planes.
fn coplanar_visible(
    indices: &[u32],
    reflected: &[Point3<f64>],
    origin: u32,
    normal: &Vector3<f64>,
    tol: f64,
) -> Vec<u32> {
    let e1 = pick_perpendicular(normal);
    let e2 = normal.cross(&e1);
    let base = reflected[origin as usize].coords;
    let plane: Vec<[f64; 2]> = reflected
        .iter()
        .map(|q| {
            let rel = q.coords - base;
            [rel.dot(&e1), rel.dot(&e2)]
        })
        .collect();

    let hull = monotone_chain(&plane);
    if hull.len() < 3 {
        // Nearly collinear in-plane; fall back to the 1D rule along the
        // dominant direction.
        let dir2 = if hull.len() == 2 {
            let d = [hull[1][0] - hull[0][0], hull[1][1] - hull[0][1]];
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            Vector3::new(d[0] / n, d[1] / n, 0.0)
        } else {
            Vector3::new(1.0, 0.0, 0.0)
        };
        let dir3 = e1 * dir2.x + e2 * dir2.y;
        return collinear_visible(indices, reflected, &dir3, tol);
    }

    // Edge half-planes of the CCW polygon; outward normal is right of the
    // directed edge.
    let edges: Vec<([f64; 2], f64)> = (0..hull.len())
        .map(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            let d = [b[0] - a[0], b[1] - a[1]];
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let n = [d[1] / len, -d[0] / len];
            (n, n[0] * a[0] + n[1] * a[1])
        })
        .collect();

    indices
        .iter()
        .zip(&plane)
        .filter(|(_, q)| {
            edges
                .iter()
                .any(|(n, off)| n[0] * q[0] + n[1] * q[1] - off >= -tol)
        })
        .map(|(&i, _)| i)
        .collect()
}

fn pick_perpendicular(n: &Vector3<f64>) -> Vector3<f64> {
    let candidate = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    n.cross(&candidate).normalize()
}

/// Andrew's monotone chain; returns the CCW hull polygon coordinates.
fn monotone_chain(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
