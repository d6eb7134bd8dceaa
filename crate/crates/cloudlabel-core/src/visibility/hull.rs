//! 3D convex hull by quickhull, with explicit handling of degenerate inputs
//! (coincident, collinear, coplanar point sets).
//!
//! Tolerances are relative to the coordinate magnitude of the input, so hull
//! membership decisions are stable under uniform scaling.

use nalgebra::{Point3, Vector3};

/// Relative epsilon for "strictly outside a face plane" during construction.
const REL_EPS: f64 = 1.0e-12;

/// A triangular hull facet with outward unit normal; a point `x` is inside
/// the facet's half-space when `normal . x <= offset`.
#[derive(Debug, Clone)]
pub struct HullFace {
    pub vertices: [u32; 3],
    pub normal: Vector3<f64>,
    pub offset: f64,
}

/// The affine rank of a point set that cannot support a 3D hull.
#[derive(Debug, Clone, PartialEq)]
pub enum Degeneracy {
    /// All points coincide (within tolerance).
    Coincident,
    /// Points lie on a line through `points[origin]` with direction `dir`.
    Collinear { origin: u32, dir: Vector3<f64> },
    /// Points lie on a plane through `points[origin]` with normal `normal`.
    Coplanar { origin: u32, normal: Vector3<f64> },
}

#[derive(Debug, Clone)]
pub struct ConvexHull3 {
    pub faces: Vec<HullFace>,
    /// Tolerance scale the hull was built with (relative epsilon times the
    /// coordinate magnitude).
    pub eps: f64,
}

impl ConvexHull3 {
    /// Indices of input points that are hull vertices, sorted ascending.
    pub fn vertex_indices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.faces.iter().flat_map(|f| f.vertices).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Signed distance from `p` to the boundary: `>= -tol` means `p` is
    /// outside the hull or within `tol` of its boundary. Early-exits on the
    /// first face that proves it.
    pub fn on_or_outside(&self, p: &Point3<f64>, tol: f64) -> bool {
        self.faces
            .iter()
            .any(|f| f.normal.dot(&p.coords) - f.offset >= -tol)
    }
}

struct Face {
    vertices: [u32; 3],
    normal: Vector3<f64>,
    offset: f64,
    outside: Vec<u32>,
    alive: bool,
}

pub fn quickhull3(points: &[Point3<f64>]) -> Result<ConvexHull3, Degeneracy> {
    let scale = points
        .iter()
        .map(|p| p.coords.amax())
        .fold(0.0f64, f64::max);
    let eps = REL_EPS * scale.max(f64::MIN_POSITIVE);

    let (a, b, c, d) = initial_simplex(points, eps)?;

    let interior = Point3::from(
        (points[a as usize].coords
            + points[b as usize].coords
            + points[c as usize].coords
            + points[d as usize].coords)
            / 4.0,
    );

    let mut faces: Vec<Face> = Vec::new();
    for [p, q, r] in [[a, b, c], [a, c, d], [a, d, b], [b, d, c]] {
        faces.push(make_face(points, p, q, r, &interior));
    }

    // Conflict assignment: each point goes to the face it is farthest outside.
    let simplex = [a, b, c, d];
    for (i, p) in points.iter().enumerate() {
        let i = i as u32;
        if simplex.contains(&i) {
            continue;
        }
        assign_point(&mut faces, 0, p, i, eps);
    }

    let mut worklist: Vec<usize> = (0..faces.len())
        .filter(|&f| !faces[f].outside.is_empty())
        .collect();

    while let Some(fi) = worklist.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        // Farthest conflict point becomes the next hull vertex.
        let apex = {
            let face = &faces[fi];
            *face
                .outside
                .iter()
                .max_by(|&&x, &&y| {
                    let dx = face.normal.dot(&points[x as usize].coords) - face.offset;
                    let dy = face.normal.dot(&points[y as usize].coords) - face.offset;
                    dx.total_cmp(&dy).then(y.cmp(&x))
                })
                .expect("non-empty outside set")
        };
        let apex_point = &points[apex as usize];

        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.normal.dot(&apex_point.coords) - f.offset > eps)
            .map(|(i, _)| i)
            .collect();

        // Horizon: directed edges of visible faces whose reverse edge is not
        // itself part of a visible face.
        let mut edges: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
        for &vi in &visible {
            let [p, q, r] = faces[vi].vertices;
            for e in [(p, q), (q, r), (r, p)] {
                edges.insert(e);
            }
        }
        let horizon: Vec<(u32, u32)> = edges
            .iter()
            .filter(|(u, v)| !edges.contains(&(*v, *u)))
            .copied()
            .collect();

        let mut orphans: Vec<u32> = Vec::new();
        for &vi in &visible {
            faces[vi].alive = false;
            orphans.append(&mut faces[vi].outside);
        }

        let first_new = faces.len();
        for (u, v) in horizon {
            faces.push(make_face(points, u, v, apex, &interior));
        }
        let new_range = first_new..faces.len();

        for orphan in orphans {
            if orphan == apex {
                continue;
            }
            assign_point(&mut faces, new_range.start, &points[orphan as usize], orphan, eps);
        }
        for nf in new_range {
            if !faces[nf].outside.is_empty() {
                worklist.push(nf);
            }
        }
    }

    let out: Vec<HullFace> = faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| HullFace {
            vertices: f.vertices,
            normal: f.normal,
            offset: f.offset,
        })
        .collect();
    Ok(ConvexHull3 { faces: out, eps })
}

/// Picks four affinely independent input points, or reports the degeneracy.
fn initial_simplex(points: &[Point3<f64>], eps: f64) -> Result<(u32, u32, u32, u32), Degeneracy> {
    if points.is_empty() {
        return Err(Degeneracy::Coincident);
    }
    let mut extremes: Vec<u32> = Vec::with_capacity(6);
    for axis in 0..3 {
        let min = (0..points.len())
            .min_by(|&x, &y| points[x][axis].total_cmp(&points[y][axis]))
            .unwrap();
        let max = (0..points.len())
            .max_by(|&x, &y| points[x][axis].total_cmp(&points[y][axis]))
            .unwrap();
        extremes.push(min as u32);
        extremes.push(max as u32);
    }

    let mut best = (0.0f64, extremes[0], extremes[0]);
    for (i, &x) in extremes.iter().enumerate() {
        for &y in &extremes[i + 1..] {
            let d2 = (points[x as usize] - points[y as usize]).norm_squared();
            if d2 > best.0 {
                best = (d2, x, y);
            }
        }
    }
    let (d2, a, b) = best;
    if d2.sqrt() <= eps {
        return Err(Degeneracy::Coincident);
    }
    let dir = (points[b as usize] - points[a as usize]).normalize();

    let mut best_line = (0.0f64, a);
    for i in 0..points.len() {
        let rel = points[i] - points[a as usize];
        let d = rel.cross(&dir).norm();
        if d > best_line.0 {
            best_line = (d, i as u32);
        }
    }
    let (dline, c) = best_line;
    if dline <= eps {
        return Err(Degeneracy::Collinear { origin: a, dir });
    }

    let normal = (points[b as usize] - points[a as usize])
        .cross(&(points[c as usize] - points[a as usize]))
        .normalize();
    let mut best_plane = (0.0f64, a);
    for i in 0..points.len() {
        let d = (points[i] - points[a as usize]).dot(&normal).abs();
        if d > best_plane.0 {
            best_plane = (d, i as u32);
        }
    }
    let (dplane, d_idx) = best_plane;
    if dplane <= eps {
        return Err(Degeneracy::Coplanar { origin: a, normal });
    }
    Ok((a, b, c, d_idx))
}

/// Builds a face through three points, oriented so `interior` is inside.
fn make_face(points: &[Point3<f64>], p: u32, q: u32, r: u32, interior: &Point3<f64>) -> Face {
    let (pp, pq, pr) = (
        &points[p as usize],
        &points[q as usize],
        &points[r as usize],
    );
    let mut normal = (pq - pp).cross(&(pr - pp));
    let norm = normal.norm();
    if norm > 0.0 {
        normal /= norm;
    }
    let mut offset = normal.dot(&pp.coords);
    let mut vertices = [p, q, r];
    if normal.dot(&interior.coords) - offset > 0.0 {
        normal = -normal;
        offset = -offset;
        vertices = [p, r, q];
    }
    Face {
        vertices,
        normal,
        offset,
        outside: Vec::new(),
        alive: true,
    }
}

/// Assigns `point` to the conflict list of the alive face (at or after
/// `from`) it is farthest outside of, if it is outside any by more than eps.
fn assign_point(faces: &mut [Face], from: usize, point: &Point3<f64>, index: u32, eps: f64) {
    let mut best: Option<(f64, usize)> = None;
    for (fi, face) in faces.iter().enumerate().skip(from) {
        if !face.alive {
            continue;
        }
        let sd = face.normal.dot(&point.coords) - face.offset;
        if sd > eps && best.is_none_or(|(b, _)| sd > b) {
            best = Some((sd, fi));
        }
    }
    if let Some((_, fi)) = best {
        faces[fi].outside.push(index);
    }
}
