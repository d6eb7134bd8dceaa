//! A 3D k-d tree for k-nearest-neighbor and radius queries.
//!
//! Ties at equal distance are broken by ascending point index, so query
//! results do not depend on build order or floating-point traversal order.

use nalgebra::Point3;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Static k-d tree over a point set. The tree stores its own copy of the
/// coordinates; queries return indices into the original slice.
#[derive(Debug, Clone)]
pub struct KdTree {
    nodes: Vec<Node>,
    root: Option<usize>,
}

#[derive(Debug, Clone)]
struct Node {
    point: [f64; 3],
    index: u32,
    axis: u8,
    left: Option<usize>,
    right: Option<usize>,
}

/// Max-heap entry ordered by (distance, index); the heap keeps the current
/// worst candidate on top.
#[derive(PartialEq)]
struct Candidate {
    dist2: f64,
    index: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    pub fn build(points: &[Point3<f64>]) -> Self {
        let mut entries: Vec<([f64; 3], u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| ([p.x, p.y, p.z], i as u32))
            .collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = Self::build_recursive(&mut entries, 0, &mut nodes);
        Self { nodes, root }
    }

    fn build_recursive(
        entries: &mut [([f64; 3], u32)],
        depth: usize,
        nodes: &mut Vec<Node>,
    ) -> Option<usize> {
        if entries.is_empty() {
            return None;
        }
        let axis = (depth % 3) as u8;
        let mid = entries.len() / 2;
        entries.select_nth_unstable_by(mid, |a, b| {
            a.0[axis as usize]
                .total_cmp(&b.0[axis as usize])
                .then(a.1.cmp(&b.1))
        });
        let (point, index) = entries[mid];
        let (left_slice, rest) = entries.split_at_mut(mid);
        let right_slice = &mut rest[1..];
        let left = Self::build_recursive(left_slice, depth + 1, nodes);
        let right = Self::build_recursive(right_slice, depth + 1, nodes);
        nodes.push(Node {
            point,
            index,
            axis,
            left,
            right,
        });
        Some(nodes.len() - 1)
    }

    /// Indices of the `k` nearest points to `query` (including a point equal
    /// to the query itself, if present), sorted by (distance, index).
    pub fn k_nearest(&self, query: &Point3<f64>, k: usize) -> Vec<u32> {
        if k == 0 {
            return Vec::new();
        }
        let q = [query.x, query.y, query.z];
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        if let Some(root) = self.root {
            self.knn_recursive(root, &q, k, &mut heap);
        }
        let mut found: Vec<Candidate> = heap.into_vec();
        found.sort_unstable();
        found.into_iter().map(|c| c.index).collect()
    }

    fn knn_recursive(&self, node_id: usize, q: &[f64; 3], k: usize, heap: &mut BinaryHeap<Candidate>) {
        let node = &self.nodes[node_id];
        let d2 = dist2(&node.point, q);
        let cand = Candidate {
            dist2: d2,
            index: node.index,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(worst) = heap.peek() {
            if cand.cmp(worst) == Ordering::Less {
                heap.pop();
                heap.push(cand);
            }
        }

        let axis = node.axis as usize;
        let delta = q[axis] - node.point[axis];
        let (near, far) = if delta <= 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if let Some(n) = near {
            self.knn_recursive(n, q, k, heap);
        }
        let prune = heap.len() == k
            && heap
                .peek()
                .is_some_and(|worst| delta * delta > worst.dist2);
        if !prune {
            if let Some(f) = far {
                self.knn_recursive(f, q, k, heap);
            }
        }
    }

    /// Indices of all points within `radius` (inclusive) of `query`, sorted
    /// ascending.
    pub fn within_radius(&self, query: &Point3<f64>, radius: f64) -> Vec<u32> {
        let q = [query.x, query.y, query.z];
        let r2 = radius * radius;
        let mut out = Vec::new();
        if let Some(root) = self.root {
            self.radius_recursive(root, &q, radius, r2, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn radius_recursive(&self, node_id: usize, q: &[f64; 3], r: f64, r2: f64, out: &mut Vec<u32>) {
        let node = &self.nodes[node_id];
        if dist2(&node.point, q) <= r2 {
            out.push(node.index);
        }
        let axis = node.axis as usize;
        let delta = q[axis] - node.point[axis];
        if delta <= r {
            if let Some(n) = node.left {
                self.radius_recursive(n, q, r, r2, out);
            }
        }
        if delta >= -r {
            if let Some(n) = node.right {
                self.radius_recursive(n, q, r, r2, out);
            }
        }
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}
