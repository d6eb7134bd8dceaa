//! Visibility determination for posed viewpoints: surface normal estimation
//! with observer-based sign resolution, a facing check, and the generalized
//! hidden point removal operator built on a 3D convex hull of the reflected
//! cloud.
//!
//! Everything here is pure; visibility for different viewpoints can run fully
//! in parallel over a shared read-only cloud.

pub mod ghpr;
pub mod hull;
pub mod normals;

pub use ghpr::{ghpr_visible, GhprConfig, GhprOutput};
pub use hull::{quickhull3, ConvexHull3, Degeneracy, HullFace};
pub use normals::{estimate_normals, facing_check, NormalError, NormalField};
