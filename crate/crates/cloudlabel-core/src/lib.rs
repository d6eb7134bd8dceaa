//! Transfers human-annotated 2D semantic labels from posed camera images onto
//! globally aligned 3D LiDAR point clouds, and provides the dataset-engineering
//! machinery around that pipeline: trajectory-centric frame sampling, submap
//! extraction, metric-optimized train/val/test split generation with spatial
//! buffers, mIoU evaluation, and label co-occurrence analysis.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`ontology`]: the class universe, merge rules, and index assignment
//! - [`pose`] / [`camera`] / [`cloud`]: shared geometric and raster types
//! - [`io`]: bit-exact readers/writers for the on-disk formats
//! - [`visibility`]: surface normals and hidden-point-removal visibility
//! - [`transfer`]: frame sampling, submap extraction, and label transfer
//! - [`split`]: buffered, metric-optimized dataset splits
//! - [`eval`]: confusion matrices, IoU, and co-occurrence matrices
//!
//! All types are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod camera;
pub mod cloud;
pub mod eval;
pub mod io;
pub mod ontology;
pub mod pose;
pub mod spatial;
pub mod split;
pub mod transfer;
pub mod visibility;

pub use camera::{CameraModel, Projection};
pub use cloud::{LabelHistograms, LabelRaster, LabeledCloud};
pub use ontology::{ClassOntology, IGNORE};
pub use pose::{LookupMode, Pose, Trajectory};
