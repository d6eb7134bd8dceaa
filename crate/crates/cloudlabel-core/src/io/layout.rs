//! Sequence directory layout and consistency validation.
//!
//! A sequence root holds `poses.csv`, `camera_calibration.yaml`, and the
//! per-stem data directories. 2D and 3D files that belong together share a
//! timestamp-derived filename stem.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use super::{
    read_calibration, read_cloud_bin, read_histogram_csv, read_index_label_png, read_label_file,
    read_poses_csv, read_times, BinLayout,
};
use crate::ontology::ClassOntology;
use crate::pose::{LookupMode, Trajectory};

pub const DIR_IMAGE: &str = "image";
pub const DIR_INDEX_LABEL: &str = "indexLabel";
pub const DIR_PALETTE_LABEL: &str = "label";
pub const DIR_CLOUDS: &str = "Clouds";
pub const DIR_LABELS: &str = "Labels";
pub const DIR_HISTS: &str = "Hists";
pub const DIR_TIMES: &str = "Times";
pub const FILE_POSES: &str = "poses.csv";
pub const FILE_CALIBRATION: &str = "camera_calibration.yaml";

/// Paths of a sequence directory.
#[derive(Debug, Clone)]
pub struct SequenceLayout {
    pub root: PathBuf,
}

impl SequenceLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn poses_path(&self) -> PathBuf {
        self.root.join(FILE_POSES)
    }

    pub fn calibration_path(&self) -> PathBuf {
        self.root.join(FILE_CALIBRATION)
    }

    pub fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn cloud_path(&self, stem: &str) -> PathBuf {
        self.dir(DIR_CLOUDS).join(format!("{stem}.bin"))
    }

    pub fn label_path(&self, stem: &str) -> PathBuf {
        self.dir(DIR_LABELS).join(format!("{stem}.label"))
    }

    pub fn hist_path(&self, stem: &str) -> PathBuf {
        self.dir(DIR_HISTS).join(format!("{stem}.csv"))
    }

    pub fn times_path(&self, stem: &str) -> PathBuf {
        self.dir(DIR_TIMES).join(format!("{stem}.times"))
    }

    pub fn index_label_path(&self, stem: &str) -> PathBuf {
        self.dir(DIR_INDEX_LABEL).join(format!("{stem}.png"))
    }

    /// Filename stems (without extension) in a subdirectory, sorted.
    pub fn stems(&self, dir: &str) -> std::io::Result<Vec<String>> {
        let path = self.dir(dir);
        if !path.is_dir() {
            return Ok(Vec::new());
        }
        let mut stems: Vec<String> = std::fs::read_dir(&path)?
            .filter_map(|entry| entry.ok())
            .filter(|e| e.path().is_file())
            .filter_map(|e| {
                e.path()
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
            })
            .collect();
        stems.sort();
        Ok(stems)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingEntry { path: PathBuf },
    OrphanStem { dir: String, stem: String, missing_in: String },
    PointCountMismatch { stem: String, cloud_points: usize, other: String, other_count: usize },
    NoPoseForStem { stem: String },
    BadStem { dir: String, stem: String },
    UnreadableFile { path: PathBuf, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingEntry { path } => write!(f, "missing entry: {}", path.display()),
            Violation::OrphanStem { dir, stem, missing_in } => {
                write!(f, "{dir}/{stem} has no counterpart in {missing_in}/")
            }
            Violation::PointCountMismatch { stem, cloud_points, other, other_count } => write!(
                f,
                "point count mismatch for `{stem}`: cloud has {cloud_points} points, {other} has {other_count}"
            ),
            Violation::NoPoseForStem { stem } => write!(f, "no pose for timestamp `{stem}`"),
            Violation::BadStem { dir, stem } => {
                write!(f, "{dir}/{stem}: stem is not a timestamp")
            }
            Violation::UnreadableFile { path, message } => {
                write!(f, "unreadable file {}: {message}", path.display())
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SequenceReport {
    pub violations: Vec<Violation>,
    pub stems_checked: usize,
}

impl SequenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a sequence directory for internal consistency: stem correspondence
/// across the data directories, point-count agreement between paired files,
/// pose coverage of every stem, and calibration readability.
pub fn validate_sequence(root: impl AsRef<Path>, ontology: &ClassOntology) -> SequenceReport {
    let layout = SequenceLayout::new(root.as_ref());
    let mut report = SequenceReport::default();
    let violations = &mut report.violations;

    let trajectory: Option<Trajectory> = if layout.poses_path().is_file() {
        match read_poses_csv(layout.poses_path()) {
            Ok(t) => Some(t),
            Err(e) => {
                violations.push(Violation::UnreadableFile {
                    path: layout.poses_path(),
                    message: e.to_string(),
                });
                None
            }
        }
    } else {
        violations.push(Violation::MissingEntry {
            path: layout.poses_path(),
        });
        None
    };

    if layout.calibration_path().is_file() {
        if let Err(e) = read_calibration(layout.calibration_path()) {
            violations.push(Violation::UnreadableFile {
                path: layout.calibration_path(),
                message: e.to_string(),
            });
        }
    } else {
        violations.push(Violation::MissingEntry {
            path: layout.calibration_path(),
        });
    }

    let stems_of = |dir: &str, violations: &mut Vec<Violation>| -> BTreeSet<String> {
        match layout.stems(dir) {
            Ok(stems) => stems.into_iter().collect(),
            Err(e) => {
                violations.push(Violation::UnreadableFile {
                    path: layout.dir(dir),
                    message: e.to_string(),
                });
                BTreeSet::new()
            }
        }
    };
    let image_stems = stems_of(DIR_IMAGE, violations);
    let index_stems = stems_of(DIR_INDEX_LABEL, violations);
    let cloud_stems = stems_of(DIR_CLOUDS, violations);
    let label_stems = stems_of(DIR_LABELS, violations);
    let hist_stems = stems_of(DIR_HISTS, violations);
    let times_stems = stems_of(DIR_TIMES, violations);

    // Stem correspondence. image/ and indexLabel/ must mirror each other when
    // both exist; Labels, Hists, and Times must reference existing clouds.
    if !image_stems.is_empty() && !index_stems.is_empty() {
        for stem in image_stems.difference(&index_stems) {
            violations.push(Violation::OrphanStem {
                dir: DIR_IMAGE.into(),
                stem: stem.clone(),
                missing_in: DIR_INDEX_LABEL.into(),
            });
        }
        for stem in index_stems.difference(&image_stems) {
            violations.push(Violation::OrphanStem {
                dir: DIR_INDEX_LABEL.into(),
                stem: stem.clone(),
                missing_in: DIR_IMAGE.into(),
            });
        }
    }
    for (dir, stems) in [
        (DIR_LABELS, &label_stems),
        (DIR_HISTS, &hist_stems),
        (DIR_TIMES, &times_stems),
    ] {
        for stem in stems.difference(&cloud_stems) {
            violations.push(Violation::OrphanStem {
                dir: dir.into(),
                stem: stem.clone(),
                missing_in: DIR_CLOUDS.into(),
            });
        }
    }

    // Per-stem content checks.
    for stem in &cloud_stems {
        let cloud = match read_cloud_bin(layout.cloud_path(stem), BinLayout::XyzIntensity) {
            Ok(c) => c,
            Err(e) => {
                violations.push(Violation::UnreadableFile {
                    path: layout.cloud_path(stem),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if label_stems.contains(stem) {
            match read_label_file(layout.label_path(stem)) {
                Ok(labels) => {
                    if labels.len() != cloud.points.len() {
                        violations.push(Violation::PointCountMismatch {
                            stem: stem.clone(),
                            cloud_points: cloud.points.len(),
                            other: format!("{DIR_LABELS}/{stem}.label"),
                            other_count: labels.len(),
                        });
                    }
                }
                Err(e) => violations.push(Violation::UnreadableFile {
                    path: layout.label_path(stem),
                    message: e.to_string(),
                }),
            }
        }
        if hist_stems.contains(stem) {
            match read_histogram_csv(layout.hist_path(stem)) {
                Ok(h) => {
                    if h.num_points() != cloud.points.len() {
                        violations.push(Violation::PointCountMismatch {
                            stem: stem.clone(),
                            cloud_points: cloud.points.len(),
                            other: format!("{DIR_HISTS}/{stem}.csv"),
                            other_count: h.num_points(),
                        });
                    }
                }
                Err(e) => violations.push(Violation::UnreadableFile {
                    path: layout.hist_path(stem),
                    message: e.to_string(),
                }),
            }
        }
        if times_stems.contains(stem) {
            match read_times(layout.times_path(stem)) {
                Ok(times) => {
                    if times.len() != cloud.points.len() {
                        violations.push(Violation::PointCountMismatch {
                            stem: stem.clone(),
                            cloud_points: cloud.points.len(),
                            other: format!("{DIR_TIMES}/{stem}.times"),
                            other_count: times.len(),
                        });
                    }
                }
                Err(e) => violations.push(Violation::UnreadableFile {
                    path: layout.times_path(stem),
                    message: e.to_string(),
                }),
            }
        }
    }

    for stem in &index_stems {
        if let Err(e) = read_index_label_png(layout.index_label_path(stem), ontology) {
            violations.push(Violation::UnreadableFile {
                path: layout.index_label_path(stem),
                message: e.to_string(),
            });
        }
    }

    // Pose coverage for every timestamped stem.
    if let Some(traj) = &trajectory {
        let all_timed: Vec<(&str, &BTreeSet<String>)> = vec![
            (DIR_INDEX_LABEL, &index_stems),
            (DIR_CLOUDS, &cloud_stems),
        ];
        for (dir, stems) in all_timed {
            for stem in stems.iter() {
                match stem.parse::<f64>() {
                    Ok(t) => {
                        if traj.pose_at(t, LookupMode::exact()).is_err() {
                            violations.push(Violation::NoPoseForStem { stem: stem.clone() });
                        }
                    }
                    Err(_) => violations.push(Violation::BadStem {
                        dir: dir.into(),
                        stem: stem.clone(),
                    }),
                }
            }
        }
    }

    report.stems_checked = cloud_stems.len() + index_stems.len();
    report
}

/// Formats a timestamp as a filename stem with microsecond precision.
pub fn stem_for_timestamp(t: f64) -> String {
    format!("{t:.6}")
}
