//! Class ontology: the raw annotation universe, merge rules, and the derived
//! 2D/3D evaluation class lists with their index assignment.
//!
//! Evaluation indices are a pure function of the alphabetical ordering of the
//! evaluation class names, so files written by one tool version stay readable
//! by another as long as the class lists match.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentinel pixel/point value for "not evaluated". Never collides with a
/// class index since class counts stay well below 255.
pub const IGNORE: u8 = 255;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("merge target `{0}` is not an evaluation class")]
    MergeTargetNotEval(String),
    #[error("merge source `{0}` is not a raw class")]
    MergeSourceNotRaw(String),
    #[error("excluded class `{0}` is not a raw class")]
    ExcludedNotRaw(String),
    #[error("3D-excluded class `{0}` is not a 2D evaluation class")]
    Excluded3dNotEval(String),
    #[error("duplicate raw class name `{0}`")]
    DuplicateRawClass(String),
    #[error("too many classes ({0}); indices must fit below the ignore sentinel")]
    TooManyClasses(usize),
}

/// The class universe: raw annotation classes, merge rules, exclusions, and
/// the alphabetical 2D/3D evaluation lists derived from them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassOntology {
    raw_classes: Vec<String>,
    merge_map: BTreeMap<String, String>,
    excluded: BTreeSet<String>,
    eval2d: Vec<String>,
    eval3d: Vec<String>,
    raw_to_eval2d: Vec<Option<u8>>,
}

impl ClassOntology {
    /// Builds an ontology from raw class names, merge rules (raw name to
    /// surviving raw name), raw classes excluded from evaluation, and the
    /// evaluation classes additionally dropped for 3D.
    ///
    /// The 2D evaluation list is the raw list minus merge sources and
    /// exclusions, sorted alphabetically; indices follow that order.
    pub fn new(
        raw_classes: Vec<String>,
        merge_map: BTreeMap<String, String>,
        excluded: BTreeSet<String>,
        excluded_3d: BTreeSet<String>,
    ) -> Result<Self, OntologyError> {
        let raw_set: BTreeSet<&str> = raw_classes.iter().map(|s| s.as_str()).collect();
        if raw_set.len() != raw_classes.len() {
            let mut seen = BTreeSet::new();
            for name in &raw_classes {
                if !seen.insert(name.clone()) {
                    return Err(OntologyError::DuplicateRawClass(name.clone()));
                }
            }
        }
        for src in merge_map.keys() {
            if !raw_set.contains(src.as_str()) {
                return Err(OntologyError::MergeSourceNotRaw(src.clone()));
            }
        }
        for name in &excluded {
            if !raw_set.contains(name.as_str()) {
                return Err(OntologyError::ExcludedNotRaw(name.clone()));
            }
        }

        let mut eval2d: Vec<String> = raw_classes
            .iter()
            .filter(|name| !merge_map.contains_key(*name) && !excluded.contains(*name))
            .cloned()
            .collect();
        eval2d.sort();
        if eval2d.len() >= IGNORE as usize {
            return Err(OntologyError::TooManyClasses(eval2d.len()));
        }
        let eval_set: BTreeSet<&str> = eval2d.iter().map(|s| s.as_str()).collect();
        for target in merge_map.values() {
            if !eval_set.contains(target.as_str()) {
                return Err(OntologyError::MergeTargetNotEval(target.clone()));
            }
        }
        for name in &excluded_3d {
            if !eval_set.contains(name.as_str()) {
                return Err(OntologyError::Excluded3dNotEval(name.clone()));
            }
        }
        let eval3d: Vec<String> = eval2d
            .iter()
            .filter(|name| !excluded_3d.contains(*name))
            .cloned()
            .collect();

        let eval2d_index = |name: &str| -> Option<u8> {
            eval2d.iter().position(|n| n == name).map(|i| i as u8)
        };
        let raw_to_eval2d = raw_classes
            .iter()
            .map(|raw| {
                if excluded.contains(raw) {
                    None
                } else if let Some(target) = merge_map.get(raw) {
                    eval2d_index(target)
                } else {
                    eval2d_index(raw)
                }
            })
            .collect();

        Ok(Self {
            raw_classes,
            merge_map,
            excluded,
            eval2d,
            eval3d,
            raw_to_eval2d,
        })
    }

    /// The 18-class natural-environment ontology used by the benchmark:
    /// `pole` merges into `other-object`, `asphalt` into `other-terrain`,
    /// `vehicle` is excluded, and the 3D list further drops `sky`, `water`,
    /// and `other-terrain`.
    pub fn benchmark() -> Self {
        let raw = [
            "asphalt",
            "bush",
            "dirt",
            "fence",
            "grass",
            "gravel",
            "log",
            "mud",
            "other-object",
            "other-terrain",
            "pole",
            "rock",
            "sky",
            "structure",
            "tree-foliage",
            "tree-trunk",
            "vehicle",
            "water",
        ];
        let merge = [("pole", "other-object"), ("asphalt", "other-terrain")];
        Self::new(
            raw.iter().map(|s| s.to_string()).collect(),
            merge
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            ["vehicle".to_string()].into_iter().collect(),
            ["sky", "water", "other-terrain"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .expect("benchmark ontology is well-formed")
    }

    pub fn raw_classes(&self) -> &[String] {
        &self.raw_classes
    }

    pub fn num_raw(&self) -> usize {
        self.raw_classes.len()
    }

    /// 2D evaluation class names, alphabetical; index = position.
    pub fn eval2d(&self) -> &[String] {
        &self.eval2d
    }

    pub fn num_eval2d(&self) -> usize {
        self.eval2d.len()
    }

    /// 3D evaluation class names (a subset of the 2D list).
    pub fn eval3d(&self) -> &[String] {
        &self.eval3d
    }

    pub fn num_eval3d(&self) -> usize {
        self.eval3d.len()
    }

    pub fn eval2d_index(&self, name: &str) -> Option<u8> {
        self.eval2d.iter().position(|n| n == name).map(|i| i as u8)
    }

    pub fn raw_index(&self, name: &str) -> Option<u32> {
        self.raw_classes
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32)
    }

    /// Maps a raw class index to its 2D evaluation index, applying merge
    /// rules. `None` for excluded classes (callers typically map those to
    /// [`IGNORE`]).
    pub fn merge_raw(&self, raw: u32) -> Option<u8> {
        self.raw_to_eval2d.get(raw as usize).copied().flatten()
    }

    /// True if `raw` is a known raw class index.
    pub fn is_valid_raw(&self, raw: u32) -> bool {
        (raw as usize) < self.raw_classes.len()
    }

    /// True if `value` is a valid 2D evaluation index or the ignore sentinel.
    pub fn is_valid_eval2d_or_ignore(&self, value: u8) -> bool {
        value == IGNORE || (value as usize) < self.eval2d.len()
    }

    /// 2D-evaluation indices of the 3D evaluation classes, in 3D list order.
    pub fn eval3d_subset(&self) -> Vec<u8> {
        self.eval3d
            .iter()
            .map(|name| self.eval2d_index(name).expect("eval3d is a subset of eval2d"))
            .collect()
    }
}

impl Default for ClassOntology {
    fn default() -> Self {
        Self::benchmark()
    }
}
