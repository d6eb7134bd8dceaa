pub mod cooccur;
pub mod domain_split;
pub mod estimate_normals;
pub mod evaluate;
pub mod extract_submaps;
pub mod gen_split;
pub mod sample_frames;
pub mod transfer_labels;
pub mod validate;
