//! File formats and command-line plumbing around [`geodenum_core`].
//!
//! - [`obj`]: ASCII OBJ mesh input and re-emission.
//! - [`point_spec`]: `vertex:ID`, `edge:ID:U` and `face:ID:B0,B1,B2` strings.
//! - [`tree_file`]: versioned JSON tree files that embed their mesh.
//! - [`output`]: JSON, CSV and OBJ-polyline result documents.
//! - [`bench`]: radius sweeps and growth-curve CSV.

pub mod bench;
pub mod obj;
pub mod output;
pub mod point_spec;
pub mod tree_file;

pub use geodenum_core as core;
