//! Reading, writing and rendering: instance documents, MPS export, rosters.
//!
//! Three concerns live here, all pure text transformations:
//!
//! * [`read_instance`] / [`write_instance`] — a versioned, canonical
//!   instance document (JSON syntax, 1-based indices in files).
//! * [`export_mps`] — fixed-format MPS for cross-checking the built-in
//!   solver against external ones.
//! * [`render_roster`] / [`parse_roster_csv`] — human-readable grids and
//!   machine-readable CSV for finished rosters.
//!
//! Everything is deterministic: the same value always produces the same
//! bytes, which keeps documents diffable and exports cacheable.

mod document;
mod mps;
mod render;

pub use document::{read_instance, write_instance, FORMAT_TAG, FORMAT_VERSION};
pub use mps::export_mps;
pub use render::{parse_roster_csv, render_roster, RosterFormat};

use crate::model::InstanceError;

/// Failure while reading an instance or roster document.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    /// The text is not a well-formed document (position reported).
    #[error("parse error: {0}")]
    Parse(String),
    /// The document is well-formed but not one this library understands
    /// (wrong format tag, unsupported version, bad index, …).
    #[error("document error: {0}")]
    Document(String),
    /// The document describes a structurally invalid instance.
    #[error("invalid instance: {}", join_errors(.0))]
    Semantic(Vec<InstanceError>),
    /// A roster CSV that does not fit the instance.
    #[error("roster error: {0}")]
    Roster(String),
}

fn join_errors(errs: &[InstanceError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}
