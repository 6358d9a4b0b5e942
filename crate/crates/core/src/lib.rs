//! Combinatorics of plane quintic degenerations and their étale double covers.
//!
//! The crate works entirely with dual graphs:
//!
//! * [`graph`]: half-edge dual graphs with genus labels, Betti numbers and
//!   JSON/DOT I/O; [`canon`] computes isomorphism-invariant keys.
//! * [`singularity`]: AD singularity types.
//! * [`realize`]: tail substitution for white vertices and stabilization.
//! * [`cover`]: double covers, their enumeration and Prym profiles.
//! * [`fs`]: Friedman–Smith closure detection.
//! * [`quintic`]: enumeration of candidate quintic configurations.
//! * [`verify`]: the verification pipelines and their reports.

#![allow(clippy::needless_range_loop)]

pub mod canon;
pub mod cover;
pub mod error;
pub mod fixtures;
pub mod fs;
pub mod graph;
pub mod quintic;
pub mod realize;
pub mod singularity;
pub mod strata;
pub mod verify;

pub use canon::CanonicalKey;
pub use cover::{CoverSpec, DoubleCover, PrymProfile};
pub use error::{Error, Result};
pub use fs::FsDecomposition;
pub use graph::{Color, DualGraph, Vertex};
pub use quintic::{Placement, QuinticConfig};
pub use realize::{TailLibrary, TailTemplate};
pub use singularity::{Family, SingularityType};
