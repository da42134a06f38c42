//! File formats, experiment driving, and report writers for the `flexion`
//! binary.
//!
//! The core crate computes; this crate owns everything that touches the
//! host system: JSON loading and validation, atomic output writing, a
//! worker pool that fans experiment cells across threads, and the CSV/JSON
//! result views. The binary in `main.rs` is a thin argument-parsing shell
//! over [`commands`].

pub mod commands;
pub mod driver;
pub mod error;
pub mod load;
pub mod output;
pub mod records;
pub mod tables;
