//! Analytical modeling of DNN accelerators: workload/accelerator descriptions,
//! a deterministic tile-based cost model, exact map-space flexibility counting,
//! and a seeded genetic-algorithm mapping search.
//!
//! The crate is `no_std` + `alloc`; all file IO and CLI plumbing live in the
//! companion `flexion-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod accel;
pub mod cost;
pub mod dse;
pub mod fixtures;
pub mod ga;
pub mod mapping;
pub mod mapspace;
pub mod oracle;
pub mod overhead;
pub mod seed;
pub mod workload;
