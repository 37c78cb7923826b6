//! Monte Carlo experiments, file formats and run manifests on top of
//! `tailseq-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod manifest;

pub use config::SimConfig;
pub use error::{Error, Result};
pub use tailseq_core as core;
