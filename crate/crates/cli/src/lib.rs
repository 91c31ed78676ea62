//! Config-driven runner for lattice-to-manifold embeddings.
//!
//! A run reads one TOML config, optimizes the embedding and writes three
//! files: a points CSV, an edges CSV of adjacent lattice pairs and a TOML
//! report with the objective trace.

pub mod config;
pub mod demo;
pub mod run;

pub use config::{validate, validate_str, Diagnostic, RunConfig};
pub use run::{read_points, run, PointRow, RunError, RunOptions, RunSummary};
