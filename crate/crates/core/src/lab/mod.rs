//! Configuration, orchestration and persistence of laboratory runs.

pub mod archive;
pub mod commands;
pub mod config;

pub use archive::{game_report_text, RunArchive};
pub use commands::{run, Command};
pub use config::{LabConfig, NucleusKind};
