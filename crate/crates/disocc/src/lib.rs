//! Standard-library companion to `disocc-core`: JSON spec files, CSV
//! reports, parallel drivers, verification corpora, the worked-example
//! gallery and the `disocc` command line.

pub mod cli;
pub mod gallery;
pub mod graph_spec;
pub mod parallel;
pub mod report;
pub mod spec_file;
pub mod verify;

pub use disocc_core as core;
