//! Library surface of the `normtr` command-line tool: experiment-file
//! parsing and resolution, result persistence, and SVG plotting. The binary
//! in `main.rs` is a thin dispatcher over these modules, and integration
//! tests use them to read outputs back.

pub mod config;
pub mod output;
pub mod svg;
