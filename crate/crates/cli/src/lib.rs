//! Standard-library companion to `bimod-core`: JSON and CSV file formats, a
//! worker-pool version of the pattern scan, and the `bimod` command line.

pub mod cli;
pub mod formats;
pub mod scan;
