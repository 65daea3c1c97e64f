//! Library surface of the `shadowlab` binary: experiment configs, built-in
//! actions, report plumbing, and the E1..E7 drivers. Kept as a lib so the
//! acceptance suite can call the drivers directly.

pub mod actionfile;
pub mod config;
pub mod experiments;
pub mod report;
