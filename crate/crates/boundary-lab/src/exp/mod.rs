//! Experiment runners, configuration and reporting.

pub mod config;
pub mod contraction;
pub mod coverage_hist;
pub mod cpp_limit;
pub mod io;
pub mod negative_kink;
pub mod negative_linear;
pub mod report;

pub use config::*;
pub use io::*;
