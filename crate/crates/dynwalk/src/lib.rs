//! Experiment drivers for `dynwalk-core`: parallel Monte Carlo runners with a
//! worker-independent seed schedule, versioned JSON/CSV reports, event-log
//! files and the `dynwalk` command-line front end.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod experiments;
pub mod io;
pub mod parallel;
pub mod report;

mod error;

pub use error::{Error, Result};
