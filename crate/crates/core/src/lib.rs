//! Kernels for dynamical Gaussian random walks.
//!
//! Each of `n` standard normal increments carries its own rate-one Poisson
//! clock and is replaced by a fresh deviate whenever that clock rings. The
//! partial sum `S_n(t)` is then a stationary process in `t`, and after the
//! `sqrt(n)` rescaling it approaches the Ornstein-Uhlenbeck process in Wiener
//! space. This crate carries everything that does not need an operating
//! system:
//!
//! * [`analytic`]: Gaussian tail function, closed-form tail and concentration
//!   bounds, the Erdős sequence and the integral-test classifiers.
//! * [`clocks`]: superposed Poisson clocks and the changed-coordinate counts.
//! * [`walk`]: event-driven path simulation, path functionals, quenched
//!   resampling and the rescaled two-parameter field.
//! * [`ou`]: exact samplers for the limiting OU process and Brownian-sheet field.
//! * [`estimate`]: Monte Carlo estimates with Wilson intervals and band verdicts.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel drivers, report
//! files and the command-line front end live in the companion `dynwalk` crate.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is the idiom used throughout to reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod analytic;
pub mod clocks;
pub mod estimate;
pub mod ou;
pub mod prefix_tree;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
