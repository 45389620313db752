//! Scalar mathematics: the Gaussian tail, closed-form bounds, the Erdős
//! sequence, growth envelopes and the integral tests built on them.
//!
//! Everything here is a pure function of its arguments.

mod bounds;
mod envelope;
mod erdos;
mod gaussian;
mod integral;
pub mod quadrature;

pub use bounds::{
    bernstein_bound, clock_grid_size, clock_uniform_bound, phibar_shift_lower, phibar_shift_upper,
    poisson_chernoff, tail_band, BandInterval, Bound, TailBand,
};
pub use envelope::{loglog_of_ln, EnvelopeKind, GrowthEnvelope};
pub use erdos::{erdos_sequence, ErdosSequence};
pub use gaussian::{
    log_normal_sf, mills_asymptotic, normal_pdf, normal_quantile, normal_sf, phibar, tail_f,
    tail_f_signed, LOG_SPACE_CUTOFF,
};
pub use integral::{
    envelope_at_index, integral_quadrature, integral_test, q_argument, q_envelope, q_regime,
    q_regime_table, sqrt_normal_integral, static_erdos_test, sum_test, Classification,
    IntegralBudget, IntegralVerdict, IntegrandForm, Method, QRegime, QRow, SumTest, TestKind,
};
