//! Integral and series tests that decide whether a growth envelope is
//! eventually dominated, plus the pairwise correlation envelope `Q_{i,j}`.
//!
//! For the parametric families the classification is read off the asymptotic
//! shape `H² = A·w + B·ln w` with `w = log log t`: after the substitution
//! `t = exp(e^w)` an integrand `H^m e^{-H²/2} dt/t` behaves like
//! `w^{(m-B)/2} e^{(1-A/2)w} dw`. Tables fall back to adaptive quadrature in
//! `u = ln t` over the limits `10^{2^k}`.

use alloc::vec::Vec;
use core::f64::consts::E;

use crate::analytic::envelope::{EnvelopeKind, GrowthEnvelope};
use crate::analytic::erdos::ErdosSequence;
use crate::analytic::gaussian::{ln_mills, ln_phibar, phibar, tail_f_signed};
use crate::analytic::quadrature::{integrate, QuadConfig, Quadrature};
use crate::error::{domain, Result};
use crate::math;

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Finite,
    Divergent,
    Inconclusive,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SymbolicTail,
    Quadrature,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralVerdict {
    pub classification: Classification,
    /// Finite: an estimate of the whole integral. Otherwise: the largest
    /// partial integral computed.
    pub partial_value: f64,
    pub method: Method,
}

/// Which of the two asymptotically equivalent integrands to use for the
/// dynamical test.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrandForm {
    /// `H⁴ Φ̄(H) / t`.
    TailWeight,
    /// `H³ e^{-H²/2} / t`.
    Gaussian,
}

/// Which test is being run.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// All-times test, integrand `H⁴ Φ̄(H)/t`; the log-power threshold is 5.
    Dynamical(IntegrandForm),
    /// Fixed-time test, integrand `H e^{-H²/2}/t`; the threshold is 3.
    Static,
}

impl TestKind {
    /// Power `m` of `H` in front of `e^{-H²/2}` in the equivalent integrand.
    fn gaussian_power(self) -> f64 {
        match self {
            TestKind::Dynamical(_) => 3.0,
            TestKind::Static => 1.0,
        }
    }

    /// `ln` of the integrand times `e^w`, at height `h` with `H² - 2w = excess`.
    /// Written through the Mills ratio so that nothing of size `w` cancels.
    fn ln_integrand_dw(self, h: f64, excess: f64) -> f64 {
        match self {
            TestKind::Dynamical(IntegrandForm::TailWeight) => {
                4.0 * math::ln(h) + ln_mills(h) - 0.5 * excess
            }
            TestKind::Dynamical(IntegrandForm::Gaussian) => 3.0 * math::ln(h) - 0.5 * excess,
            TestKind::Static => math::ln(h) - 0.5 * excess,
        }
    }

    /// `ln` of the integrand at height `h`, without the `1/t`.
    fn ln_integrand(self, h: f64) -> f64 {
        match self {
            TestKind::Dynamical(IntegrandForm::TailWeight) => 4.0 * math::ln(h) + ln_phibar(h),
            TestKind::Dynamical(IntegrandForm::Gaussian) => 3.0 * math::ln(h) - 0.5 * h * h,
            TestKind::Static => math::ln(h) - 0.5 * h * h,
        }
    }
}

/// Limits and thresholds of the numerical classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralBudget {
    /// Upper limits `t = 10^{2^k}` for `k = 0..=max_doublings`.
    pub max_doublings: u32,
    /// Partial integrals beyond this count as divergence.
    pub divergence_threshold: f64,
    /// A last increment below this fraction of the total counts as convergence.
    pub rel_increment: f64,
    pub form: IntegrandForm,
    pub quad: QuadConfig,
}

impl Default for IntegralBudget {
    fn default() -> Self {
        Self {
            max_doublings: 20,
            divergence_threshold: 1e3,
            rel_increment: 1e-9,
            form: IntegrandForm::TailWeight,
            quad: QuadConfig {
                abs_tol: 0.0,
                rel_tol: 1e-12,
                max_intervals: 2000,
            },
        }
    }
}

/// Classifies `∫₁^∞ H⁴(t) Φ̄(H(t)) dt/t`.
pub fn integral_test(h: &GrowthEnvelope, budget: &IntegralBudget) -> IntegralVerdict {
    run_test(h, TestKind::Dynamical(budget.form), budget)
}

/// Classifies `∫₁^∞ H(t) e^{-H²(t)/2} dt/t`.
pub fn static_erdos_test(h: &GrowthEnvelope, budget: &IntegralBudget) -> IntegralVerdict {
    run_test(h, TestKind::Static, budget)
}

fn run_test(h: &GrowthEnvelope, kind: TestKind, budget: &IntegralBudget) -> IntegralVerdict {
    match h.tail_shape() {
        Some((a, b)) => {
            let classification = classify_shape(a, b, kind.gaussian_power());
            let partial_value = parametric_partial(h, kind, budget);
            IntegralVerdict {
                classification,
                partial_value,
                method: Method::SymbolicTail,
            }
        }
        None => integral_quadrature(h, kind, budget),
    }
}

fn is_critical(a: f64) -> bool {
    math::abs(a - 2.0) <= 1e-12
}

/// `∫ w^{(m-B)/2} e^{(1-A/2)w} dw` converges iff `A > 2`, or `A = 2` and
/// `(m - B)/2 < -1`.
fn classify_shape(a: f64, b: f64, m: f64) -> Classification {
    if is_critical(a) {
        if b > m + 2.0 {
            Classification::Finite
        } else {
            Classification::Divergent
        }
    } else if a > 2.0 {
        Classification::Finite
    } else {
        Classification::Divergent
    }
}

/// Partial integral of a parametric envelope in the variable `w = log log t`,
/// over dyadic blocks of `w`, with a geometric extrapolation of the tail once
/// the blocks shrink.
fn parametric_partial(h: &GrowthEnvelope, kind: TestKind, budget: &IntegralBudget) -> f64 {
    let at = |w: f64| -> f64 {
        let height = h.eval_loglog(w).expect("parametric envelope");
        let excess = h.square_excess_loglog(w).expect("parametric envelope");
        math::exp(kind.ln_integrand_dw(height, excess))
    };
    // On ln t ∈ [0, e] the double logarithm is pinned at one.
    let h1 = h.eval_loglog(1.0).expect("parametric envelope");
    let mut total = E * math::exp(kind.ln_integrand(h1));
    let mut prev_block = f64::NAN;
    for k in 0..400 {
        let lo = math::powf(2.0, k as f64);
        let block = integrate(at, lo, 2.0 * lo, budget.quad).value;
        total += block;
        if !total.is_finite() || total > budget.divergence_threshold {
            return total;
        }
        if block <= budget.rel_increment * total {
            let r = block / prev_block;
            if r.is_finite() && r < 1.0 {
                total += block * r / (1.0 - r);
            }
            return total;
        }
        prev_block = block;
    }
    total
}

/// Numerical classification by quadrature in `u = ln t` up to `10^{2^k}`.
pub fn integral_quadrature(
    h: &GrowthEnvelope,
    kind: TestKind,
    budget: &IntegralBudget,
) -> IntegralVerdict {
    let verdict = |classification, partial_value| IntegralVerdict {
        classification,
        partial_value,
        method: Method::Quadrature,
    };
    let g = |u: f64| -> f64 {
        match h.eval_ln(u) {
            Some(height) => math::exp(kind.ln_integrand(height)),
            None => f64::NAN,
        }
    };
    let breaks: Vec<f64> = match &h.kind {
        EnvelopeKind::Tabulated { ln_t, .. } => ln_t.clone(),
        _ => Vec::new(),
    };
    let mut total = 0.0;
    let mut lo = 0.0;
    for k in 0..=budget.max_doublings {
        let hi = math::powf(2.0, k as f64) * core::f64::consts::LN_10;
        if hi > h.ln_t_max() {
            let class = if total > budget.divergence_threshold {
                Classification::Divergent
            } else {
                Classification::Inconclusive
            };
            return verdict(class, total);
        }
        let mut block = 0.0;
        let mut a = lo;
        // Integrate piecewise between table knots, plus the pinned-loglog kink.
        let kinks = breaks.iter().copied().chain(core::iter::once(E));
        let mut inner: Vec<f64> = kinks.filter(|&x| x > lo && x < hi).collect();
        inner.sort_by(f64::total_cmp);
        for b in inner.into_iter().chain(core::iter::once(hi)) {
            block += integrate(g, a, b, budget.quad).value;
            a = b;
        }
        total += block;
        lo = hi;
        if total > budget.divergence_threshold {
            return verdict(Classification::Divergent, total);
        }
        if k > 0 && block <= budget.rel_increment * total {
            return verdict(Classification::Finite, total);
        }
    }
    verdict(Classification::Inconclusive, total)
}

/// Partial sums of `Σ H²(e_n) Φ̄(H(e_n))` along the Erdős sequence.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct SumTest {
    pub partial_sums: Vec<f64>,
    pub classification: Classification,
    /// Least-squares slope of `ln(summand)` against `ln n` over the last
    /// decade of indices; `-1` is the borderline.
    pub local_exponent: f64,
    pub method: Method,
}

/// Evaluates the series up to `n_max` (or the end of a table).
///
/// Parametric envelopes are classified from their shape: the summand is
/// `n^{-A/2} (ln n)^{(A+1-B)/2}` up to constants, a Bertrand series. The
/// fitted local exponent is reported alongside but cannot resolve the
/// logarithmic factors at reachable `n`; it is the only evidence for tables,
/// which are called only when it sits clearly off `-1`.
pub fn sum_test(h: &GrowthEnvelope, seq: &ErdosSequence, n_max: usize) -> Result<SumTest> {
    if n_max == 0 || n_max > seq.n_max() {
        return Err(domain!(
            "sum_test needs 1 <= n_max <= {}, got {n_max}",
            seq.n_max()
        ));
    }
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut terms = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for n in 1..=n_max {
        let Some(height) = h.eval_ln(seq.ln_value(n)?) else {
            break;
        };
        let term = height * height * phibar(height);
        acc += term;
        terms.push(term);
        partial_sums.push(acc);
    }
    let local_exponent = fit_local_exponent(&terms);
    let (classification, method) = match h.tail_shape() {
        Some((a, b)) => {
            let class = if is_critical(a) {
                if b > a + 3.0 {
                    Classification::Finite
                } else {
                    Classification::Divergent
                }
            } else if a > 2.0 {
                Classification::Finite
            } else {
                Classification::Divergent
            };
            (class, Method::SymbolicTail)
        }
        None => {
            let class = if local_exponent < -1.25 {
                Classification::Finite
            } else if local_exponent > -0.75 {
                Classification::Divergent
            } else {
                Classification::Inconclusive
            };
            (class, Method::Quadrature)
        }
    };
    Ok(SumTest {
        partial_sums,
        classification,
        local_exponent,
        method,
    })
}

fn fit_local_exponent(terms: &[f64]) -> f64 {
    let n = terms.len();
    let start = (n / 10).max(1);
    let pts: Vec<(f64, f64)> = (start..=n)
        .filter(|&k| terms[k - 1] > 0.0)
        .map(|k| (math::ln(k as f64), math::ln(terms[k - 1])))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `H_n = H(e_n)`.
pub fn envelope_at_index(h: &GrowthEnvelope, seq: &ErdosSequence, n: usize) -> Result<f64> {
    let u = seq.ln_value(n)?;
    h.eval_ln(u)
        .ok_or_else(|| domain!("envelope undefined at e_{n} (ln e_n = {u})"))
}

/// `Q_{i,j} = f(H_j√(e_j/(e_j-e_i)) - (H_i + 14/H_i)√(e_i/(e_j-e_i)))`, with
/// `f(x) = x²Φ̄(x)` on the whole real line. Negative arguments give values
/// that bound nothing.
pub fn q_envelope(i: usize, j: usize, h: &GrowthEnvelope, seq: &ErdosSequence) -> Result<f64> {
    Ok(tail_f_signed(q_argument(i, j, h, seq)?))
}

/// The argument of `f` in [`q_envelope`].
pub fn q_argument(i: usize, j: usize, h: &GrowthEnvelope, seq: &ErdosSequence) -> Result<f64> {
    if j <= i || i == 0 {
        return Err(domain!("q_envelope needs j > i >= 1, got i={i}, j={j}"));
    }
    let r = seq.gap_fraction(i, j)?;
    let hi = envelope_at_index(h, seq, i)?;
    let hj = envelope_at_index(h, seq, j)?;
    if !(hi > 0.0) {
        return Err(domain!("q_envelope needs H_i > 0"));
    }
    Ok(hj * math::sqrt(1.0 + r) - (hi + 14.0 / hi) * math::sqrt(r))
}

/// The three ranges of the index gap `j - i` over which `Q_{i,j}` is
/// controlled differently.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QRegime {
    /// `j ≤ i + log i`.
    Near,
    /// `i + log i < j ≤ i + (log i)^10`.
    Middle,
    /// `j > i + (log i)^10`.
    Far,
}

pub fn q_regime(i: usize, j: usize) -> QRegime {
    let li = math::log_e(i as f64);
    let gap = j as f64 - i as f64;
    if gap <= li {
        QRegime::Near
    } else if gap <= math::powf(li, 10.0) {
        QRegime::Middle
    } else {
        QRegime::Far
    }
}

/// One row of the regime table.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QRow {
    pub i: usize,
    pub j: usize,
    pub regime: QRegime,
    pub argument: f64,
    pub q: f64,
    /// Scale the regime compares against: `f(H_j)` (far),
    /// `i^{-1/4}` (middle), `exp(-(j-i)/(4e))` (near).
    pub reference: f64,
}

/// Representative `j` for each regime at index `i`, where `seq` reaches it.
pub fn q_regime_table(
    h: &GrowthEnvelope,
    seq: &ErdosSequence,
    indices: &[usize],
) -> Result<Vec<QRow>> {
    let mut rows = Vec::new();
    for &i in indices {
        if i == 0 {
            return Err(domain!("regime table indices start at 1"));
        }
        let li = math::log_e(i as f64);
        let near = i + (math::floor(li) as usize).max(1);
        let middle = i + math::ceil(math::powf(li, 5.0)) as usize;
        let far = i + math::floor(math::powf(li, 10.0)) as usize + 1;
        for j in [near, middle, far] {
            if j > seq.n_max() || j <= i {
                continue;
            }
            let regime = q_regime(i, j);
            let argument = q_argument(i, j, h, seq)?;
            let reference = match regime {
                QRegime::Far => tail_f_signed(envelope_at_index(h, seq, j)?),
                QRegime::Middle => math::powf(i as f64, -0.25),
                QRegime::Near => math::exp(-((j - i) as f64) / (4.0 * E)),
            };
            rows.push(QRow {
                i,
                j,
                regime,
                argument,
                q: tail_f_signed(argument),
                reference,
            });
        }
    }
    Ok(rows)
}

/// `∫₀^∞ Φ̄(√t) dt`, whose exact value is one half.
pub fn sqrt_normal_integral() -> Quadrature {
    let cfg = QuadConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 2000,
    };
    // Φ̄(√t) < 1e-300 past t = 1400; sum over geometric blocks up to there.
    let mut out = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
        converged: true,
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while lo < 1600.0 {
        let q = integrate(|t| phibar(math::sqrt(t)), lo, hi, cfg);
        out.value += q.value;
        out.abs_error += q.abs_error;
        out.evaluations += q.evaluations;
        out.converged &= q.converged;
        lo = hi;
        hi *= 4.0;
    }
    out
}
