//! Integral-test classifications for a parametric envelope family.

use dynwalk_core::analytic::{
    integral_test, static_erdos_test, sum_test, Classification, ErdosSequence, GrowthEnvelope,
    IntegralBudget, IntegrandForm,
};
use serde::{Deserialize, Serialize};

use super::{invalid, pass_if};
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Envelope families with one real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `c·√(2 log log t)`.
    ScaledLil,
    /// `√(2 log log t + a·log log log t)`.
    Corollary,
}

impl Family {
    pub fn envelope(self, param: f64, clamp: bool) -> Result<GrowthEnvelope> {
        let h = match self {
            Family::ScaledLil => GrowthEnvelope::scaled_lil(param)?,
            Family::Corollary => GrowthEnvelope::corollary(param)?,
        };
        Ok(if clamp { h.clamp() } else { h })
    }

    /// Name of the parameter (`c` or `a`).
    pub fn parameter(self) -> &'static str {
        match self {
            Family::ScaledLil => "c",
            Family::Corollary => "a",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "scaled-lil" | "scaledlil" | "lil" => Ok(Family::ScaledLil),
            "corollary" => Ok(Family::Corollary),
            other => Err(format!(
                "unknown envelope family '{other}' (scaled-lil, corollary)"
            )),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::ScaledLil => "scaled-lil",
            Family::Corollary => "corollary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralConfig {
    pub family: Family,
    pub params: Vec<f64>,
    pub clamp: bool,
    /// Terms of the Erdős series to sum.
    pub sum_terms: usize,
}

impl Default for IntegralConfig {
    fn default() -> Self {
        Self {
            family: Family::Corollary,
            params: vec![4.5, 5.5],
            clamp: false,
            sum_terms: 10_000,
        }
    }
}

impl IntegralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() || self.sum_terms < 10 {
            return Err(invalid(
                "integral test needs a parameter and at least 10 series terms",
            ));
        }
        for &p in &self.params {
            self.family.envelope(p, self.clamp)?;
        }
        Ok(())
    }
}

/// Classifications of one envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralRow {
    pub param: f64,
    /// All-times test with the `H⁴Φ̄(H)` integrand.
    pub dynamical: Classification,
    pub dynamical_value: f64,
    /// All-times test with the equivalent `H³e^{-H²/2}` integrand.
    pub dynamical_gaussian: Classification,
    /// Fixed-time test.
    pub static_test: Classification,
    /// Series along the Erdős sequence.
    pub sum: Classification,
    pub sum_local_exponent: f64,
    /// Both integrands and the series agree.
    pub agree: bool,
}

pub fn classify(
    family: Family,
    param: f64,
    clamp: bool,
    seq: &ErdosSequence,
    sum_terms: usize,
) -> Result<IntegralRow> {
    let h = family.envelope(param, clamp)?;
    let budget = IntegralBudget::default();
    let gaussian = IntegralBudget {
        form: IntegrandForm::Gaussian,
        ..budget
    };
    let dynamical = integral_test(&h, &budget);
    let dynamical_gaussian = integral_test(&h, &gaussian).classification;
    let static_test = static_erdos_test(&h, &budget).classification;
    let sum = sum_test(&h, seq, sum_terms)?;
    Ok(IntegralRow {
        param,
        dynamical: dynamical.classification,
        dynamical_value: dynamical.partial_value,
        dynamical_gaussian,
        static_test,
        sum: sum.classification,
        sum_local_exponent: sum.local_exponent,
        agree: dynamical.classification == dynamical_gaussian
            && dynamical.classification == sum.classification
            && dynamical.classification != Classification::Inconclusive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub config: IntegralConfig,
    pub rows: Vec<IntegralRow>,
}

pub(crate) fn classification_rows(family: Family, rows: &[IntegralRow], seed: u64) -> Vec<CsvRow> {
    rows.iter()
        .map(|r| CsvRow {
            experiment: "integral_test".into(),
            parameter: family.parameter().into(),
            value: r.param,
            estimate: r.dynamical_value,
            ci_low: r.dynamical_value,
            ci_high: r.dynamical_value,
            band_low: f64::NAN,
            band_high: f64::NAN,
            verdict: pass_if(r.agree),
            samples: 0,
            seed,
        })
        .collect()
}

impl Tabular for IntegralReport {
    fn rows(&self) -> Vec<CsvRow> {
        classification_rows(self.config.family, &self.rows, 0)
    }
}

pub fn run_integral_test(cfg: &IntegralConfig) -> Result<IntegralReport> {
    cfg.validate()?;
    let seq = ErdosSequence::with_exponents(cfg.sum_terms)?;
    let rows = cfg
        .params
        .iter()
        .map(|&p| classify(cfg.family, p, cfg.clamp, &seq, cfg.sum_terms))
        .collect::<Result<_>>()?;
    Ok(IntegralReport {
        config: cfg.clone(),
        rows,
    })
}
