//! The Erdős index sequence `e_n = ⌊exp(n / log n)⌋`, with `log x = ln(e ∨ x)`.
//!
//! Values grow like `exp(n/ln n)` and leave the exactly representable integers
//! near `n ≈ 170`. Past that point only `ln e_n` is available, which is all the
//! envelope computations need.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math;

/// `2^53`: integers below this are exact in an `f64`.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ErdosSequence {
    /// `x_n = n / log n` for `n = 1..=n_max` (index `n - 1`).
    exponents: Vec<f64>,
    /// Exact `e_n` for the prefix where `exp(x_n) < 2^53`.
    exact: Vec<u64>,
}

impl ErdosSequence {
    /// The first `n_max` terms, all of which must be exactly representable.
    pub fn new(n_max: usize) -> Result<Self> {
        let seq = Self::with_exponents(n_max)?;
        if seq.exact.len() < n_max {
            return Err(Error::Range(alloc::format!(
                "e_{} exceeds the exactly representable integers (last exact index {})",
                n_max,
                seq.exact.len()
            )));
        }
        Ok(seq)
    }

    /// The first `n_max` terms, keeping exact integers only where they are
    /// representable and log-values everywhere.
    pub fn with_exponents(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(domain!("the Erdős sequence needs n_max >= 1"));
        }
        let exponents: Vec<f64> = (1..=n_max)
            .map(|n| n as f64 / math::log_e(n as f64))
            .collect();
        let exact = exponents
            .iter()
            .map(|&x| math::exp(x))
            .take_while(|&v| v < EXACT_LIMIT)
            .map(|v| math::floor(v) as u64)
            .collect();
        Ok(Self { exponents, exact })
    }

    pub fn n_max(&self) -> usize {
        self.exponents.len()
    }

    /// Number of leading terms available as exact integers.
    pub fn exact_len(&self) -> usize {
        self.exact.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max() {
            return Err(domain!("index {n} outside 1..={}", self.n_max()));
        }
        Ok(())
    }

    /// `e_n` as an integer.
    pub fn value(&self, n: usize) -> Result<u64> {
        self.check(n)?;
        self.exact
            .get(n - 1)
            .copied()
            .ok_or_else(|| Error::Range(alloc::format!("e_{n} is not exactly representable")))
    }

    /// The exact prefix `e_1, e_2, …`.
    pub fn values(&self) -> &[u64] {
        &self.exact
    }

    /// `n / log n`, the exponent before flooring.
    pub fn exponent(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.exponents[n - 1])
    }

    /// `ln e_n`: exact where `e_n` is, otherwise `n / log n` (the floor then
    /// changes the logarithm by less than `1/e_n`).
    pub fn ln_value(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(match self.exact.get(n - 1) {
            Some(&v) => math::ln(v as f64),
            None => self.exponents[n - 1],
        })
    }

    /// `e_i / (e_j - e_i)` for `i < j`.
    pub fn gap_fraction(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        if j <= i {
            return Err(domain!("gap_fraction needs i < j, got i={i}, j={j}"));
        }
        if let (Some(&ei), Some(&ej)) = (self.exact.get(i - 1), self.exact.get(j - 1)) {
            return Ok(ei as f64 / (ej - ei) as f64);
        }
        Ok(1.0 / math::expm1(self.ln_value(j)? - self.ln_value(i)?))
    }

    /// `(e_{n+1} - e_n)·log(n) / e_n`, which tends to one.
    pub fn gap_ratio(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        if n + 1 > self.n_max() {
            return Err(domain!("gap_ratio({n}) needs n_max >= {}", n + 1));
        }
        Ok(math::log_e(n as f64) / self.gap_fraction(n, n + 1)?)
    }
}

/// Convenience constructor; see [`ErdosSequence::new`].
pub fn erdos_sequence(n_max: usize) -> Result<ErdosSequence> {
    ErdosSequence::new(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST_34: [u64; 34] = [
        2, 7, 15, 17, 22, 28, 36, 46, 60, 76, 98, 125, 158, 201, 254, 320, 403, 506, 634, 793, 989,
        1233, 1533, 1904, 2360, 2922, 3612, 4459, 5498, 6771, 8328, 10231, 12556, 15393,
    ];

    #[test]
    fn frozen_prefix() {
        let seq = erdos_sequence(34).unwrap();
        assert_eq!(seq.values(), &FIRST_34[..]);
        assert_eq!(seq.value(1).unwrap(), 2);
        assert_eq!(seq.value(2).unwrap(), 7);
        assert_eq!(seq.value(3).unwrap(), 15);
        assert_eq!(seq.value(20).unwrap(), 793);
        assert_eq!(seq.value(30).unwrap(), 6771);
    }

    #[test]
    fn range_errors_are_explicit() {
        assert!(matches!(erdos_sequence(400), Err(Error::Range(_))));
        let seq = ErdosSequence::with_exponents(400).unwrap();
        assert!(matches!(seq.value(400), Err(Error::Range(_))));
        assert!(seq.ln_value(400).unwrap() > 60.0);
        assert!(seq.value(0).is_err());
        assert!(seq.value(401).is_err());
        assert!(erdos_sequence(0).is_err());
    }

    #[test]
    fn gap_ratios() {
        let seq = ErdosSequence::with_exponents(100_001).unwrap();
        assert!((seq.gap_ratio(2).unwrap() - 8.0 / 7.0).abs() < 1e-15);
        let r = seq.gap_ratio(10_000).unwrap();
        assert!((0.9..=1.1).contains(&r), "{r}");
        let mut prev = 0.0;
        for n in [1_000, 3_000, 10_000, 30_000, 100_000] {
            let r = seq.gap_ratio(n).unwrap();
            assert!((0.8..=1.2).contains(&r));
            assert!(r > prev);
            prev = r;
        }
        assert!(seq.gap_ratio(100_001).is_err());
    }

    #[test]
    fn strictly_increasing() {
        let seq = ErdosSequence::with_exponents(5000).unwrap();
        for w in seq.values().windows(2) {
            assert!(w[0] < w[1]);
        }
        for n in 2..5000 {
            assert!(seq.ln_value(n + 1).unwrap() > seq.ln_value(n).unwrap());
        }
    }
}
