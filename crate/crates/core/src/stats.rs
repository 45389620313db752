//! Small sample-statistics toolkit: streaming moments, least squares, the
//! two-sample Kolmogorov-Smirnov test and the chi-square survival function.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::math;

/// Welford's streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &Self) -> Self {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Self {
            count: n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (`0` below two observations).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            math::sqrt(self.variance() / self.count as f64)
        }
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Self::new();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Sample covariance of paired data with the standard error of the estimate
/// (from the empirical variance of the centered products).
pub fn covariance_with_se(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain!(
            "covariance needs two equal-length samples of size >= 2"
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let prods: Welford = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let cov = prods.mean() * n / (n - 1.0);
    Ok((cov, prods.std_error()))
}

/// Ordinary least-squares fit `y = intercept + slope·x`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Residual mean square `RSS / (m - 2)`.
    pub residual_variance: f64,
    /// Standard error of `residual_variance`, from the spread of squared
    /// residuals (no normality assumption).
    pub residual_variance_se: f64,
    pub samples: usize,
}

pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    let m = xs.len();
    if m != ys.len() || m < 3 {
        return Err(domain!(
            "regression needs two equal-length samples of size >= 3"
        ));
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(domain!("regression needs a non-constant regressor"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sq: Welford = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .collect();
    let rss = sq.mean() * mf;
    let residual_variance = rss / (mf - 2.0);
    Ok(Regression {
        slope,
        intercept,
        slope_se: math::sqrt(residual_variance / sxx),
        residual_variance,
        residual_variance_se: sq.std_error() * mf / (mf - 2.0),
        samples: m,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() || a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(domain!("KS test needs two non-empty samples without NaN"));
    }
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max(math::abs(i as f64 / na - j as f64 / nb));
    }
    let ne = na * nb / (na + nb);
    let sq = math::sqrt(ne);
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d),
    })
}

/// `P{K > λ}` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = math::exp(-2.0 * kf * kf * lambda * lambda);
        sum += sign * term;
        if term < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = core::f64::consts::PI;
        return math::ln(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (k, g) in G.iter().enumerate().skip(1) {
        a += g / (x + k as f64);
    }
    0.5 * math::ln(2.0 * core::f64::consts::PI) + (x + 0.5) * math::ln(t) - t + math::ln(a)
}

/// Regularized upper incomplete gamma `Q(s, x)`.
pub fn gamma_q(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(domain!("gamma_q needs s > 0 and x >= 0, got s={s}, x={x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let lead = s * math::ln(x) - x - ln_gamma(s);
    if x < s + 1.0 {
        // Series for P(s, x).
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut k = s;
        for _ in 0..10_000 {
            k += 1.0;
            term *= x / k;
            sum += term;
            if term < sum * 1e-16 {
                break;
            }
        }
        Ok((1.0 - sum * math::exp(lead)).clamp(0.0, 1.0))
    } else {
        // Modified Lentz continued fraction for Q(s, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if math::abs(d) < tiny {
                d = tiny;
            }
            c = b + an / c;
            if math::abs(c) < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if math::abs(del - 1.0) < 1e-16 {
                break;
            }
        }
        Ok((math::exp(lead) * h).clamp(0.0, 1.0))
    }
}

/// Survival function of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_sf(x: f64, dof: f64) -> Result<f64> {
    gamma_q(dof / 2.0, x / 2.0)
}

/// Pearson statistic `Σ (o - e)² / e` over cells with positive expectation.
pub fn pearson_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o - e) * (o - e) / e)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.5, 7.25, 0.0, 3.0];
        let w: Welford = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 5.0;
        assert!((w.mean() - mean).abs() < 1e-14);
        assert!((w.variance() - var).abs() < 1e-13);
        let a: Welford = xs[..2].iter().copied().collect();
        let b: Welford = xs[2..].iter().copied().collect();
        let m = a.merge(&b);
        assert!((m.variance() - var).abs() < 1e-13);
        assert_eq!(m.count(), 6);
    }

    #[test]
    fn regression_recovers_an_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let r = linear_regression(&xs, &ys).unwrap();
        assert!((r.slope + 0.5).abs() < 1e-15);
        assert!((r.intercept - 2.0).abs() < 1e-15);
        assert!(r.residual_variance < 1e-28);
        assert!(linear_regression(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn gamma_reference_values() {
        // Γ(5) = 24, Γ(1/2) = √π.
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - core::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        // Q(1, x) = e^{-x}.
        for x in [0.1, 1.0, 3.0, 20.0] {
            assert!((gamma_q(1.0, x).unwrap() - (-x).exp()).abs() < 1e-14);
        }
        // Chi-square with 2 dof: sf(x) = e^{-x/2}; 99th percentile of chi2(10).
        assert!((chi_square_sf(5.0, 2.0).unwrap() - (-2.5f64).exp()).abs() < 1e-14);
        assert!((chi_square_sf(23.209251158954356, 10.0).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Critical values of the Kolmogorov distribution.
        assert!((kolmogorov_sf(1.3580986393225507) - 0.05).abs() < 1e-10);
        assert!((kolmogorov_sf(1.9495) - 0.001).abs() < 1e-5);
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let same = ks_two_sample(&a, &a).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.p_value, 1.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        let apart = ks_two_sample(&a, &b).unwrap();
        assert_eq!(apart.statistic, 1.0);
        assert!(apart.p_value < 1e-20);
    }
}
