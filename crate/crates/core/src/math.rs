//! Thin wrappers over `libm` so the rest of the crate reads like ordinary
//! floating-point code without `std`.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Smallest representable value strictly greater than `x` (for finite `x`).
#[inline]
pub fn next_up(x: f64) -> f64 {
    x.next_up()
}

/// `ln(e ∨ x)`: the logarithm convention under which `log 1 = log 2 = 1`.
#[inline]
pub fn log_e(x: f64) -> f64 {
    if x <= core::f64::consts::E {
        1.0
    } else {
        ln(x)
    }
}
