//! Gaussian tail probability.

use std::f64::consts::SQRT_2;

/// `Q(x) = P(Z > x)` for standard normal `Z`, via `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}
