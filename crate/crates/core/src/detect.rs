//! Sample-variance statistics and bit decisions.
//!
//! The coherent detectors compare the block's sample variance against the
//! harmonic mean of the two conditional variances, which equalizes the error
//! probabilities of bit 0 and bit 1 under the Gaussian approximation of the
//! statistic. The threshold needs the instantaneous channel gain (genie-aided).
//! The non-coherent detector only compares the two halves of the block.

use crate::error::{Error, Result};
use crate::params::{ChannelRealization, ComplexSample, SchemeParams};

/// Decision threshold in variance units plus its `sigma_w^2`-normalized value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub gamma: f64,
    pub normalized: f64,
}

impl ThresholdSpec {
    fn from_normalized(normalized: f64, sigma_w_sq: f64) -> Self {
        Self {
            gamma: normalized * sigma_w_sq,
            normalized,
        }
    }
}

#[inline]
fn harmonic_mean(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// `(1/N) sum |s_n|^2`.
pub fn sample_variance(samples: &[ComplexSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "sample_variance of an empty block".into(),
        ));
    }
    Ok(energy(samples) / samples.len() as f64)
}

#[inline]
pub(crate) fn energy(samples: &[ComplexSample]) -> f64 {
    samples.iter().map(|s| s.norm_sqr()).sum()
}

/// AWGN threshold `chi = 2(1+delta)(1+alpha delta) / (2 + delta(1+alpha))`.
pub fn threshold_thermod(p: &SchemeParams) -> ThresholdSpec {
    let a = 1.0 + p.delta;
    let b = 1.0 + p.alpha * p.delta;
    ThresholdSpec::from_normalized(harmonic_mean(a, b), p.sigma_w_sq)
}

/// Fading threshold `eta` for a single-coefficient channel.
pub fn threshold_noisemod(p: &SchemeParams, h: &ChannelRealization) -> Result<ThresholdSpec> {
    if h.len() != 1 {
        return Err(Error::ChannelMismatch {
            slots: 1,
            coefficients: h.len(),
        });
    }
    let g = h.total_gain();
    let c = 1.0 + g * p.delta;
    let d = 1.0 + g * p.alpha * p.delta;
    Ok(ThresholdSpec::from_normalized(
        harmonic_mean(c, d),
        p.sigma_w_sq,
    ))
}

/// Time-diversity threshold `kappa = 2EF/(E+F)` where `E`, `F` are the
/// slot-averaged conditional variances of bit 0 and bit 1.
pub fn threshold_td(p: &SchemeParams, h: &ChannelRealization) -> Result<ThresholdSpec> {
    if h.len() != p.n_slots {
        return Err(Error::ChannelMismatch {
            slots: p.n_slots,
            coefficients: h.len(),
        });
    }
    let i = h.len() as f64;
    let e = h
        .gains()
        .map(|g| p.sigma_w_sq * (1.0 + g * p.delta))
        .sum::<f64>()
        / i;
    let f = h
        .gains()
        .map(|g| p.sigma_w_sq * (1.0 + g * p.alpha * p.delta))
        .sum::<f64>()
        / i;
    let gamma = harmonic_mean(e, f);
    Ok(ThresholdSpec {
        gamma,
        normalized: gamma / p.sigma_w_sq,
    })
}

/// Bit 1 iff `sigma_hat > gamma`; equality decides 0.
pub fn decide_threshold(sigma_hat: f64, t: &ThresholdSpec) -> u8 {
    u8::from(sigma_hat > t.gamma)
}

/// Bit 0 iff the first half is quieter than the second; equality decides 0.
pub fn decide_nc(samples: &[ComplexSample]) -> Result<u8> {
    if samples.is_empty() || !samples.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "non-coherent decision needs an even, non-zero block length, got {}",
            samples.len()
        )));
    }
    let (first, second) = samples.split_at(samples.len() / 2);
    // equal half lengths, so energies compare like variances
    Ok(u8::from(energy(first) > energy(second)))
}
