//! AWGN and flat block-fading channels.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::params::{ChannelRealization, ComplexSample};
use crate::randgen::{complex_gaussian, SeedContext};
use crate::waveforms::VariancePlan;

fn check_noise(sigma_w_sq: f64) -> Result<()> {
    if sigma_w_sq.is_finite() && sigma_w_sq > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "sigma_w_sq must be positive, got {sigma_w_sq}"
        )))
    }
}

/// `s_n = r_n + w_n` with `w_n ~ CN(0, sigma_w_sq)`.
pub fn apply_awgn(
    samples: &[ComplexSample],
    sigma_w_sq: f64,
    ctx: SeedContext,
) -> Result<Vec<ComplexSample>> {
    check_noise(sigma_w_sq)?;
    let mut out = samples.to_vec();
    add_awgn_in_place(&mut out, sigma_w_sq, &mut ctx.rng());
    Ok(out)
}

/// `s_n = h_i r_n + w_n`, where `h_i` is the coefficient of the slot holding
/// sample `n`. The plan must describe exactly one bit whose slot count equals
/// the number of coefficients.
pub fn apply_fading(
    samples: &[ComplexSample],
    h: &ChannelRealization,
    plan: &VariancePlan,
    sigma_w_sq: f64,
    ctx: SeedContext,
) -> Result<Vec<ComplexSample>> {
    check_noise(sigma_w_sq)?;
    if plan.slots().len() != h.len() {
        return Err(Error::ChannelMismatch {
            slots: plan.slots().len(),
            coefficients: h.len(),
        });
    }
    if samples.len() != plan.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples given for a plan of {}",
            samples.len(),
            plan.len()
        )));
    }
    let mut out = samples.to_vec();
    fade_in_place(&mut out, h.coefficients(), h.len());
    add_awgn_in_place(&mut out, sigma_w_sq, &mut ctx.rng());
    Ok(out)
}

/// Multiplies consecutive equal-length slots by their coefficients.
pub(crate) fn fade_in_place(samples: &mut [ComplexSample], coeffs: &[Complex64], n_slots: usize) {
    let slot_len = samples.len() / n_slots;
    for (chunk, h) in samples.chunks_mut(slot_len).zip(coeffs) {
        for s in chunk {
            *s *= h;
        }
    }
}

pub(crate) fn add_awgn_in_place<R: Rng + ?Sized>(
    samples: &mut [ComplexSample],
    sigma_w_sq: f64,
    rng: &mut R,
) {
    let sd = (sigma_w_sq / 2.0).sqrt();
    for s in samples {
        *s += complex_gaussian(rng, sd);
    }
}
