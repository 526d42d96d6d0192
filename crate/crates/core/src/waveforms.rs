//! Bit-to-variance mapping and information-noise generation.
//!
//! TherMod and NoiseMod hold one variance level for the whole bit. NC-NoiseMod
//! splits the bit in two halves, low→high for bit 0 and high→low for bit 1.
//! TD-NoiseMod splits the bit into `I` equal slots, each carrying the bit's
//! level and each later faded by its own coefficient.

use std::fmt::Write as _;
use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::{ComplexSample, Scheme, SchemeParams};
use crate::randgen::{complex_gaussian, SeedContext};

/// Samples of one bit that share a fading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub bit: usize,
    pub slot: usize,
    pub range: Range<usize>,
}

/// Per-sample information-noise variance for a bit sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariancePlan {
    per_sample_variance: Vec<f64>,
    slots: Vec<Slot>,
    samples_per_bit: usize,
}

impl VariancePlan {
    pub fn per_sample_variance(&self) -> &[f64] {
        &self.per_sample_variance
    }

    /// `(bit, slot) -> sample range` map; one slot per bit except for TD.
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn samples_per_bit(&self) -> usize {
        self.samples_per_bit
    }

    pub fn n_bits(&self) -> usize {
        self.per_sample_variance
            .len()
            .checked_div(self.samples_per_bit)
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.per_sample_variance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_sample_variance.is_empty()
    }

    /// Slots belonging to bit `bit`.
    pub fn bit_slots(&self, bit: usize) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(move |s| s.bit == bit)
    }
}

/// Builds the variance plan for `bits` under the scheme in `p`.
pub fn plan_variances(bits: &[u8], p: &SchemeParams) -> Result<VariancePlan> {
    let p = p.validate()?;
    if bits.is_empty() {
        return Err(Error::InvalidArgument("bit list is empty".into()));
    }
    if let Some(b) = bits.iter().find(|b| **b > 1) {
        return Err(Error::InvalidArgument(format!(
            "bits must be 0 or 1, got {b}"
        )));
    }
    let n = p.n_samples;
    let (lo, hi) = (p.sigma0_sq(), p.sigma1_sq());
    let mut per_sample_variance = Vec::with_capacity(bits.len() * n);
    let mut slots = Vec::with_capacity(bits.len() * p.n_slots);
    for (k, &bit) in bits.iter().enumerate() {
        let start = k * n;
        match p.scheme {
            Scheme::NcNoiseMod => {
                let (first, second) = if bit == 0 { (lo, hi) } else { (hi, lo) };
                per_sample_variance.extend(std::iter::repeat_n(first, n / 2));
                per_sample_variance.extend(std::iter::repeat_n(second, n / 2));
            }
            _ => per_sample_variance.extend(std::iter::repeat_n(p.level(bit), n)),
        }
        let slot_len = p.slot_len();
        for i in 0..p.n_slots {
            slots.push(Slot {
                bit: k,
                slot: i,
                range: start + i * slot_len..start + (i + 1) * slot_len,
            });
        }
    }
    Ok(VariancePlan {
        per_sample_variance,
        slots,
        samples_per_bit: n,
    })
}

/// Draws sample `k` from `CN(0, plan[k])`, deterministically under `ctx`.
pub fn generate_bit_samples(plan: &VariancePlan, ctx: SeedContext) -> Vec<ComplexSample> {
    let mut out = Vec::with_capacity(plan.len());
    fill_samples(plan.per_sample_variance(), &mut ctx.rng(), &mut out);
    out
}

/// Buffer-reusing form of [`generate_bit_samples`].
pub(crate) fn fill_samples<R: Rng + ?Sized>(
    variances: &[f64],
    rng: &mut R,
    out: &mut Vec<ComplexSample>,
) {
    out.clear();
    let mut last = f64::NAN;
    let mut sd = 0.0;
    for &v in variances {
        if v != last {
            last = v;
            sd = (v / 2.0).sqrt();
        }
        out.push(complex_gaussian(rng, sd));
    }
}

/// CSV export with columns `sample_index,re,im,variance_level`.
pub fn waveform_csv(plan: &VariancePlan, samples: &[ComplexSample]) -> String {
    let mut s = String::from("sample_index,re,im,variance_level\n");
    for (k, (z, v)) in samples.iter().zip(plan.per_sample_variance()).enumerate() {
        let _ = writeln!(s, "{k},{},{},{}", z.re, z.im, v);
    }
    s
}
