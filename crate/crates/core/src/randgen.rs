//! Deterministic random streams for complex Gaussian noise and Rayleigh fading.
//!
//! Every stream is addressed by a `(master_seed, stream_id)` pair. The pair is
//! hashed through a SplitMix64 finalizer into the 256-bit state of a
//! xoshiro256++ generator, so any stream can be opened directly without
//! advancing a shared generator. Monte Carlo trials therefore produce the same
//! samples no matter which worker runs them or in what order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::params::{ChannelRealization, ComplexSample};

/// Generator type behind every stream.
pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Address of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedContext {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedContext {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// A derived stream, distinct from `self` and from children with other tags.
    pub fn child(&self, tag: u64) -> Self {
        let id = mix64(self.stream_id.wrapping_mul(GOLDEN) ^ mix64(tag.wrapping_add(GOLDEN)));
        Self::new(self.master_seed, id)
    }

    /// Opens the generator for this stream.
    pub fn rng(&self) -> StreamRng {
        let base = mix64(self.master_seed ^ GOLDEN) ^ self.stream_id.rotate_left(17);
        let mut seed = [0u8; 32];
        for (k, chunk) in seed.chunks_exact_mut(8).enumerate() {
            let word =
                mix64(base.wrapping_add((k as u64 + 1).wrapping_mul(GOLDEN)) ^ self.stream_id);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        StreamRng::from_seed(seed)
    }
}

/// One circularly-symmetric complex Gaussian sample of total variance
/// `2 * std_per_dim^2`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, std_per_dim: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(std_per_dim * re, std_per_dim * im)
}

/// Draws `count` i.i.d. `CN(0, variance)` samples.
pub fn draw_complex_gaussian(
    ctx: SeedContext,
    variance: f64,
    count: usize,
) -> Result<Vec<ComplexSample>> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "variance must be positive, got {variance}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut rng = ctx.rng();
    let sd = (variance / 2.0).sqrt();
    Ok((0..count).map(|_| complex_gaussian(&mut rng, sd)).collect())
}

/// Draws `n_slots` i.i.d. `CN(0, 1)` fading coefficients.
pub fn draw_rayleigh_channel(ctx: SeedContext, n_slots: usize) -> Result<ChannelRealization> {
    if n_slots == 0 {
        return Err(Error::InvalidArgument("n_slots must be at least 1".into()));
    }
    let mut rng = ctx.rng();
    ChannelRealization::new(rayleigh_coefficients(&mut rng, n_slots))
}

pub(crate) fn rayleigh_coefficients<R: Rng + ?Sized>(
    rng: &mut R,
    n_slots: usize,
) -> Vec<Complex64> {
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    (0..n_slots).map(|_| complex_gaussian(rng, sd)).collect()
}

/// Draws a `Gamma(shape, 1)` variate as a sum of `shape` unit exponentials,
/// i.e. the total gain `sum |h_i|^2` of `shape` Rayleigh slots.
pub fn draw_gain<R: Rng + ?Sized>(rng: &mut R, shape: usize) -> f64 {
    (0..shape).map(|_| -> f64 { Exp1.sample(rng) }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(xs: impl Iterator<Item = f64>) -> (f64, usize) {
        let mut n = 0;
        let mut s = 0.0;
        for x in xs {
            s += x;
            n += 1;
        }
        (s / n as f64, n)
    }

    #[test]
    fn complex_gaussian_power() {
        let s = draw_complex_gaussian(SeedContext::new(1, 0), 2.0, 1_000_000).unwrap();
        let (m, _) = mean(s.iter().map(|z| z.norm_sqr()));
        assert!((m - 2.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn real_imag_uncorrelated() {
        let s = draw_complex_gaussian(SeedContext::new(2, 0), 1.0, 1_000_000).unwrap();
        let n = s.len() as f64;
        let mr = s.iter().map(|z| z.re).sum::<f64>() / n;
        let mi = s.iter().map(|z| z.im).sum::<f64>() / n;
        let cov = s.iter().map(|z| (z.re - mr) * (z.im - mi)).sum::<f64>() / n;
        let vr = s.iter().map(|z| (z.re - mr).powi(2)).sum::<f64>() / n;
        let vi = s.iter().map(|z| (z.im - mi).powi(2)).sum::<f64>() / n;
        let corr = cov / (vr * vi).sqrt();
        assert!(corr.abs() < 0.004, "{corr}");
        // each part carries half the power
        assert!((vr - 0.5).abs() < 0.005 && (vi - 0.5).abs() < 0.005);
    }

    #[test]
    fn streams_are_deterministic() {
        let ctx = SeedContext::new(42, 7);
        assert_eq!(
            draw_complex_gaussian(ctx, 3.0, 64).unwrap(),
            draw_complex_gaussian(ctx, 3.0, 64).unwrap()
        );
        assert_eq!(
            draw_rayleigh_channel(ctx, 3).unwrap(),
            draw_rayleigh_channel(ctx, 3).unwrap()
        );
        assert_ne!(
            draw_complex_gaussian(ctx, 3.0, 4).unwrap(),
            draw_complex_gaussian(SeedContext::new(43, 7), 3.0, 4).unwrap()
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        let ctx = SeedContext::new(0, 0);
        assert!(draw_complex_gaussian(ctx, 0.0, 4).is_err());
        assert!(draw_complex_gaussian(ctx, -1.0, 4).is_err());
        assert!(draw_complex_gaussian(ctx, 1.0, 0).is_err());
        assert!(draw_rayleigh_channel(ctx, 0).is_err());
    }

    #[test]
    fn rayleigh_gain_means() {
        for (slots, tol) in [(1usize, 0.003), (2, 0.006)] {
            let (m, _) = mean((0..1_000_000u64).map(|i| {
                draw_rayleigh_channel(SeedContext::new(5, i), slots)
                    .unwrap()
                    .total_gain()
            }));
            assert!((m - slots as f64).abs() < tol, "I={slots}: {m}");
        }
    }

    #[test]
    fn rayleigh_power_is_unit_exponential_ks() {
        let n = 100_000usize;
        let mut g: Vec<f64> = (0..n as u64)
            .map(|i| {
                draw_rayleigh_channel(SeedContext::new(9, i), 1)
                    .unwrap()
                    .total_gain()
            })
            .collect();
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = g
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-x).exp();
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                (cdf - lo).abs().max((hi - cdf).abs())
            })
            .fold(0.0, f64::max);
        // Kolmogorov critical value at significance 0.001: 1.9495 / sqrt(n)
        let crit = 1.9495 / (n as f64).sqrt();
        assert!(d < crit, "D = {d}, critical = {crit}");
    }

    #[test]
    fn adjacent_streams_uncorrelated() {
        let n = 100_000u64;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = SeedContext::new(11, 2 * i)
                    .rng()
                    .sample::<f64, _>(StandardNormal);
                let b = SeedContext::new(11, 2 * i + 1)
                    .rng()
                    .sample::<f64, _>(StandardNormal);
                (a, b)
            })
            .collect();
        let nf = n as f64;
        let ma = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
        let mb = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
        let cov = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / nf;
        let va = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum::<f64>() / nf;
        let vb = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum::<f64>() / nf;
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 3.0 / nf.sqrt(), "{corr}");
    }

    #[test]
    fn child_streams_differ() {
        let ctx = SeedContext::new(3, 10);
        assert_ne!(ctx.child(0), ctx.child(1));
        assert_ne!(ctx.child(0), ctx);
        assert_eq!(ctx.child(4), ctx.child(4));
    }
}
