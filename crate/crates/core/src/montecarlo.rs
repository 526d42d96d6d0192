//! End-to-end BER simulation and the Monte Carlo expectation oracle.
//!
//! Bits are processed in fixed-size chunks. Chunk `c` always covers the same
//! bit indices, and every bit draws from streams keyed on
//! `(master_seed, bit_index)`. Chunks are evaluated in parallel batches but
//! accumulated strictly in index order, and the run stops after the first
//! chunk that brings the error count to `min_errors`. The returned counts
//! therefore do not depend on the number of workers.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{add_awgn_in_place, fade_in_place};
use crate::detect::{
    decide_nc, decide_threshold, energy, threshold_noisemod, threshold_td, threshold_thermod,
};
use crate::error::{Error, Result};
use crate::params::{ChannelRealization, ComplexSample, Scheme, SchemeParams};
use crate::randgen::{draw_gain, rayleigh_coefficients, SeedContext};
use crate::theory::ConditionalBep;
use crate::waveforms::{fill_samples, plan_variances};

/// Bits per scheduling chunk.
pub const CHUNK_BITS: u64 = 4096;

/// Stream tags for the four random draws of one bit.
pub mod stream {
    pub const BIT: u64 = 0;
    pub const CHANNEL: u64 = 1;
    pub const WAVEFORM: u64 = 2;
    pub const NOISE: u64 = 3;
}

const Z_95: f64 = 1.959_963_984_540_054;

/// When to stop simulating one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_errors: 100,
            max_bits: 100_000_000,
        }
    }
}

impl StoppingRule {
    /// Simulates exactly `bits` bits regardless of the error count.
    pub fn fixed(bits: u64) -> Self {
        Self {
            min_errors: u64::MAX,
            max_bits: bits,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if self.min_errors == 0 {
            return Err(Error::InvalidArgument(
                "min_errors must be at least 1".into(),
            ));
        }
        if self.max_bits == 0 {
            return Err(Error::InvalidArgument("max_bits must be at least 1".into()));
        }
        Ok(self)
    }
}

/// Outcome of one simulated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub errors: u64,
    pub trials: u64,
    pub ber: f64,
    /// 95% Wilson score interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
    /// The bit cap was reached before `min_errors` errors.
    pub censored: bool,
}

impl BerEstimate {
    pub fn new(errors: u64, trials: u64, master_seed: u64, censored: bool) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, trials);
        Self {
            errors,
            trials,
            ber: errors as f64 / trials as f64,
            ci_low,
            ci_high,
            master_seed,
            censored,
        }
    }

    /// Binomial standard error at probability `p` for this trial count.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `|ber - p|` measured in binomial standard errors at `p`.
    pub fn z_score(&self, p: f64) -> f64 {
        (self.ber - p).abs() / self.std_error_at(p)
    }

    pub fn overlaps(&self, other: &BerEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Configurable simulator; [`simulate_ber`] covers the common case.
#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    params: SchemeParams,
    rule: StoppingRule,
    master_seed: u64,
    workers: usize,
    fixed_gain: Option<f64>,
}

impl Simulator {
    pub fn new(params: SchemeParams, rule: StoppingRule, master_seed: u64) -> Self {
        Self {
            params,
            rule,
            master_seed,
            workers: 1,
            fixed_gain: None,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Replaces every fading coefficient by the real value `sqrt(gain)`.
    pub fn fixed_gain(mut self, gain: f64) -> Self {
        self.fixed_gain = Some(gain);
        self
    }

    pub fn run(&self) -> Result<BerEstimate> {
        let params = self.params.validate()?;
        let rule = self.rule.validate()?;
        let total_chunks = rule.max_bits.div_ceil(CHUNK_BITS);
        let batch = self.workers as u64;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

        let mut errors = 0u64;
        let mut trials = 0u64;
        let mut next = 0u64;
        'outer: while next < total_chunks {
            let end = (next + batch).min(total_chunks);
            let counts: Vec<Result<(u64, u64)>> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|c| self.run_chunk(&params, c, rule.max_bits))
                    .collect()
            });
            for c in counts {
                let (e, t) = c?;
                errors += e;
                trials += t;
                if errors >= rule.min_errors {
                    break 'outer;
                }
            }
            next = end;
        }
        let censored = errors < rule.min_errors;
        Ok(BerEstimate::new(errors, trials, self.master_seed, censored))
    }

    fn run_chunk(&self, p: &SchemeParams, chunk: u64, max_bits: u64) -> Result<(u64, u64)> {
        let start = chunk * CHUNK_BITS;
        let end = (start + CHUNK_BITS).min(max_bits);
        let mut bit_sim = BitSimulator::new(p, self.fixed_gain)?;
        let mut errors = 0;
        for index in start..end {
            let (sent, decided) = bit_sim.run(SeedContext::new(self.master_seed, index))?;
            errors += u64::from(sent != decided);
        }
        Ok((errors, end - start))
    }
}

/// Simulates `p` until `rule` stops, on `workers` threads.
pub fn simulate_ber(
    p: &SchemeParams,
    rule: StoppingRule,
    master_seed: u64,
    workers: usize,
) -> Result<BerEstimate> {
    Simulator::new(*p, rule, master_seed).workers(workers).run()
}

/// Per-bit transmit/receive chain with reusable buffers.
pub(crate) struct BitSimulator {
    params: SchemeParams,
    levels: [Vec<f64>; 2],
    samples: Vec<ComplexSample>,
    coeffs: Vec<Complex64>,
    fixed_gain: Option<f64>,
}

impl BitSimulator {
    pub(crate) fn new(p: &SchemeParams, fixed_gain: Option<f64>) -> Result<Self> {
        let plan0 = plan_variances(&[0], p)?;
        let plan1 = plan_variances(&[1], p)?;
        Ok(Self {
            params: *p,
            levels: [
                plan0.per_sample_variance().to_vec(),
                plan1.per_sample_variance().to_vec(),
            ],
            samples: Vec::with_capacity(p.n_samples),
            coeffs: Vec::with_capacity(p.n_slots),
            fixed_gain,
        })
    }

    /// Returns `(sent, decided)` for the bit addressed by `ctx`.
    pub(crate) fn run(&mut self, ctx: SeedContext) -> Result<(u8, u8)> {
        let p = &self.params;
        let bit = u8::from(ctx.child(stream::BIT).rng().random::<bool>());

        self.coeffs.clear();
        if p.scheme.is_faded() {
            match self.fixed_gain {
                Some(g) => self.coeffs.extend(std::iter::repeat_n(
                    Complex64::new(g.sqrt(), 0.0),
                    p.n_slots,
                )),
                None => self.coeffs.extend(rayleigh_coefficients(
                    &mut ctx.child(stream::CHANNEL).rng(),
                    p.n_slots,
                )),
            }
        }

        fill_samples(
            &self.levels[bit as usize],
            &mut ctx.child(stream::WAVEFORM).rng(),
            &mut self.samples,
        );
        if p.scheme.is_faded() {
            fade_in_place(&mut self.samples, &self.coeffs, p.n_slots);
        }
        add_awgn_in_place(
            &mut self.samples,
            p.sigma_w_sq,
            &mut ctx.child(stream::NOISE).rng(),
        );

        let decided = match p.scheme {
            Scheme::NcNoiseMod => decide_nc(&self.samples)?,
            scheme => {
                let sigma_hat = energy(&self.samples) / self.samples.len() as f64;
                let threshold = match scheme {
                    Scheme::TherMod => threshold_thermod(p),
                    Scheme::NoiseMod => {
                        threshold_noisemod(p, &ChannelRealization::new(self.coeffs.clone())?)?
                    }
                    _ => threshold_td(p, &ChannelRealization::new(self.coeffs.clone())?)?,
                };
                decide_threshold(sigma_hat, &threshold)
            }
        };
        Ok((bit, decided))
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: u64,
}

impl OracleEstimate {
    /// `|mean - x|` in standard errors.
    pub fn z_score(&self, x: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == x {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - x).abs() / self.std_error
        }
    }
}

/// Averages `conditional` over `draws` i.i.d. Rayleigh gains (exponential for
/// one slot, sum of `I` exponentials for TD). Independent of the quadrature path.
pub fn mc_expectation_oracle(
    conditional: ConditionalBep,
    p: &SchemeParams,
    draws: u64,
    master_seed: u64,
) -> Result<OracleEstimate> {
    if draws < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "oracle needs at least 10^4 draws, got {draws}"
        )));
    }
    let p = p.validate()?;
    if conditional == ConditionalBep::NonCoherent {
        crate::theory::bep_nc_conditional(&p, 0.0)?;
    }
    let shape = conditional.gain_shape(&p);
    let mut rng = SeedContext::new(master_seed, u64::MAX).rng();
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=draws {
        let x = conditional.eval(&p, draw_gain(&mut rng, shape));
        let d = x - mean;
        mean += d / k as f64;
        m2 += d * (x - mean);
    }
    let var = m2 / (draws - 1) as f64;
    Ok(OracleEstimate {
        mean,
        std_error: (var / draws as f64).sqrt(),
        draws,
    })
}

/// Mean total gain seen by the oracle's sampler, for checking its moments.
pub fn mean_oracle_gain(shape: usize, draws: u64, master_seed: u64) -> f64 {
    let mut rng = SeedContext::new(master_seed, u64::MAX).rng();
    (0..draws).map(|_| draw_gain(&mut rng, shape)).sum::<f64>() / draws as f64
}
