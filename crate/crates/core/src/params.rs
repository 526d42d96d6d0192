//! Operating-point parameters, shared sample types and dB helpers.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One complex baseband sample.
pub type ComplexSample = Complex64;

/// The four noise-modulation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Thermal-noise modulation over a pure AWGN channel.
    TherMod,
    /// External-noise modulation over flat Rayleigh fading, genie threshold.
    NoiseMod,
    /// Manchester-style variant with a half-vs-half comparator, no channel knowledge.
    NcNoiseMod,
    /// Each bit spread over `n_slots` independently faded slots.
    TdNoiseMod,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::TherMod,
        Scheme::NoiseMod,
        Scheme::NcNoiseMod,
        Scheme::TdNoiseMod,
    ];

    /// Short lowercase name used by the CLI and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::TherMod => "thermod",
            Scheme::NoiseMod => "noisemod",
            Scheme::NcNoiseMod => "nc-noisemod",
            Scheme::TdNoiseMod => "td-noisemod",
        }
    }

    /// Whether the scheme sees a fading channel.
    pub fn is_faded(self) -> bool {
        !matches!(self, Scheme::TherMod)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "thermod" => Ok(Scheme::TherMod),
            "noisemod" => Ok(Scheme::NoiseMod),
            "nc-noisemod" | "nc" | "ncnoisemod" => Ok(Scheme::NcNoiseMod),
            "td-noisemod" | "td" | "tdnoisemod" => Ok(Scheme::TdNoiseMod),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Full parameter tuple for one operating point.
///
/// `alpha` and `delta` are linear ratios. `alpha = sigma_1^2 / sigma_0^2` and
/// `delta = sigma_0^2 / sigma_w^2`. Values of `alpha <= 1` are accepted but
/// carry no (or inverted) information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub scheme: Scheme,
    pub alpha: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub n_slots: usize,
    pub sigma_w_sq: f64,
}

impl SchemeParams {
    /// Parameters with `sigma_w_sq = 1` and a single slot.
    pub fn new(scheme: Scheme, alpha: f64, delta: f64, n_samples: usize) -> Self {
        Self {
            scheme,
            alpha,
            delta,
            n_samples,
            n_slots: 1,
            sigma_w_sq: 1.0,
        }
    }

    pub fn with_slots(mut self, n_slots: usize) -> Self {
        self.n_slots = n_slots;
        self
    }

    pub fn with_sigma_w_sq(mut self, sigma_w_sq: f64) -> Self {
        self.sigma_w_sq = sigma_w_sq;
        self
    }

    pub fn with_delta_db(mut self, delta_db: f64) -> Self {
        self.delta = db_to_linear(delta_db);
        self
    }

    /// Checks every invariant and returns the parameters unchanged, or the
    /// first violation.
    pub fn validate(self) -> Result<Self> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            ));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return fail(format!(
                "delta must be positive and finite, got {}",
                self.delta
            ));
        }
        if !(self.sigma_w_sq.is_finite() && self.sigma_w_sq > 0.0) {
            return fail(format!(
                "sigma_w_sq must be positive and finite, got {}",
                self.sigma_w_sq
            ));
        }
        if self.n_samples == 0 {
            return fail("N must be at least 1".into());
        }
        if self.n_slots == 0 {
            return fail("I must be at least 1".into());
        }
        match self.scheme {
            Scheme::NcNoiseMod if !self.n_samples.is_multiple_of(2) => fail(format!(
                "NC-NoiseMod splits each bit into two halves; even N required, got N={}",
                self.n_samples
            )),
            Scheme::TdNoiseMod if !self.n_samples.is_multiple_of(self.n_slots) => fail(format!(
                "TD-NoiseMod requires N divisible by I (N={}, I={})",
                self.n_samples, self.n_slots
            )),
            s if s != Scheme::TdNoiseMod && self.n_slots != 1 => {
                fail(format!("{s} requires I = 1, got I={}", self.n_slots))
            }
            _ => Ok(self),
        }
    }

    /// Bit-0 information-noise variance `delta * sigma_w^2`.
    pub fn sigma0_sq(&self) -> f64 {
        self.delta * self.sigma_w_sq
    }

    /// Bit-1 information-noise variance `alpha * delta * sigma_w^2`.
    pub fn sigma1_sq(&self) -> f64 {
        self.alpha * self.delta * self.sigma_w_sq
    }

    /// Information-noise variance for a bit value.
    pub fn level(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.sigma0_sq()
        } else {
            self.sigma1_sq()
        }
    }

    /// Samples per slot (`N / I`).
    pub fn slot_len(&self) -> usize {
        self.n_samples / self.n_slots
    }
}

/// Fading coefficients seen by one bit, one per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    coefficients: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "channel realization needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    /// Real, non-negative coefficients with the given power gains `|h_i|^2`.
    pub fn from_gains(gains: &[f64]) -> Result<Self> {
        if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "gain must be >= 0, got {g}"
            )));
        }
        Self::new(
            gains
                .iter()
                .map(|g| Complex64::new(g.sqrt(), 0.0))
                .collect(),
        )
    }

    /// The flat unit channel.
    pub fn unit() -> Self {
        Self {
            coefficients: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Per-slot power gains `|h_i|^2`.
    pub fn gains(&self) -> impl Iterator<Item = f64> + '_ {
        self.coefficients.iter().map(|h| h.norm_sqr())
    }

    /// Total gain `g = sum |h_i|^2`.
    pub fn total_gain(&self) -> f64 {
        self.gains().sum()
    }
}

/// `10^(x_db / 10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// `10 log10(x)`; `x` must be positive.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(10.0 * x.log10())
    } else {
        Err(Error::InvalidArgument(format!(
            "linear_to_db needs a positive finite value, got {x}"
        )))
    }
}
