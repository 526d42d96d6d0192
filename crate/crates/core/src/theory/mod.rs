//! Bit error probability: closed forms, conditional BEPs under fading, and
//! their expectations over the channel gain by adaptive quadrature.
//!
//! All conditional expressions depend only on `N`, `alpha`, `delta` and the
//! channel gain; `sigma_w^2` cancels and is never read here.

mod qfunc;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

pub use qfunc::q_function;
use quadrature::{integrate_adaptive, Integral};

use crate::error::{Error, Result};
use crate::params::{Scheme, SchemeParams};

/// The two readings of the TD conditional BEP.
///
/// `AsPrinted` plugs the total gain `g = sum |h_i|^2` into the NoiseMod
/// argument. `Rederived` plugs `g / I`, which is what the slot-averaged
/// conditional variances produce; the two agree at `I = 1`. Simulation
/// supports `Rederived`, which is therefore the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TdVariant {
    AsPrinted,
    #[default]
    Rederived,
}

impl TdVariant {
    pub fn name(self) -> &'static str {
        match self {
            TdVariant::AsPrinted => "as-printed",
            TdVariant::Rederived => "rederived",
        }
    }
}

impl fmt::Display for TdVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TdVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "as-printed" | "asprinted" => Ok(TdVariant::AsPrinted),
            "rederived" => Ok(TdVariant::Rederived),
            other => Err(Error::InvalidArgument(format!(
                "unknown TD variant '{other}'"
            ))),
        }
    }
}

#[inline]
fn coherent_argument(n: usize, alpha: f64, delta: f64, gain: f64) -> f64 {
    (n as f64).sqrt() * gain * delta * (alpha - 1.0) / (2.0 + gain * delta * (alpha + 1.0))
}

/// AWGN closed form `Q(sqrt(N) delta (alpha-1) / (2 + delta (alpha+1)))`.
pub fn bep_thermod(p: &SchemeParams) -> f64 {
    q_function(coherent_argument(p.n_samples, p.alpha, p.delta, 1.0))
}

/// Genie-threshold BEP given the power gain `|h|^2`.
pub fn bep_noisemod_conditional(p: &SchemeParams, h_sq: f64) -> f64 {
    q_function(coherent_argument(p.n_samples, p.alpha, p.delta, h_sq))
}

/// Non-coherent half-vs-half BEP given `|h|^2`. `N` must be even.
pub fn bep_nc_conditional(p: &SchemeParams, h_sq: f64) -> Result<f64> {
    if !p.n_samples.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "NC-NoiseMod requires even N, got {}",
            p.n_samples
        )));
    }
    Ok(nc_unchecked(p, h_sq))
}

fn nc_unchecked(p: &SchemeParams, h_sq: f64) -> f64 {
    let low = 1.0 + h_sq * p.delta;
    let high = 1.0 + h_sq * p.delta * p.alpha;
    let arg = (p.n_samples as f64 / 2.0).sqrt() * h_sq * p.delta * (p.alpha - 1.0)
        / (high * high + low * low).sqrt();
    q_function(arg)
}

/// Time-diversity BEP given the total gain `g = sum |h_i|^2`.
pub fn bep_td_conditional(p: &SchemeParams, g: f64, variant: TdVariant) -> f64 {
    let gain = match variant {
        TdVariant::AsPrinted => g,
        TdVariant::Rederived => g / p.n_slots as f64,
    };
    q_function(coherent_argument(p.n_samples, p.alpha, p.delta, gain))
}

/// A conditional BEP as a function of the channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalBep {
    /// Genie threshold, single slot; evaluated at `|h|^2`.
    NoiseMod,
    /// Half-vs-half comparator; evaluated at `|h|^2`.
    NonCoherent,
    /// Slot-averaged genie threshold; evaluated at `g = sum |h_i|^2`.
    TimeDiversity(TdVariant),
    /// Gain-independent value, for normalization checks.
    Constant(f64),
}

impl ConditionalBep {
    pub fn eval(&self, p: &SchemeParams, gain: f64) -> f64 {
        match *self {
            ConditionalBep::NoiseMod => bep_noisemod_conditional(p, gain),
            ConditionalBep::NonCoherent => nc_unchecked(p, gain),
            ConditionalBep::TimeDiversity(v) => bep_td_conditional(p, gain, v),
            ConditionalBep::Constant(c) => c,
        }
    }

    /// Number of unit-exponential terms in the gain this conditional expects.
    pub fn gain_shape(&self, p: &SchemeParams) -> usize {
        match self {
            ConditionalBep::NoiseMod | ConditionalBep::NonCoherent => 1,
            ConditionalBep::TimeDiversity(_) | ConditionalBep::Constant(_) => p.n_slots,
        }
    }

    fn check(&self, p: &SchemeParams) -> Result<()> {
        match self {
            ConditionalBep::NonCoherent => bep_nc_conditional(p, 0.0).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Density of a channel power gain, used as the weight of the expectation.
pub trait GainLaw {
    fn pdf(&self, u: f64) -> f64;
    /// `P(gain > u)`.
    fn tail(&self, u: f64) -> f64;
}

/// Total gain of `slots` i.i.d. Rayleigh coefficients, a chi-square variate
/// with `2 * slots` degrees of freedom scaled to unit mean per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayleighGain {
    pub slots: usize,
}

impl GainLaw for RayleighGain {
    fn pdf(&self, u: f64) -> f64 {
        chi_square_pdf_g(u, self.slots)
    }

    fn tail(&self, u: f64) -> f64 {
        // upper regularized incomplete gamma for integer shape
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..self.slots {
            term *= u / k as f64;
            sum += term;
        }
        (-u).exp() * sum
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `f_g(u) = u^(I-1) e^(-u) / Gamma(I)`.
pub fn chi_square_pdf_g(u: f64, slots: usize) -> f64 {
    if u < 0.0 || slots == 0 {
        return 0.0;
    }
    if slots == 1 {
        return (-u).exp();
    }
    if u == 0.0 {
        return 0.0;
    }
    ((slots - 1) as f64 * u.ln() - u - ln_factorial(slots - 1)).exp()
}

/// Controls for the expectation integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tolerance: f64,
    /// Smallest upper limit; extended while the neglected tail could exceed
    /// `rel_tolerance` of the estimate.
    pub truncation_point: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-10,
            truncation_point: 50.0,
            max_subdivisions: 4000,
        }
    }
}

fn breakpoints(upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend((-8..=0).map(|e| 10f64.powi(e)));
    let mut x = 2.0;
    while x < upper {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(upper);
    pts
}

/// Expectation of `conditional` over an arbitrary gain law.
pub fn bep_unconditional_with<L: GainLaw>(
    p: &SchemeParams,
    conditional: ConditionalBep,
    law: &L,
    quad: &QuadratureSpec,
) -> Result<Integral> {
    conditional.check(p)?;
    if !(quad.rel_tolerance > 0.0 && quad.truncation_point > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid quadrature spec {quad:?}"
        )));
    }
    let integrand = |u: f64| conditional.eval(p, u) * law.pdf(u);
    let mut upper = quad.truncation_point;
    loop {
        let r = integrate_adaptive(
            &integrand,
            &breakpoints(upper),
            quad.rel_tolerance,
            f64::MIN_POSITIVE,
            quad.max_subdivisions,
        )?;
        // conditional BEPs never exceed 1/2
        if 0.5 * law.tail(upper) < quad.rel_tolerance * r.value || upper > 1e4 {
            return Ok(r);
        }
        upper *= 2.0;
    }
}

/// Expectation of `conditional` over Rayleigh fading: exponential `|h|^2`
/// for single-slot conditionals, chi-square with `2I` degrees of freedom for TD.
pub fn bep_unconditional(
    p: &SchemeParams,
    conditional: ConditionalBep,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let law = RayleighGain {
        slots: conditional.gain_shape(p),
    };
    bep_unconditional_with(p, conditional, &law, quad).map(|r| r.value)
}

/// Theoretical BEP of the scheme in `p`: closed form for TherMod, Rayleigh
/// expectation otherwise.
pub fn bep_theory(p: &SchemeParams, variant: TdVariant, quad: &QuadratureSpec) -> Result<f64> {
    let p = p.validate()?;
    match p.scheme {
        Scheme::TherMod => Ok(bep_thermod(&p)),
        Scheme::NoiseMod => bep_unconditional(&p, ConditionalBep::NoiseMod, quad),
        Scheme::NcNoiseMod => bep_unconditional(&p, ConditionalBep::NonCoherent, quad),
        Scheme::TdNoiseMod => bep_unconditional(&p, ConditionalBep::TimeDiversity(variant), quad),
    }
}

/// High-`delta` reference slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// `1 / (N delta)`
    NoDiversity,
    /// `10^(1-I) / (N delta^I)`
    TimeDiversity,
}

pub fn reference_curve(kind: ReferenceKind, n: usize, delta: f64, slots: usize) -> f64 {
    match kind {
        ReferenceKind::NoDiversity => 1.0 / (n as f64 * delta),
        ReferenceKind::TimeDiversity => {
            let i = slots as i32;
            10f64.powi(1 - i) / (n as f64 * delta.powi(i))
        }
    }
}
