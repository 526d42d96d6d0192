//! Flat `key = value` run configuration for sweeps.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; a missing
//! key keeps the value of the base sweep (a built-in figure if `figure` is
//! set, otherwise an empty delta sweep). Unknown keys are rejected.
//!
//! ```text
//! figure = 4
//! axis_values = 0, 2, 4
//! curves = noisemod n=100; td-noisemod i=2 n=150
//! outputs = theory, sim
//! seed = 7
//! ```

use std::fmt::Write;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::{Axis, CurveSpec, Outputs, SweepSpec};
use crate::params::{db_to_linear, linear_to_db, Scheme, SchemeParams};
use crate::theory::TdVariant;

/// Master seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 20_190_101;

/// Documented keys, in serialization order.
pub const KEYS: [&str; 18] = [
    "figure",
    "name",
    "axis",
    "axis_values",
    "curves",
    "alpha",
    "n",
    "delta_db",
    "sigma_w_sq",
    "outputs",
    "min_errors",
    "max_bits",
    "seed",
    "workers",
    "td_variant",
    "both_td_variants",
    "rel_tolerance",
    "out",
];

/// A partially specified sweep. `None` means "keep the base value".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub figure: Option<u32>,
    pub name: Option<String>,
    pub axis: Option<Axis>,
    pub axis_values: Option<Vec<f64>>,
    pub curves: Option<Vec<CurveSpec>>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub delta_db: Option<f64>,
    pub sigma_w_sq: Option<f64>,
    pub outputs: Option<Outputs>,
    pub min_errors: Option<u64>,
    pub max_bits: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub td_variant: Option<TdVariant>,
    pub both_td_variants: Option<bool>,
    pub rel_tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("bad value for '{key}': '{v}'")))
}

/// Accepts plain integers and `1e8`-style values.
fn parse_count(key: &str, v: &str) -> Result<u64> {
    if let Ok(x) = v.parse::<u64>() {
        return Ok(x);
    }
    let x: f64 = parse_num(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(Error::Config(format!("bad value for '{key}': '{v}'")))
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("bad value for '{key}': '{v}'"))),
    }
}

fn parse_outputs(v: &str) -> Result<Outputs> {
    let mut o = Outputs {
        theory: false,
        sim: false,
        reference: false,
    };
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "theory" => o.theory = true,
            "sim" => o.sim = true,
            "reference" => o.reference = true,
            other => return Err(Error::Config(format!("unknown output kind '{other}'"))),
        }
    }
    Ok(o)
}

fn outputs_text(o: Outputs) -> String {
    let mut v = Vec::new();
    if o.theory {
        v.push("theory");
    }
    if o.sim {
        v.push("sim");
    }
    if o.reference {
        v.push("reference");
    }
    v.join(", ")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            c.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        }
        Ok(c)
    }

    pub fn from_file(path: &std::path::Path) -> std::io::Result<Result<Self>> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "figure" => self.figure = Some(parse_num(key, v)?),
            "name" => {
                if v.is_empty() || v.contains(['/', '\\']) {
                    return Err(Error::Config(format!("bad sweep name '{v}'")));
                }
                self.name = Some(v.to_string())
            }
            "axis" => self.axis = Some(v.parse()?),
            "axis_values" => {
                self.axis_values = Some(
                    v.split(',')
                        .map(|x| parse_num(key, x.trim()))
                        .collect::<Result<_>>()?,
                )
            }
            "curves" => {
                self.curves = Some(
                    v.split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?,
                )
            }
            "alpha" => self.alpha = Some(parse_num(key, v)?),
            "n" => self.n = Some(parse_num(key, v)?),
            "delta_db" => self.delta_db = Some(parse_num(key, v)?),
            "sigma_w_sq" => self.sigma_w_sq = Some(parse_num(key, v)?),
            "outputs" => self.outputs = Some(parse_outputs(v)?),
            "min_errors" => self.min_errors = Some(parse_count(key, v)?),
            "max_bits" => self.max_bits = Some(parse_count(key, v)?),
            "seed" => self.seed = Some(parse_num(key, v)?),
            "workers" => self.workers = Some(parse_num(key, v)?),
            "td_variant" => {
                self.td_variant = Some(v.parse().map_err(|e: Error| Error::Config(strip(e)))?)
            }
            "both_td_variants" => self.both_td_variants = Some(parse_bool(key, v)?),
            "rel_tolerance" => self.rel_tolerance = Some(parse_num(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(mut self, other: &RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            figure,
            name,
            axis,
            axis_values,
            curves,
            alpha,
            n,
            delta_db,
            sigma_w_sq,
            outputs,
            min_errors,
            max_bits,
            seed,
            workers,
            td_variant,
            both_td_variants,
            rel_tolerance,
            out
        );
        self
    }

    /// Resolves the configuration into a validated sweep.
    pub fn to_sweep_spec(&self) -> Result<SweepSpec> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let mut s = match self.figure {
            Some(f) => SweepSpec::figure(f, seed)?,
            None => SweepSpec::new(
                "sweep",
                Axis::DeltaDb,
                Vec::new(),
                SchemeParams::new(Scheme::NoiseMod, 10.0, 1.0, 100),
            ),
        };
        s.master_seed = seed;
        if let Some(n) = &self.name {
            s.name = n.clone();
        }
        if let Some(a) = self.axis {
            s.axis = a;
        }
        if let Some(v) = &self.axis_values {
            s.axis_values = v.clone();
        }
        if let Some(c) = &self.curves {
            s.curves = c.clone();
        }
        if let Some(a) = self.alpha {
            s.fixed.alpha = a;
        }
        if let Some(n) = self.n {
            s.fixed.n_samples = n;
        }
        if let Some(d) = self.delta_db {
            s.fixed.delta = db_to_linear(d);
        }
        if let Some(w) = self.sigma_w_sq {
            s.fixed.sigma_w_sq = w;
        }
        if let Some(o) = self.outputs {
            s.outputs = o;
        }
        if let Some(m) = self.min_errors {
            s.stopping.min_errors = m;
        }
        if let Some(m) = self.max_bits {
            s.stopping.max_bits = m;
        }
        if let Some(w) = self.workers {
            if w == 0 {
                return Err(Error::Config("workers must be at least 1".into()));
            }
            s.workers = w;
        }
        if let Some(v) = self.td_variant {
            s.td_variant = v;
        }
        if let Some(b) = self.both_td_variants {
            s.both_td_variants = b;
        }
        if let Some(t) = self.rel_tolerance {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!(
                    "rel_tolerance must be in (0, 1), got {t}"
                )));
            }
            s.quadrature.rel_tolerance = t;
        }
        s.validate().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(strip(other)),
        })?;
        Ok(s)
    }

    /// Full configuration describing `spec`, suitable for `parse`.
    pub fn from_sweep_spec(spec: &SweepSpec, out: Option<PathBuf>) -> Self {
        RunConfig {
            figure: None,
            name: Some(spec.name.clone()),
            axis: Some(spec.axis),
            axis_values: Some(spec.axis_values.clone()),
            curves: Some(spec.curves.clone()),
            alpha: Some(spec.fixed.alpha),
            n: Some(spec.fixed.n_samples),
            delta_db: linear_to_db(spec.fixed.delta).ok(),
            sigma_w_sq: Some(spec.fixed.sigma_w_sq),
            outputs: Some(spec.outputs),
            min_errors: Some(spec.stopping.min_errors),
            max_bits: Some(spec.stopping.max_bits),
            seed: Some(spec.master_seed),
            workers: Some(spec.workers),
            td_variant: Some(spec.td_variant),
            both_td_variants: Some(spec.both_td_variants),
            rel_tolerance: Some(spec.quadrature.rel_tolerance),
            out,
        }
    }

    /// Serializes the set fields as `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(t, "{k} = {v}");
            }
        };
        let join = |xs: &Vec<f64>| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        put("figure", self.figure.map(|x| x.to_string()));
        put("name", self.name.clone());
        put("axis", self.axis.map(|x| x.to_string()));
        put("axis_values", self.axis_values.as_ref().map(join));
        put(
            "curves",
            self.curves.as_ref().map(|c| {
                c.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            }),
        );
        put("alpha", self.alpha.map(|x| x.to_string()));
        put("n", self.n.map(|x| x.to_string()));
        put("delta_db", self.delta_db.map(|x| x.to_string()));
        put("sigma_w_sq", self.sigma_w_sq.map(|x| x.to_string()));
        put("outputs", self.outputs.map(outputs_text));
        put("min_errors", self.min_errors.map(|x| x.to_string()));
        put("max_bits", self.max_bits.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("workers", self.workers.map(|x| x.to_string()));
        put("td_variant", self.td_variant.map(|x| x.to_string()));
        put(
            "both_td_variants",
            self.both_td_variants.map(|x| x.to_string()),
        );
        put("rel_tolerance", self.rel_tolerance.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        t
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
