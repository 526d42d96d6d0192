//! Declarative BER/BEP sweeps and the three standard figures.
//!
//! A sweep evaluates a list of curves along one axis (`delta` in dB, or `N`).
//! Each curve contributes theory, simulation and reference cells as requested.
//! Results go to a long-format CSV plus an SVG plot.

mod plot;
pub mod table;

use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

pub use plot::to_svg;
pub use table::{from_csv, to_csv, Cell, CellKind, SweepRow, CSV_HEADER};

use crate::error::{Error, Result};
use crate::montecarlo::{Simulator, StoppingRule};
use crate::params::{db_to_linear, Scheme, SchemeParams};
use crate::theory::{bep_theory, reference_curve, QuadratureSpec, ReferenceKind, TdVariant};

/// Sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    DeltaDb,
    N,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DeltaDb => "delta-db",
            Axis::N => "n",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delta-db" | "delta_db" | "delta" => Ok(Axis::DeltaDb),
            "n" => Ok(Axis::N),
            other => Err(Error::Config(format!("unknown axis '{other}'"))),
        }
    }
}

/// One curve: a scheme plus the parameters it pins beyond the sweep template.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    pub scheme: Scheme,
    pub n_slots: usize,
    /// Overrides the template's `N` (ignored on the `N` axis).
    pub n_samples: Option<usize>,
    /// Overrides the template's `delta` in dB (ignored on the `delta` axis).
    pub delta_db: Option<f64>,
}

impl CurveSpec {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            n_slots: 1,
            n_samples: None,
            delta_db: None,
        }
    }

    pub fn slots(mut self, n_slots: usize) -> Self {
        self.n_slots = n_slots;
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n_samples = Some(n);
        self
    }

    pub fn delta_db(mut self, delta_db: f64) -> Self {
        self.delta_db = Some(delta_db);
        self
    }

    /// Series label used in CSV and plot legends.
    pub fn label(&self) -> String {
        let mut s = self.scheme.name().to_string();
        if self.scheme == Scheme::TdNoiseMod {
            s.push_str(&format!(" I={}", self.n_slots));
        }
        if let Some(n) = self.n_samples {
            s.push_str(&format!(" N={n}"));
        }
        if let Some(d) = self.delta_db {
            s.push_str(&format!(" delta={d}dB"));
        }
        s
    }

    /// Concrete parameters at one axis value.
    pub fn params_at(&self, template: &SchemeParams, axis: Axis, x: f64) -> Result<SchemeParams> {
        let mut p = SchemeParams {
            scheme: self.scheme,
            n_slots: self.n_slots,
            ..*template
        };
        if let Some(n) = self.n_samples {
            p.n_samples = n;
        }
        if let Some(d) = self.delta_db {
            p.delta = db_to_linear(d);
        }
        match axis {
            Axis::DeltaDb => p.delta = db_to_linear(x),
            Axis::N => {
                if !(x >= 1.0 && x.fract() == 0.0) {
                    return Err(Error::Config(format!(
                        "N axis value {x} is not a positive integer"
                    )));
                }
                p.n_samples = x as usize;
            }
        }
        p.validate()
    }
}

impl fmt::Display for CurveSpec {
    /// Inverse of `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.scheme.name())?;
        if self.n_slots != 1 {
            write!(f, " i={}", self.n_slots)?;
        }
        if let Some(n) = self.n_samples {
            write!(f, " n={n}")?;
        }
        if let Some(d) = self.delta_db {
            write!(f, " delta_db={d}")?;
        }
        Ok(())
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    /// `scheme [i=I] [n=N] [delta_db=D]`, e.g. `td-noisemod i=2 n=150`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let scheme: Scheme = parts
            .next()
            .ok_or_else(|| Error::Config("empty curve definition".into()))?
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        let mut curve = CurveSpec::new(scheme);
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in curve, got '{kv}'")))?;
            let bad = |_| Error::Config(format!("bad value in curve field '{kv}'"));
            match k.to_ascii_lowercase().as_str() {
                "i" | "slots" => curve.n_slots = v.parse().map_err(bad)?,
                "n" => curve.n_samples = Some(v.parse().map_err(bad)?),
                "delta_db" | "delta-db" => {
                    curve.delta_db =
                        Some(v.parse().map_err(|_| {
                            Error::Config(format!("bad value in curve field '{kv}'"))
                        })?)
                }
                other => return Err(Error::Config(format!("unknown curve field '{other}'"))),
            }
        }
        Ok(curve)
    }
}

/// Which cell kinds a sweep emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub theory: bool,
    pub sim: bool,
    pub reference: bool,
}

/// Full description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub curves: Vec<CurveSpec>,
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub fixed: SchemeParams,
    pub outputs: Outputs,
    pub stopping: StoppingRule,
    pub master_seed: u64,
    pub workers: usize,
    pub quadrature: QuadratureSpec,
    /// TD variant reported as the plain `theory` series.
    pub td_variant: TdVariant,
    /// Also emit the other TD variant as a separately labelled series.
    pub both_td_variants: bool,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

impl SweepSpec {
    /// Empty sweep (no curves) emitting theory and simulation cells.
    pub fn new(name: &str, axis: Axis, axis_values: Vec<f64>, fixed: SchemeParams) -> Self {
        Self {
            name: name.to_string(),
            curves: Vec::new(),
            axis,
            axis_values,
            fixed,
            outputs: Outputs {
                theory: true,
                sim: true,
                reference: false,
            },
            stopping: StoppingRule::default(),
            master_seed: 1,
            workers: 1,
            quadrature: QuadratureSpec::default(),
            td_variant: TdVariant::default(),
            both_td_variants: false,
        }
    }

    /// Numerical BEP of every scheme versus `delta`, `N = 120`.
    pub fn fig3(seed: u64) -> Self {
        let mut s = Self::new(
            "fig3",
            Axis::DeltaDb,
            grid(-10.0, 10.0, 2.0),
            SchemeParams::new(Scheme::NoiseMod, 10.0, 1.0, 120),
        );
        s.curves = vec![
            CurveSpec::new(Scheme::TherMod),
            CurveSpec::new(Scheme::NoiseMod),
            CurveSpec::new(Scheme::NcNoiseMod),
        ];
        s.curves
            .extend((2..=5).map(|i| CurveSpec::new(Scheme::TdNoiseMod).slots(i)));
        s.outputs = Outputs {
            theory: true,
            sim: false,
            reference: true,
        };
        s.both_td_variants = true;
        s.master_seed = seed;
        s
    }

    /// Theory against simulation for NoiseMod and TD (`I = 2`), `N` in {100, 150}.
    pub fn fig4(seed: u64) -> Self {
        let mut s = Self::new(
            "fig4",
            Axis::DeltaDb,
            grid(0.0, 14.0, 1.0),
            SchemeParams::new(Scheme::NoiseMod, 10.0, 1.0, 100),
        );
        for n in [100, 150] {
            s.curves.push(CurveSpec::new(Scheme::NoiseMod).n(n));
            s.curves
                .push(CurveSpec::new(Scheme::TdNoiseMod).slots(2).n(n));
        }
        s.master_seed = seed;
        s
    }

    /// BER versus `N` for NoiseMod, NC and TD (`I = 2`) at 6 and 12 dB.
    pub fn fig5(seed: u64) -> Self {
        let mut s = Self::new(
            "fig5",
            Axis::N,
            grid(100.0, 300.0, 20.0),
            SchemeParams::new(Scheme::NoiseMod, 10.0, 1.0, 100),
        );
        for d in [6.0, 12.0] {
            s.curves.push(CurveSpec::new(Scheme::NoiseMod).delta_db(d));
            s.curves
                .push(CurveSpec::new(Scheme::NcNoiseMod).delta_db(d));
            s.curves
                .push(CurveSpec::new(Scheme::TdNoiseMod).slots(2).delta_db(d));
        }
        s.master_seed = seed;
        s
    }

    pub fn figure(number: u32, seed: u64) -> Result<Self> {
        match number {
            3 => Ok(Self::fig3(seed)),
            4 => Ok(Self::fig4(seed)),
            5 => Ok(Self::fig5(seed)),
            other => Err(Error::Config(format!(
                "no built-in sweep for figure {other}"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(Error::Config("axis_values is empty".into()));
        }
        if self
            .axis_values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Config(
                "axis_values must be strictly increasing".into(),
            ));
        }
        if self.curves.is_empty() {
            return Err(Error::Config("no curves defined".into()));
        }
        self.stopping.validate()?;
        for c in &self.curves {
            for &x in &self.axis_values {
                c.params_at(&self.fixed, self.axis, x)?;
            }
        }
        Ok(())
    }
}

/// Sweep output: the table plus a parameter echo.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: Vec<(String, String)>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        to_csv(&self.rows)
    }

    /// `key = value` lines describing how the table was produced.
    pub fn metadata_text(&self) -> String {
        self.metadata
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// `(axis, value)` points of one series, skipping axis values where it is absent.
    pub fn series(&self, label: &str, kind: CellKind) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.find(label, kind).map(|c| (r.axis, c.value)))
            .collect()
    }

    pub fn cells(&self, label: &str, kind: CellKind) -> Vec<(f64, &Cell)> {
        self.rows
            .iter()
            .filter_map(|r| r.find(label, kind).map(|c| (r.axis, c)))
            .collect()
    }
}

fn variant_label(base: &str, v: TdVariant) -> String {
    format!("{base} {}", v.name())
}

/// Runs every curve at every axis value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.axis_values.len());
    for &x in &spec.axis_values {
        let mut cells = Vec::new();
        for curve in &spec.curves {
            let p = curve.params_at(&spec.fixed, spec.axis, x)?;
            let label = curve.label();
            if spec.outputs.theory {
                cells.push(theory_cell(
                    label.clone(),
                    bep_theory(&p, spec.td_variant, &spec.quadrature)?,
                ));
                if spec.both_td_variants && p.scheme == Scheme::TdNoiseMod {
                    for v in [TdVariant::AsPrinted, TdVariant::Rederived] {
                        if v != spec.td_variant {
                            let value = bep_theory(&p, v, &spec.quadrature)?;
                            cells.push(theory_cell(variant_label(&label, v), value));
                        }
                    }
                }
            }
            if spec.outputs.reference {
                let value = match p.scheme {
                    Scheme::TherMod => None,
                    Scheme::TdNoiseMod => Some(reference_curve(
                        ReferenceKind::TimeDiversity,
                        p.n_samples,
                        p.delta,
                        p.n_slots,
                    )),
                    _ => Some(reference_curve(
                        ReferenceKind::NoDiversity,
                        p.n_samples,
                        p.delta,
                        1,
                    )),
                };
                if let Some(value) = value {
                    cells.push(Cell {
                        series: label.clone(),
                        kind: CellKind::Reference,
                        value,
                        ci: None,
                        censored: false,
                    });
                }
            }
            if spec.outputs.sim {
                let est = Simulator::new(p, spec.stopping, spec.master_seed)
                    .workers(spec.workers)
                    .run()?;
                cells.push(Cell {
                    series: label.clone(),
                    kind: CellKind::Sim,
                    value: est.ber,
                    ci: Some((est.ci_low, est.ci_high)),
                    censored: est.censored,
                });
            }
        }
        rows.push(SweepRow { axis: x, cells });
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let curves: Vec<String> = spec.curves.iter().map(CurveSpec::label).collect();
    let metadata = vec![
        ("name".to_string(), spec.name.clone()),
        ("seed".to_string(), spec.master_seed.to_string()),
        ("axis".to_string(), spec.axis.to_string()),
        ("axis_values".to_string(), join(&spec.axis_values)),
        ("curves".to_string(), curves.join("; ")),
        ("alpha".to_string(), spec.fixed.alpha.to_string()),
        ("n".to_string(), spec.fixed.n_samples.to_string()),
        ("delta".to_string(), spec.fixed.delta.to_string()),
        ("sigma_w_sq".to_string(), spec.fixed.sigma_w_sq.to_string()),
        (
            "min_errors".to_string(),
            spec.stopping.min_errors.to_string(),
        ),
        ("max_bits".to_string(), spec.stopping.max_bits.to_string()),
        ("td_variant".to_string(), spec.td_variant.to_string()),
        (
            "rel_tolerance".to_string(),
            spec.quadrature.rel_tolerance.to_string(),
        ),
        ("unix_time".to_string(), timestamp.to_string()),
    ];
    Ok(SweepResult { rows, metadata })
}

fn theory_cell(series: String, value: f64) -> Cell {
    Cell {
        series,
        kind: CellKind::Theory,
        value,
        ci: None,
        censored: false,
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn run_fig3(seed: u64) -> Result<SweepResult> {
    run_sweep(&SweepSpec::fig3(seed))
}

pub fn run_fig4(seed: u64) -> Result<SweepResult> {
    run_sweep(&SweepSpec::fig4(seed))
}

pub fn run_fig5(seed: u64) -> Result<SweepResult> {
    run_sweep(&SweepSpec::fig5(seed))
}

/// Axis value where a decreasing curve crosses `level`, by linear
/// interpolation of `log10(value)` between neighbouring points.
pub fn axis_at_level(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let target = level.log10();
    points.windows(2).find_map(|w| {
        let (x0, y0) = (w[0].0, w[0].1.log10());
        let (x1, y1) = (w[1].0, w[1].1.log10());
        if (y0 - target) * (y1 - target) <= 0.0 && y0 != y1 {
            Some(x0 + (target - y0) * (x1 - x0) / (y1 - y0))
        } else {
            None
        }
    })
}

/// Least-squares slope of `log10(value)` against `log10(linear delta)` for
/// points given in dB.
pub fn log_log_slope(points_db: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points_db.iter().map(|(d, _)| d / 10.0).collect();
    let ys: Vec<f64> = points_db.iter().map(|(_, v)| v.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
