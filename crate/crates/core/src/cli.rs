//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad flags, 3 invalid parameters or
//! configuration, 4 quadrature did not converge.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, DEFAULT_SEED};
use crate::error::Error;
use crate::experiments::{run_sweep, to_svg, Axis, SweepSpec};
use crate::montecarlo::{Simulator, StoppingRule};
use crate::params::{Scheme, SchemeParams};
use crate::randgen::SeedContext;
use crate::theory::{bep_theory, QuadratureSpec, TdVariant};
use crate::waveforms::{generate_bit_samples, plan_variances, waveform_csv};

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_QUADRATURE: u8 = 4;

/// Below this block length the Gaussian approximation behind the detectors
/// and the closed forms gets rough.
const CLT_WARN_N: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "noisemod",
    version,
    about = "Noise-modulation BER/BEP analysis and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the theoretical bit error probability at one operating point.
    Theory {
        #[command(flatten)]
        point: PointArgs,
        /// Relative tolerance of the fading expectation integral.
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Simulate the bit error rate at one operating point.
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        /// Stop once this many errors are counted.
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        /// Stop after this many bits even if `--min-errors` is not reached.
        #[arg(long, default_value_t = 100_000_000)]
        max_bits: u64,
        /// Master seed; fully determines the result.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Worker threads [default: available parallelism].
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a built-in figure sweep or one described by a config file.
    Sweep(SweepArgs),
    /// Export transmitted noise waveforms for a bit string as CSV.
    Waveform {
        /// Bits to send, e.g. 0110.
        #[arg(long)]
        bits: String,
        #[command(flatten)]
        point: PointArgs,
        /// Master seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output file [default: standard output].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// thermod, noisemod, nc-noisemod or td-noisemod.
    #[arg(long, default_value = "noisemod")]
    pub scheme: Scheme,
    /// Samples per bit (N).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// sigma_0^2 / sigma_w^2 in dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_db: f64,
    /// sigma_1^2 / sigma_0^2 (linear).
    #[arg(long, default_value_t = 10.0)]
    pub alpha: f64,
    /// Fading slots per bit (I); TD-NoiseMod only.
    #[arg(long, default_value_t = 1)]
    pub slots: usize,
    /// AWGN variance sigma_w^2.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_w_sq: f64,
    /// TD closed form: rederived (g/I) or as-printed (g).
    #[arg(long, default_value = "rederived")]
    pub td_variant: TdVariant,
}

impl PointArgs {
    fn params(&self) -> crate::Result<SchemeParams> {
        SchemeParams::new(self.scheme, self.alpha, 1.0, self.n)
            .with_delta_db(self.delta_db)
            .with_slots(self.slots)
            .with_sigma_w_sq(self.sigma_w_sq)
            .validate()
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Built-in figure sweep: 3, 4 or 5.
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..=5))]
    pub figure: Option<u32>,
    /// Flat `key = value` sweep configuration; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: results].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also report the non-default TD closed form as its own series.
    #[arg(long)]
    pub both_td_variants: bool,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Master seed [default: 20190101].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Errors per simulated point [default: 100].
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Bit cap per simulated point [default: 100000000].
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Skip Monte Carlo cells.
    #[arg(long)]
    pub no_sim: bool,
}

enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn warn_small_n(n: usize) {
    if n < CLT_WARN_N {
        eprintln!(
            "warning: N = {n} is below {CLT_WARN_N}; the Gaussian approximation behind the detector and theory may be inaccurate"
        );
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn std::io::Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::QuadratureDiverged { .. } => EXIT_QUADRATURE,
                _ => EXIT_INVALID,
            })
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn std::io::Write) -> Result<(), Failure> {
    let stdout_path = Path::new("<stdout>");
    match cmd {
        Command::Theory { point, rel_tol } => {
            let p = point.params()?;
            warn_small_n(p.n_samples);
            let quad = QuadratureSpec {
                rel_tolerance: rel_tol,
                ..QuadratureSpec::default()
            };
            let v = bep_theory(&p, point.td_variant, &quad)?;
            io(stdout_path, writeln!(stdout, "{v:e}"))?;
        }
        Command::Simulate {
            point,
            min_errors,
            max_bits,
            seed,
            workers,
        } => {
            let p = point.params()?;
            warn_small_n(p.n_samples);
            let est = Simulator::new(
                p,
                StoppingRule {
                    min_errors,
                    max_bits,
                },
                seed,
            )
            .workers(workers.unwrap_or_else(default_workers))
            .run()?;
            io(
                stdout_path,
                writeln!(
                    stdout,
                    "ber = {:e}\nci95 = [{:e}, {:e}]\nerrors = {}\nbits = {}\ncensored = {}\nseed = {}",
                    est.ber, est.ci_low, est.ci_high, est.errors, est.trials, est.censored, seed
                ),
            )?;
        }
        Command::Sweep(args) => sweep(args, stdout)?,
        Command::Waveform {
            bits,
            point,
            seed,
            out,
        } => {
            let bits: Vec<u8> = bits
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::InvalidArgument(format!(
                        "bit string may only contain 0 and 1, got '{other}'"
                    ))),
                })
                .collect::<crate::Result<_>>()?;
            let p = point.params()?;
            warn_small_n(p.n_samples);
            let plan = plan_variances(&bits, &p)?;
            let samples = generate_bit_samples(&plan, SeedContext::new(seed, 0));
            let csv = waveform_csv(&plan, &samples);
            match out {
                Some(path) => io(&path, std::fs::write(&path, csv))?,
                None => io(stdout_path, stdout.write_all(csv.as_bytes()))?,
            }
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs, stdout: &mut dyn std::io::Write) -> Result<(), Failure> {
    let base = match &args.config {
        Some(path) => io(path, RunConfig::from_file(path))??,
        None => RunConfig::default(),
    };
    if args.figure.is_none() && base.figure.is_none() && args.config.is_none() {
        return Err(Error::Config("sweep needs --figure or --config".into()).into());
    }
    let flags = RunConfig {
        figure: args.figure,
        seed: args.seed,
        workers: args.workers,
        min_errors: args.min_errors,
        max_bits: args.max_bits,
        both_td_variants: args.both_td_variants.then_some(true),
        out: args.out.clone(),
        ..RunConfig::default()
    };
    let cfg = base.overridden_by(&flags);
    let mut spec: SweepSpec = cfg.to_sweep_spec()?;
    if cfg.workers.is_none() {
        spec.workers = default_workers();
    }
    if args.no_sim {
        spec.outputs.sim = false;
    }
    let min_n = spec
        .curves
        .iter()
        .flat_map(|c| {
            spec.axis_values
                .iter()
                .filter_map(|&x| c.params_at(&spec.fixed, spec.axis, x).ok())
        })
        .map(|p| p.n_samples)
        .min()
        .unwrap_or(CLT_WARN_N);
    warn_small_n(min_n);

    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    io(&out_dir, std::fs::create_dir_all(&out_dir))?;
    let result = run_sweep(&spec)?;

    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    io(&csv_path, std::fs::write(&csv_path, result.to_csv()))?;
    let meta_path = out_dir.join(format!("{}.meta.txt", spec.name));
    io(
        &meta_path,
        std::fs::write(&meta_path, result.metadata_text()),
    )?;
    let cfg_path = out_dir.join(format!("{}.config.txt", spec.name));
    let resolved = RunConfig::from_sweep_spec(&spec, Some(out_dir.clone()));
    io(&cfg_path, std::fs::write(&cfg_path, resolved.to_text()))?;
    let x_label = match spec.axis {
        Axis::DeltaDb => "delta (dB)",
        Axis::N => "N (samples per bit)",
    };
    let svg_path = out_dir.join(format!("{}.svg", spec.name));
    io(
        &svg_path,
        std::fs::write(&svg_path, to_svg(&result.rows, &spec.name, x_label)),
    )?;

    for p in [&csv_path, &svg_path, &meta_path, &cfg_path] {
        io(
            Path::new("<stdout>"),
            writeln!(stdout, "wrote {}", p.display()),
        )?;
    }
    Ok(())
}
