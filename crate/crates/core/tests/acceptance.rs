//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance` (release-level
//! optimization is configured for the test profile; the Monte Carlo part
//! takes a few minutes on one core).

use std::time::Instant;

use noisemod::channel::{apply_awgn, apply_fading};
use noisemod::detect::{
    decide_nc, decide_threshold, sample_variance, threshold_noisemod, threshold_td,
    threshold_thermod,
};
use noisemod::experiments::{log_log_slope, run_sweep, CurveSpec, SweepSpec};
use noisemod::montecarlo::{mc_expectation_oracle, BerEstimate, Simulator, StoppingRule};
use noisemod::params::{Scheme, SchemeParams};
use noisemod::randgen::{draw_rayleigh_channel, SeedContext};
use noisemod::theory::quadrature::integrate_adaptive;
use noisemod::theory::{
    bep_theory, bep_thermod, chi_square_pdf_g, reference_curve, ConditionalBep, QuadratureSpec,
    ReferenceKind, TdVariant,
};
use noisemod::waveforms::{generate_bit_samples, plan_variances};
use num_complex::Complex64;
use rand::Rng;

const ALPHA: f64 = 10.0;
const Z_MAX: f64 = 3.0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn point(scheme: Scheme, n: usize, delta_db: f64) -> SchemeParams {
    SchemeParams::new(scheme, ALPHA, 1.0, n).with_delta_db(delta_db)
}

fn theory(p: &SchemeParams, v: TdVariant) -> f64 {
    bep_theory(p, v, &quad()).expect("quadrature converges")
}

/// Standard stopping rule of the theory/simulation comparisons.
fn simulate(p: &SchemeParams, seed: u64) -> BerEstimate {
    let rule = StoppingRule {
        min_errors: 100,
        max_bits: 100_000_000,
    };
    Simulator::new(*p, rule, seed)
        .workers(workers())
        .run()
        .expect("valid point")
}

fn fading_grid() -> Vec<(usize, f64)> {
    let mut g = Vec::new();
    for n in [100, 150] {
        for d in (0..=12).step_by(2) {
            g.push((n, d as f64));
        }
    }
    g
}

fn criterion_1() -> Outcome {
    let grid = fading_grid();
    let mut within = 0;
    let mut worst = (0.0, 0, 0.0);
    for (k, &(n, d)) in grid.iter().enumerate() {
        let p = point(Scheme::NoiseMod, n, d);
        let est = simulate(&p, 1_000 + k as u64);
        let z = est.z_score(theory(&p, TdVariant::default()));
        if z <= Z_MAX {
            within += 1;
        }
        if z > worst.0 {
            worst = (z, n, d);
        }
    }
    let frac = within as f64 / grid.len() as f64;
    outcome(
        frac >= 0.9,
        format!(
            "NoiseMod sim vs quadrature: {within}/{} points within {Z_MAX} s.e. (worst z={:.2} at N={}, {} dB)",
            grid.len(),
            worst.0,
            worst.1,
            worst.2
        ),
    )
}

fn criterion_2() -> Outcome {
    let grid = fading_grid();
    let variants = [TdVariant::AsPrinted, TdVariant::Rederived];
    let mut within = [0usize; 2];
    for (k, &(n, d)) in grid.iter().enumerate() {
        let p = point(Scheme::TdNoiseMod, n, d).with_slots(2);
        let est = simulate(&p, 2_000 + k as u64);
        for (v, count) in variants.iter().zip(within.iter_mut()) {
            if est.z_score(theory(&p, *v)) <= Z_MAX {
                *count += 1;
            }
        }
    }
    let passes: Vec<TdVariant> = variants
        .iter()
        .zip(within)
        .filter(|(_, c)| *c as f64 >= 0.9 * grid.len() as f64)
        .map(|(v, _)| *v)
        .collect();
    let ok = passes == [TdVariant::default()];
    outcome(
        ok,
        format!(
            "TD I=2 arbitration: as-printed {}/{}, rederived {}/{} within {Z_MAX} s.e.; passing {:?}, default {}",
            within[0],
            grid.len(),
            within[1],
            grid.len(),
            passes.iter().map(|v| v.name()).collect::<Vec<_>>(),
            TdVariant::default()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = (0.0f64, 0.0);
    for k in 0..=20 {
        let d = k as f64 * 0.5;
        let nm = theory(&point(Scheme::NoiseMod, 120, d), TdVariant::default());
        let nc = theory(&point(Scheme::NcNoiseMod, 120, d), TdVariant::default());
        let rel = ((nc - nm) / nm).abs();
        if rel > worst.0 {
            worst = (rel, d);
        }
    }
    outcome(
        worst.0 <= 0.25,
        format!(
            "max |NC - NoiseMod| / NoiseMod over 0..10 dB = {:.2}% (at {} dB)",
            100.0 * worst.0,
            worst.1
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for i in [2usize, 3] {
        let pts: Vec<(f64, f64)> = (5..=15)
            .map(|d| {
                let p = point(Scheme::TdNoiseMod, 120, d as f64).with_slots(i);
                (d as f64, theory(&p, TdVariant::default()))
            })
            .collect();
        let slope = log_log_slope(&pts);
        let slope_ok = (slope + i as f64).abs() <= 0.15 * i as f64;
        let ratios: Vec<f64> = pts
            .iter()
            .map(|&(d, v)| {
                v / reference_curve(ReferenceKind::TimeDiversity, 120, 10f64.powf(d / 10.0), i)
            })
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let ratio_ok = lo >= 1.0 / 3.0 && hi <= 3.0;
        ok &= slope_ok && ratio_ok;
        parts.push(format!(
            "I={i}: slope {slope:.3}, BEP/reference in [{lo:.2}, {hi:.2}]"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let points = [
        (100, -14.0),
        (100, -12.0),
        (200, -13.0),
        (300, -14.0),
        (1000, -16.0),
    ];
    let mut ok = true;
    let mut zs = Vec::new();
    for (k, &(n, d)) in points.iter().enumerate() {
        let p = point(Scheme::TherMod, n, d);
        let t = bep_thermod(&p);
        ok &= (1e-4..=1e-1).contains(&t);
        let rule = StoppingRule {
            min_errors: 400,
            max_bits: 100_000_000,
        };
        let est = Simulator::new(p, rule, 5_000 + k as u64)
            .workers(workers())
            .run()
            .unwrap();
        let z = est.z_score(t);
        ok &= z <= Z_MAX;
        zs.push(format!("N={n},{d}dB:{t:.2e} z={z:.2}"));
    }
    // log BEP vs N at 0 dB: strictly decreasing, nonnegative curvature
    let logs: Vec<f64> = (1..=50)
        .map(|k| bep_thermod(&point(Scheme::TherMod, 20 * k, 0.0)).ln())
        .collect();
    let decreasing = logs.windows(2).all(|w| w[1] < w[0]);
    let convex = logs
        .windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-9 * w[1].abs());
    ok &= decreasing && convex;
    outcome(
        ok,
        format!(
            "{}; log BEP(N) at 0 dB decreasing={decreasing} convex={convex}",
            zs.join(", ")
        ),
    )
}

/// Draws the received block for one bit through the public pipeline.
fn received(
    p: &SchemeParams,
    bit: u8,
    ctx: SeedContext,
) -> (Vec<Complex64>, Option<noisemod::ChannelRealization>) {
    let plan = plan_variances(&[bit], p).unwrap();
    let tx = generate_bit_samples(&plan, ctx.child(2));
    if p.scheme == Scheme::TherMod {
        (apply_awgn(&tx, p.sigma_w_sq, ctx.child(3)).unwrap(), None)
    } else {
        let h = draw_rayleigh_channel(ctx.child(1), p.n_slots).unwrap();
        (
            apply_fading(&tx, &h, &plan, p.sigma_w_sq, ctx.child(3)).unwrap(),
            Some(h),
        )
    }
}

fn genie_decision(
    p: &SchemeParams,
    rx: &[Complex64],
    h: Option<&noisemod::ChannelRealization>,
) -> (u8, f64) {
    let t = match p.scheme {
        Scheme::TherMod => threshold_thermod(p),
        Scheme::NoiseMod => threshold_noisemod(p, h.unwrap()).unwrap(),
        Scheme::TdNoiseMod => threshold_td(p, h.unwrap()).unwrap(),
        Scheme::NcNoiseMod => unreachable!(),
    };
    let v = sample_variance(rx).unwrap();
    (decide_threshold(v, &t), (v - t.gamma).abs() / t.gamma)
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();

    // no information at alpha = 1
    let mut bers = Vec::new();
    for (k, scheme) in Scheme::ALL.into_iter().enumerate() {
        let slots = if scheme == Scheme::TdNoiseMod { 2 } else { 1 };
        let p = SchemeParams::new(scheme, 1.0, 1.0, 20).with_slots(slots);
        let est = Simulator::new(p, StoppingRule::fixed(1_000_000), 6_000 + k as u64)
            .workers(workers())
            .run()
            .unwrap();
        ok &= (est.ber - 0.5).abs() <= 0.0015;
        bers.push(format!("{}={:.4}", scheme, est.ber));
    }
    parts.push(format!("alpha=1 BER {}", bers.join(" ")));

    // NC decisions under per-bit complex scaling
    let p = point(Scheme::NcNoiseMod, 100, 3.0);
    let mut rng = SeedContext::new(61, 0).rng();
    let mut flips = 0;
    for k in 0..20_000u64 {
        let (rx, _) = received(&p, (k % 2) as u8, SeedContext::new(62, k));
        let c = Complex64::from_polar(
            10f64.powf(rng.random_range(-3.0..3.0)),
            rng.random_range(-3.2..3.2),
        );
        let scaled: Vec<Complex64> = rx.iter().map(|z| z * c).collect();
        flips += usize::from(decide_nc(&rx).unwrap() != decide_nc(&scaled).unwrap());
    }
    ok &= flips == 0;
    parts.push(format!("NC scaling flips {flips}/20000"));

    // joint scaling of (sigma_0^2, sigma_1^2, sigma_w^2)
    let mut joint_flips = 0;
    let mut compared = 0;
    for (scheme, slots) in [
        (Scheme::TherMod, 1),
        (Scheme::NoiseMod, 1),
        (Scheme::TdNoiseMod, 2),
    ] {
        let base = point(scheme, 100, 0.0).with_slots(slots);
        let base = if scheme == Scheme::TherMod {
            base.with_delta_db(-12.0)
        } else {
            base
        };
        for scale in [0.37, 4.0, 123.0] {
            let scaled = base.with_sigma_w_sq(scale);
            for k in 0..5_000u64 {
                let ctx = SeedContext::new(63, k);
                let bit = (k % 2) as u8;
                let (rx0, h0) = received(&base, bit, ctx);
                let (rx1, h1) = received(&scaled, bit, ctx);
                let (d0, margin) = genie_decision(&base, &rx0, h0.as_ref());
                let (d1, _) = genie_decision(&scaled, &rx1, h1.as_ref());
                if margin > 1e-9 {
                    compared += 1;
                    joint_flips += usize::from(d0 != d1);
                }
            }
        }
    }
    ok &= joint_flips == 0 && compared > 40_000;
    parts.push(format!("joint scaling flips {joint_flips}/{compared}"));

    // gain pdf normalization
    let mut worst = 0.0f64;
    for i in 1..=5usize {
        let r = integrate_adaptive(
            &|u| chi_square_pdf_g(u, i),
            &[0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0],
            1e-13,
            0.0,
            4000,
        )
        .unwrap();
        worst = worst.max((r.value - 1.0).abs());
    }
    let reduces = [0.0, 0.3, 1.0, 7.5, 40.0]
        .iter()
        .all(|&u| (chi_square_pdf_g(u, 1) - (-u).exp()).abs() <= 1e-15);
    ok &= worst <= 1e-9 && reduces;
    parts.push(format!(
        "pdf |integral-1| max {worst:.1e}, I=1 is exp(-u): {reduces}"
    ));

    outcome(ok, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut all = true;
    let mut count = 0;
    for (k, cond) in [
        ConditionalBep::NoiseMod,
        ConditionalBep::TimeDiversity(TdVariant::default()),
    ]
    .into_iter()
    .enumerate()
    {
        let (scheme, slots) = match cond {
            ConditionalBep::NoiseMod => (Scheme::NoiseMod, 1),
            _ => (Scheme::TdNoiseMod, 2),
        };
        for n in [100usize, 120, 150] {
            for delta in [1.0, 5.0, 10.0] {
                let p = SchemeParams::new(scheme, ALPHA, delta, n).with_slots(slots);
                let q = bep_theory(&p, TdVariant::default(), &quad()).unwrap();
                let o = mc_expectation_oracle(cond, &p, 10_000_000, 7_000 + count).unwrap();
                count += 1;
                let z = o.z_score(q);
                all &= z <= Z_MAX;
                if z > worst.0 {
                    worst = (
                        z,
                        format!(
                            "{} N={n} delta={delta}",
                            if k == 0 { "noisemod" } else { "td I=2" }
                        ),
                    );
                }
            }
        }
    }
    outcome(
        all,
        format!(
            "quadrature vs 1e7-draw oracle on {count} points; worst z={:.2} ({})",
            worst.0, worst.1
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut spec = SweepSpec::fig4(8);
    spec.axis_values = vec![0.0, 4.0, 8.0];
    spec.curves = vec![
        CurveSpec::new(Scheme::NoiseMod).n(100),
        CurveSpec::new(Scheme::NcNoiseMod).n(100),
        CurveSpec::new(Scheme::TdNoiseMod).slots(2).n(100),
    ];
    spec.stopping = StoppingRule {
        min_errors: 50,
        max_bits: 2_000_000,
    };
    let csv = |w: usize| {
        let mut s = spec.clone();
        s.workers = w;
        run_sweep(&s).unwrap().to_csv()
    };
    let a = csv(1);
    let b = csv(8);
    outcome(
        a == b,
        format!(
            "reduced sweep CSV with 1 vs 8 workers: {} bytes, identical={}",
            a.len(),
            a == b
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("theory-simulation agreement (NoiseMod)", criterion_1),
        ("TD closed-form arbitration", criterion_2),
        ("non-coherent close to coherent", criterion_3),
        ("diversity order", criterion_4),
        ("AWGN closed form", criterion_5),
        ("degenerate and invariance suite", criterion_6),
        ("oracle equivalence", criterion_7),
        ("determinism across worker counts", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {}: {name} — {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
