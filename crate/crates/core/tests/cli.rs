use std::process::{Command, Output};

use noisemod::config::DEFAULT_SEED;
use noisemod::experiments::{from_csv, CellKind};
use noisemod::params::{Scheme, SchemeParams};
use noisemod::theory::bep_thermod;

fn noisemod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisemod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn theory_prints_thermod_closed_form() {
    let o = noisemod(&[
        "theory",
        "--scheme",
        "thermod",
        "--n",
        "100",
        "--delta-db",
        "0",
        "--alpha",
        "10",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    let expected = bep_thermod(&SchemeParams::new(Scheme::TherMod, 10.0, 1.0, 100));
    assert!(
        (v - expected).abs() <= 1e-15 * expected,
        "{v} vs {expected}"
    );
}

#[test]
fn theory_negative_delta_and_aliases() {
    let o = noisemod(&["theory", "--scheme", "nc", "--n", "120", "--delta-db", "-4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v > 0.0 && v < 0.5);
}

#[test]
fn waveform_nc_switches_mid_bit() {
    let o = noisemod(&[
        "waveform",
        "--bits",
        "0110",
        "--n",
        "100",
        "--scheme",
        "nc-noisemod",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sample_index,re,im,variance_level"));
    let levels: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(levels.len(), 400);
    let switches: Vec<usize> = (1..levels.len())
        .filter(|&k| levels[k] != levels[k - 1])
        .collect();
    // 0 = low|high, 1 = high|low; the 1 -> 1 boundary at 200 also switches
    assert_eq!(switches, vec![50, 150, 200, 250, 350]);
    for bit in 0..4 {
        assert_ne!(
            levels[bit * 100],
            levels[bit * 100 + 50],
            "bit {bit} must switch at sample 50"
        );
    }
}

#[test]
fn waveform_rejects_bad_bits() {
    let o = noisemod(&["waveform", "--bits", "01a0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("0 and 1"));
}

#[test]
fn simulate_no_information_is_half() {
    let o = noisemod(&[
        "simulate",
        "--scheme",
        "noisemod",
        "--alpha",
        "1",
        "--n",
        "100",
        "--max-bits",
        "200000",
        "--min-errors",
        "1000000",
        "--workers",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let ber: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("ber = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ber - 0.5).abs() < 0.0034, "{ber}");
    assert!(out.contains("ci95 = ["));
    assert!(out.contains(&format!("seed = {DEFAULT_SEED}")));
}

#[test]
fn simulate_is_seed_determined() {
    let args = [
        "simulate",
        "--scheme",
        "td",
        "--slots",
        "2",
        "--n",
        "40",
        "--delta-db",
        "3",
        "--seed",
        "9",
    ];
    let a = noisemod(&args);
    let b = noisemod(&[&args[..], &["--workers", "3"]].concat());
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn small_n_warns_but_runs() {
    let o = noisemod(&["theory", "--n", "20"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
    let o = noisemod(&["theory", "--n", "100"]);
    assert!(!stderr(&o).contains("warning"));
}

#[test]
fn exit_codes_are_distinct() {
    assert_eq!(noisemod(&["theory", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(noisemod(&["sweep", "--figure", "7"]).status.code(), Some(2));
    assert_eq!(
        noisemod(&["theory", "--scheme", "nc", "--n", "101"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        noisemod(&["theory", "--scheme", "td", "--slots", "3", "--n", "100"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        noisemod(&["theory", "--rel-tol", "1e-300"]).status.code(),
        Some(4)
    );
    assert_eq!(
        noisemod(&["sweep", "--config", "/nonexistent/run.conf"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(noisemod(&["sweep"]).status.code(), Some(3));
}

#[test]
fn help_lists_defaults() {
    let o = noisemod(&["--help"]);
    assert!(o.status.success());
    for sub in ["theory", "simulate", "sweep", "waveform"] {
        assert!(stdout(&o).contains(sub));
    }
    let o = noisemod(&["simulate", "--help"]);
    assert!(o.status.success());
    let h = stdout(&o);
    for flag in [
        "--scheme",
        "--n",
        "--delta-db",
        "--alpha",
        "--slots",
        "--min-errors",
        "--max-bits",
        "--seed",
        "--workers",
    ] {
        let line = h
            .lines()
            .find(|l| l.contains(flag))
            .unwrap_or_else(|| panic!("{flag} missing"));
        assert!(line.contains("default"), "{flag}: {line}");
    }
    let o = noisemod(&["sweep", "--help"]);
    let h = stdout(&o);
    assert!(h.contains(&format!("[default: {DEFAULT_SEED}]")));
    for flag in ["--out", "--workers", "--min-errors", "--max-bits"] {
        let line = h.lines().find(|l| l.contains(flag)).unwrap();
        assert!(line.contains("default"), "{flag}: {line}");
    }
}

#[test]
fn sweep_from_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# tiny sweep\nname = tiny\naxis = delta-db\naxis_values = 0, 4\n\
         curves = noisemod n=100; nc-noisemod n=100\noutputs = theory, sim\n\
         min_errors = 20\nmax_bits = 20000\nseed = 3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = |seed: &str, workers: &str| {
        let o = noisemod(&[
            "sweep",
            "--config",
            conf.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--workers",
            workers,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out.join("tiny.csv")).unwrap()
    };
    let a = run("4", "1");
    let b = run("4", "2");
    let c = run("5", "1");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let rows = from_csv(&a).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].find("nc-noisemod N=100", CellKind::Sim).is_some());
    let meta = std::fs::read_to_string(out.join("tiny.meta.txt")).unwrap();
    assert!(meta.contains("seed = 5"));
    let resolved = std::fs::read_to_string(out.join("tiny.config.txt")).unwrap();
    assert!(resolved.contains("seed = 5"));
    assert!(std::fs::read_to_string(out.join("tiny.svg"))
        .unwrap()
        .contains("<svg"));
}

#[test]
fn sweep_rejects_unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "figure = 3\nresolution = high\n").unwrap();
    let o = noisemod(&[
        "sweep",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unknown key 'resolution'"));
}
