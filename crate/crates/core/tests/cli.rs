use std::path::Path;
use std::process::Command;

use nrfso::channel::stages::complex_noise;
use nrfso::harness::{execute, run_cli, ConformanceReport, Scenario};
use nrfso::io::write_iq;
use nrfso::nr::TestModelId;
use nrfso::signal::SignalMeta;
use nrfso::SampledSignal;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nrfso"))
}

fn cli(args: &[&str]) -> i32 {
    let mut v = vec!["nrfso"];
    v.extend_from_slice(args);
    run_cli(v)
}

fn report(dir: &Path) -> ConformanceReport {
    ConformanceReport::from_json(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn ideal_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--preset", "ideal", "--tm", "TM1.1", "--seed", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert!(r.pass);
    assert_eq!(r.seed, 7);
    for f in &r.artifacts {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["run", "--preset", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"]), 2);
}

#[test]
fn missing_input_file_is_execution_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("none.iq");
    assert_eq!(cli(&["measure", "--aclr", "--in", p.to_str().unwrap()]), 2);
}

#[test]
fn white_noise_aclr_fails_limit() {
    let dir = tempfile::tempdir().unwrap();
    let fs = 2.4576e9;
    let x: Vec<f64> = complex_noise(1 << 22, 1.0, 4).iter().map(|v| v.re * 2f64.sqrt()).collect();
    let sig = SampledSignal::real(x, fs).with_meta(SignalMeta { carrier_hz: Some(627e6), seed: Some(4), ..SignalMeta::default() });
    let (iq, meta) = (dir.path().join("capture.iq"), dir.path().join("capture.json"));
    write_iq(&iq, &meta, &sig).unwrap();
    let out = dir.path().join("m");
    let code = cli(&[
        "measure",
        "--aclr",
        "--in",
        iq.to_str().unwrap(),
        "--meta",
        meta.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let r = report(&out);
    let a = r.aclr.unwrap();
    assert!(a.aclr_lower_db.abs() < 0.1 && a.aclr_upper_db.abs() < 0.1, "{a:?}");
    assert!(r.evm.is_none());
    assert_eq!(cli(&["report", "--in", out.join("report.json").to_str().unwrap()]), 1);
}

#[test]
fn file_pipeline_matches_in_process_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let common = ["--preset", "paper-fso", "--tm", "TM3.1", "--seed", "12", "--subframes", "1"];
    let mut a = vec!["generate"];
    a.extend(common);
    let gen_dir = d("gen");
    a.extend(["--out", &gen_dir]);
    assert_eq!(cli(&a), 0);
    let tx = format!("{gen_dir}/tx.iq");
    let ch_dir = d("ch");
    let mut a = vec!["channel", "--in", &tx, "--out", &ch_dir];
    a.extend(common);
    assert_eq!(cli(&a), 0);
    let rx = format!("{ch_dir}/rx.iq");
    let m_dir = d("m");
    let mut a = vec!["measure", "--in", &rx, "--out", &m_dir];
    a.extend(common);
    assert_eq!(cli(&a), 0);
    let from_files = report(Path::new(&m_dir));

    let s = Scenario {
        tm: TestModelId::Tm3_1,
        preset: nrfso::channel::Preset::PaperFso,
        seed: 12,
        n_subframes: 1,
        ..Scenario::default()
    };
    let run = execute(&s).unwrap();
    assert_eq!(from_files.aclr, run.report.aclr);
    assert_eq!(from_files.evm, run.report.evm);
    assert_eq!(from_files.verdicts, run.report.verdicts);
    assert_eq!(from_files.stage_powers, run.report.stage_powers);

    let recv_dir = d("recv");
    let mut a = vec!["receive", "--in", &rx, "--out", &recv_dir];
    a.extend(common);
    assert_eq!(cli(&a), 0);
    let est = std::fs::read_to_string(format!("{recv_dir}/channel_estimate.csv")).unwrap();
    assert!(est.starts_with("subcarrier,re,im\n"));
    assert_eq!(est.lines().count(), 613);
}

#[test]
fn config_file_and_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    std::fs::write(&cfg, r#"{"tm": "TM3.1a", "seed": 3, "n_subframes": 1}"#).unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .env("NRFSO_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("env"));
    assert_eq!(r.scenario.tm, TestModelId::Tm3_1a);
    assert_eq!(r.seed, 3);
    let text = std::fs::read_to_string(dir.path().join("env/report.txt")).unwrap();
    assert!(text.contains("overall: PASS"));
}
