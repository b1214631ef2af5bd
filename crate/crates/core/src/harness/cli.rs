//! Command-line front end. Exit status: 0 all verdicts pass, 1 a verdict
//! failed, 2 usage or execution error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::report::ConformanceReport;
use super::run::{analyze, apply_channel, build_report, generate, run_scenario, write_report, MeasureSet};
use super::scenario::{default_out_dir, Scenario};
use crate::channel::Preset;
use crate::error::Result;
use crate::io::{read_iq, sidecar_path, write_channel_estimate_csv, write_constellation_csv, write_iq, write_trace_csv};
use crate::nr::TestModelId;

#[derive(Debug, Parser)]
#[command(name = "nrfso", version, about = "NR FR1 transmitter conformance over an analog optical fronthaul link")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full scenario: generate, channel, receive, measure, report.
    Run(Common),
    /// Write the transmitted waveform (`tx.iq` + `tx.json`).
    Generate(Common),
    /// Pass a capture through the scenario's channel (`rx.iq` + `rx.json`).
    Channel(WithInput),
    /// Recover the grid; writes constellation, channel estimate and Costas trace.
    Receive(WithInput),
    /// ACLR and/or EVM of a capture, with verdicts.
    Measure(MeasureArgs),
    /// Print the summary of a saved report.
    Report {
        #[arg(long = "in", value_name = "REPORT_JSON")]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    #[arg(long, value_parser = parse_tm)]
    tm: Option<TestModelId>,
    /// Output directory (default: $NRFSO_OUT_DIR or ./nrfso-out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    subframes: Option<usize>,
    /// Simulate the passband at 50 GS/s.
    #[arg(long)]
    high_rate: bool,
}

#[derive(Debug, Args)]
struct WithInput {
    #[command(flatten)]
    common: Common,
    #[arg(long = "in", value_name = "IQ")]
    input: PathBuf,
    /// Sidecar JSON (default: the IQ path with a .json extension).
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    io: WithInput,
    #[arg(long)]
    aclr: bool,
    #[arg(long)]
    evm: bool,
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn parse_tm(s: &str) -> std::result::Result<TestModelId, String> {
    s.parse::<TestModelId>().map_err(|e| e.to_string())
}

impl Common {
    /// Config file, then the capture's seed, then flags.
    fn scenario(&self, capture_seed: Option<u64>) -> Result<Scenario> {
        let mut s = match &self.config {
            Some(p) => Scenario::from_path(p)?,
            None => Scenario::default(),
        };
        if self.config.is_none() {
            if let Some(seed) = capture_seed {
                s.seed = seed;
            }
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.preset {
            s.preset = v;
        }
        if let Some(v) = self.tm {
            s.tm = v;
        }
        if let Some(v) = self.subframes {
            s.n_subframes = v;
        }
        if self.high_rate {
            s.high_rate = true;
        }
        s.out_dir = Some(self.out.clone().or(s.out_dir).unwrap_or_else(default_out_dir));
        s.validate()?;
        Ok(s)
    }
}

impl WithInput {
    fn load(&self) -> Result<(Scenario, crate::SampledSignal)> {
        let meta = self.meta.clone().unwrap_or_else(|| sidecar_path(&self.input));
        let sig = read_iq(&self.input, &meta)?;
        let s = self.common.scenario(sig.meta.seed)?;
        Ok((s, sig))
    }
}

fn out_dir(s: &Scenario) -> PathBuf {
    s.resolved_out_dir()
}

fn print_report(r: &ConformanceReport) {
    print!("{}", r.to_text());
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run(c) => {
            let s = c.scenario(None)?;
            let run = run_scenario(&s)?;
            print_report(&run.report);
            println!("artifacts in {}", out_dir(&s).display());
            Ok(run.report.exit_code())
        }
        Command::Generate(c) => {
            let s = c.scenario(None)?;
            let t = generate(&s)?;
            let dir = out_dir(&s);
            std::fs::create_dir_all(&dir)?;
            write_iq(&dir.join("tx.iq"), &dir.join("tx.json"), &t.signal)?;
            println!("{}", dir.join("tx.iq").display());
            Ok(0)
        }
        Command::Channel(w) => {
            let (s, sig) = w.load()?;
            let out = apply_channel(&s, &sig)?;
            let dir = out_dir(&s);
            std::fs::create_dir_all(&dir)?;
            write_iq(&dir.join("rx.iq"), &dir.join("rx.json"), &out)?;
            for st in &out.meta.history {
                println!("{:<14} {:.6e} -> {:.6e}", st.stage, st.power_in, st.power_out);
            }
            println!("{}", dir.join("rx.iq").display());
            Ok(0)
        }
        Command::Receive(w) => {
            let (s, sig) = w.load()?;
            let num = s.numerology()?;
            let grid = s.grid(&num)?;
            let a = analyze(&s, &sig, &grid, MeasureSet { aclr: false, evm: true })?;
            let dir = out_dir(&s);
            std::fs::create_dir_all(&dir)?;
            let rx = a.rx.as_ref().expect("receiver ran");
            write_constellation_csv(&dir.join("constellation.csv"), &rx.equalized)?;
            write_channel_estimate_csv(&dir.join("channel_estimate.csv"), &rx.estimate)?;
            if let Some(t) = &rx.costas_trace {
                write_trace_csv(&dir.join("costas_trace.csv"), &t.freq_hz)?;
            }
            println!("carrier recovery {:?}, frame start {}", rx.recovery, rx.sync.start);
            if let Some(e) = &a.evm {
                println!("EVM {:.4} %", e.rms_pct);
            }
            Ok(0)
        }
        Command::Measure(m) => {
            let (s, sig) = m.io.load()?;
            let what = if m.aclr || m.evm { MeasureSet { aclr: m.aclr, evm: m.evm } } else { MeasureSet::ALL };
            let num = s.numerology()?;
            let grid = s.grid(&num)?;
            let a = analyze(&s, &sig, &grid, what)?;
            let report = build_report(&s, &sig, &a)?;
            write_report(&out_dir(&s), &report)?;
            print_report(&report);
            Ok(report.exit_code())
        }
        Command::Report { input } => {
            let r = ConformanceReport::from_json(&std::fs::read_to_string(Path::new(&input))?)?;
            print_report(&r);
            Ok(r.exit_code())
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
