//! Scenario execution: generate, upconvert, channel, receive, measure, evaluate.

use std::fs;
use std::path::Path;

use super::report::{ConformanceReport, EvmSummary, Fidelity, RecoveryInfo, NOISE_CONVENTION, TOOL_NAME, TOOL_VERSION};
use super::scenario::{Domain, Scenario};
use crate::channel::run_chain;
use crate::conformance::{
    aclr_segment_len, all_pass, evaluate_limits, measure_aclr, measure_evm, welch_psd, AclrResult, EvmResult,
    PsdEstimate, WindowKind, DEFAULT_CHANNEL_SPACING_HZ,
};
use crate::error::{Error, Result};
use crate::io::{
    write_channel_estimate_csv, write_constellation_csv, write_iq, write_psd_csv, write_subcarrier_evm_csv,
    write_trace_csv,
};
use crate::nr::{ofdm_modulate, upconvert_with_filter, ResourceGrid};
use crate::rx::{receive, RxOutput};
use crate::signal::{SampledSignal, SignalKind};

/// Transmitted waveform and the grid it carries.
#[derive(Debug, Clone)]
pub struct Transmission {
    pub grid: ResourceGrid,
    /// Unit-power baseband, rounded to f32.
    pub baseband: SampledSignal,
    /// What enters the channel: the passband (or the baseband), rounded to f32.
    pub signal: SampledSignal,
}

/// Test-model grid, OFDM modulation, unit-power normalization and, in the
/// passband domain, upconversion.
pub fn generate(s: &Scenario) -> Result<Transmission> {
    let num = s.numerology()?;
    let carrier = s.carrier_config(&num)?;
    let grid = s.grid(&num).map_err(|e| e.in_stage("generate"))?;
    let bb = ofdm_modulate(&grid, &num, s.window_len).map_err(|e| e.in_stage("generate"))?;
    let p = bb.power();
    if p <= 0.0 {
        return Err(Error::UndefinedSnr.in_stage("generate"));
    }
    let mut baseband = bb.scaled(1.0 / p.sqrt()).rounded_to_f32();
    baseband.meta.seed = Some(s.seed);
    baseband.meta.description = format!("{} baseband, seed {}", s.tm, s.seed);
    let signal = match s.domain {
        Domain::Baseband => baseband.clone(),
        Domain::Passband => upconvert_with_filter(&baseband, &carrier, s.tx_filter)
            .map_err(|e| e.in_stage("upconvert"))?
            .rounded_to_f32(),
    };
    Ok(Transmission { grid, baseband, signal })
}

/// Runs the scenario's channel; the output is rounded to f32 like a capture file.
pub fn apply_channel(s: &Scenario, tx: &SampledSignal) -> Result<SampledSignal> {
    let num = s.numerology()?;
    let carrier = s.carrier_config(&num)?;
    let chain = s.channel_chain(&carrier)?;
    let mut out = run_chain(tx, &chain)?.rounded_to_f32();
    out.meta.seed = Some(s.seed);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub aclr: Option<AclrResult>,
    pub rx: Option<RxOutput>,
    pub evm: Option<EvmResult>,
}

/// Which measurements [`analyze`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureSet {
    pub aclr: bool,
    pub evm: bool,
}

impl MeasureSet {
    pub const ALL: MeasureSet = MeasureSet { aclr: true, evm: true };
}

/// ACLR on real captures and receiver plus EVM, as requested.
pub fn analyze(s: &Scenario, captured: &SampledSignal, grid: &ResourceGrid, what: MeasureSet) -> Result<Analysis> {
    let num = s.numerology()?;
    let carrier = s.carrier_config(&num)?;
    let aclr = if what.aclr && captured.kind() == SignalKind::Real {
        Some(measure_aclr(captured, &carrier, DEFAULT_CHANNEL_SPACING_HZ).map_err(|e| e.in_stage("aclr"))?)
    } else {
        None
    };
    let (rx, evm) = if what.evm {
        let rx = receive(captured, &num, &carrier, grid, &s.rx)?;
        let evm = measure_evm(&rx.equalized, grid, s.evm_reference).map_err(|e| e.in_stage("evm"))?;
        (Some(rx), Some(evm))
    } else {
        (None, None)
    };
    Ok(Analysis { aclr, rx, evm })
}

/// Report for a finished analysis. Verdicts cover every measurement present.
pub fn build_report(s: &Scenario, captured: &SampledSignal, a: &Analysis) -> Result<ConformanceReport> {
    let num = s.numerology()?;
    let carrier = s.carrier_config(&num)?;
    let verdicts = evaluate_limits(a.aclr.as_ref(), a.evm.as_ref(), s.tm, &s.limits)?;
    let spec = s.test_model(&num);
    Ok(ConformanceReport {
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        seed: s.seed,
        scenario: s.clone(),
        prbs: format!(
            "PRBS23 x^23+x^18+1, data seed {}, DMRS seed {}",
            spec.prbs_seed, spec.dmrs.seed
        ),
        carrier_recovery: a.rx.as_ref().map(|r| RecoveryInfo {
            path: r.recovery,
            note: r.costas_note.clone(),
            frame_start: r.sync.start,
            frac_timing: r.sync.frac_timing,
            cfo_hz: r.sync.cfo_hz,
            residual_cfo_hz: r.residual_cfo_hz,
        }),
        aclr: a.aclr.clone(),
        evm: a.evm.as_ref().map(|e| EvmSummary::of(e, num.dc_subcarrier())),
        pass: all_pass(&verdicts),
        verdicts,
        stage_powers: captured.meta.history.clone(),
        noise_convention: NOISE_CONVENTION.into(),
        fidelity: Fidelity::for_chain(&s.channel_chain(&carrier)?),
        artifacts: Vec::new(),
    })
}

/// Everything a scenario run produced, in memory.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub report: ConformanceReport,
    pub transmission: Transmission,
    pub captured: SampledSignal,
    pub analysis: Analysis,
}

/// Runs the full scenario without touching the file system.
pub fn execute(s: &Scenario) -> Result<ScenarioRun> {
    s.validate()?;
    let transmission = generate(s)?;
    let captured = apply_channel(s, &transmission.signal)?;
    let analysis = analyze(s, &captured, &transmission.grid, MeasureSet::ALL)?;
    let report = build_report(s, &captured, &analysis)?;
    Ok(ScenarioRun { report, transmission, captured, analysis })
}

/// [`execute`], then writes the report and artifacts to `s.out_dir` when set.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    let mut run = execute(s)?;
    if let Some(dir) = &s.out_dir {
        run.write_artifacts(dir)?;
    }
    Ok(run)
}

/// PSD used for the exported spectrum, at the ACLR resolution.
pub fn export_psd(sig: &SampledSignal) -> Result<PsdEstimate> {
    let seg = aclr_segment_len(sig.rate_hz).min(sig.len());
    welch_psd(sig, seg, 0.5, WindowKind::Hann)
}

impl ScenarioRun {
    /// Writes IQ captures, CSV exports and the report; the file list is
    /// recorded in the report.
    pub fn write_artifacts(&mut self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut names: Vec<String> = Vec::new();
        let mut note = |n: &str| names.push(n.to_string());
        write_iq(&dir.join("tx.iq"), &dir.join("tx.json"), &self.transmission.signal)?;
        note("tx.iq");
        note("tx.json");
        write_iq(&dir.join("rx.iq"), &dir.join("rx.json"), &self.captured)?;
        note("rx.iq");
        note("rx.json");
        write_psd_csv(&dir.join("psd.csv"), &export_psd(&self.captured)?)?;
        note("psd.csv");
        if let Some(rx) = &self.analysis.rx {
            write_constellation_csv(&dir.join("constellation.csv"), &rx.equalized)?;
            note("constellation.csv");
            write_channel_estimate_csv(&dir.join("channel_estimate.csv"), &rx.estimate)?;
            note("channel_estimate.csv");
            if let Some(t) = &rx.costas_trace {
                write_trace_csv(&dir.join("costas_trace.csv"), &t.freq_hz)?;
                note("costas_trace.csv");
            }
        }
        if let Some(e) = &self.analysis.evm {
            write_subcarrier_evm_csv(&dir.join("subcarrier_evm.csv"), e)?;
            note("subcarrier_evm.csv");
        }
        fs::write(dir.join("scenario.json"), self.report.scenario.to_json() + "\n")?;
        note("scenario.json");
        note("report.json");
        note("report.txt");
        self.report.artifacts = names;
        write_report(dir, &self.report)
    }
}

pub fn write_report(dir: &Path, report: &ConformanceReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json())?;
    fs::write(dir.join("report.txt"), report.to_text())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::Tier;
    use crate::nr::TestModelId;

    #[test]
    fn ideal_tm3_1a_loopback_passes_both_tiers() {
        let s = Scenario { tm: TestModelId::Tm3_1a, seed: 5, n_subframes: 1, ..Scenario::default() };
        let run = execute(&s).unwrap();
        let evm = run.report.evm.as_ref().unwrap();
        assert!(evm.rms_pct < 0.1, "{}", evm.rms_pct);
        assert!(run.report.pass);
        assert!(run.report.verdicts.iter().any(|v| v.tier == Tier::Minimum && v.pass));
        assert!(run.report.aclr.as_ref().unwrap().capped());
    }

    #[test]
    fn baseband_domain_skips_aclr() {
        let s = Scenario { tm: TestModelId::Tm3_1, domain: Domain::Baseband, n_subframes: 1, ..Scenario::default() };
        let run = execute(&s).unwrap();
        assert!(run.report.aclr.is_none());
        assert!(run.report.evm.as_ref().unwrap().rms_pct < 1e-3);
        let s = Scenario { tm: TestModelId::Tm1_1, ..s };
        assert!(matches!(execute(&s), Err(Error::IncompleteTest(_))));
    }

    #[test]
    fn baseband_is_unit_power() {
        let t = generate(&Scenario { n_subframes: 1, ..Scenario::default() }).unwrap();
        assert!((t.baseband.power() - 1.0).abs() < 1e-6);
        assert!((t.signal.power() - 1.0).abs() < 1e-3);
    }
}
