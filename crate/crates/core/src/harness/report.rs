//! Conformance report: JSON for machines, a short text summary for people.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::channel::presets::detector_source;
use crate::channel::{ChannelChain, LaserModel, StageKind};
use crate::conformance::{AclrResult, EvmResult, ModulationEvm, Tier, Verdict};
use crate::rx::RecoveryPath;
use crate::signal::StageRecord;

pub const TOOL_NAME: &str = "nrfso";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const NOISE_CONVENTION: &str = "amplifier noise kT0*B*(F-1) with T0 = 290 K, B = stage sample rate, unit impedance; \
AWGN stages set SNR inside their reference bandwidth; powers are mean squares of dimensionless samples";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvmSummary {
    pub rms_pct: f64,
    pub per_modulation: Vec<ModulationEvm>,
    pub n_re: usize,
    pub n_symbols: usize,
    pub dc_subcarrier_pct: Option<f64>,
    pub median_subcarrier_pct: f64,
    pub max_subcarrier_pct: f64,
}

impl EvmSummary {
    pub fn of(e: &EvmResult, dc_subcarrier: usize) -> Self {
        Self {
            rms_pct: e.rms_pct,
            per_modulation: e.per_modulation.clone(),
            n_re: e.n_re,
            n_symbols: e.n_symbols,
            dc_subcarrier_pct: e.per_subcarrier_pct.get(dc_subcarrier).copied().flatten(),
            median_subcarrier_pct: e.median_subcarrier_pct(),
            max_subcarrier_pct: e.per_subcarrier_pct.iter().flatten().copied().fold(0.0, f64::max),
        }
    }
}

/// Origin of the parameters behind a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    /// Values taken from published measurements of the reference link or from the standard.
    pub published: Vec<String>,
    /// Free parameters chosen for this bench.
    pub assumed: Vec<String>,
    /// Stand-ins for data that is not available numerically.
    pub synthetic: Vec<String>,
}

impl Fidelity {
    pub fn for_chain(chain: &ChannelChain) -> Self {
        let mut f = Fidelity {
            published: vec![
                "30 kHz SCS, 20 MHz channel, 627 MHz carrier".into(),
                "ACLR limit 44.2 dB over 18.36 MHz at 20 MHz spacing".into(),
                "EVM limits 9% / 4.5% (conformance) and 8% / 3.5% (minimum) for 64QAM / 256QAM".into(),
            ],
            ..Fidelity::default()
        };
        f.assumed.push("receiver sync, Costas loop and estimator parameters".into());
        for st in &chain.stages {
            let name = st.display_name();
            match &st.kind {
                StageKind::Quantizer { bits, .. } => {
                    f.published.push(format!("{name}: {bits} bits"));
                    f.assumed.push(format!("{name}: clip level"));
                }
                StageKind::Laser(l) => {
                    f.published.push(format!(
                        "{name}: threshold {} mA, {} mW at {} mA",
                        l.i_threshold_ma,
                        l.power_mw(LaserModel::TOP_MA),
                        LaserModel::TOP_MA
                    ));
                    f.assumed.push(format!(
                        "{name}: bias {} mA, modulation depth {} mA per unit",
                        l.i_bias_ma, l.mod_gain_ma_per_unit
                    ));
                }
                StageKind::Detector(d) => {
                    f.published.push(format!("{name}: 720 MHz bandwidth"));
                    let src = detector_source(d);
                    if d.response_csv.is_some() {
                        f.assumed.push(format!("{name}: response {src}"));
                    } else {
                        f.synthetic.push(format!("{name}: response {src}"));
                    }
                }
                StageKind::Awgn { snr_db, .. } => f.assumed.push(format!("{name}: in-band SNR {snr_db} dB")),
                StageKind::Amplifier(a) => {
                    f.published.push(format!("{name}: gain {} dB, NF {} dB", a.gain_db, a.noise_figure_db))
                }
                StageKind::Bandpass { center_hz, .. } => {
                    f.published.push(format!("{name}: centre {center_hz} Hz"));
                    f.assumed.push(format!("{name}: width and transition"));
                }
                StageKind::Attenuation { loss_db } => f.assumed.push(format!("{name}: {loss_db} dB")),
                _ => f.assumed.push(format!("{name}: all parameters")),
            }
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryInfo {
    pub path: RecoveryPath,
    /// Why the Costas loop was not used.
    pub note: Option<String>,
    pub frame_start: usize,
    pub frac_timing: f64,
    pub cfo_hz: f64,
    pub residual_cfo_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub scenario: Scenario,
    pub prbs: String,
    pub carrier_recovery: Option<RecoveryInfo>,
    pub aclr: Option<AclrResult>,
    pub evm: Option<EvmSummary>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub stage_powers: Vec<StageRecord>,
    pub noise_convention: String,
    pub fidelity: Fidelity,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
}

impl ConformanceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass { 0 } else { 1 }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let sc = &self.scenario;
        let _ = writeln!(s, "{} {}", self.tool, self.tool_version);
        let _ = writeln!(s, "test model {}  preset {}  seed {}", sc.tm, sc.preset, self.seed);
        if let Some(r) = &self.carrier_recovery {
            let _ = writeln!(s, "carrier recovery: {:?}  cfo {:.3} Hz  residual {:.3} Hz", r.path, r.cfo_hz, r.residual_cfo_hz);
            if let Some(n) = &r.note {
                let _ = writeln!(s, "  costas: {n}");
            }
        }
        for st in &self.stage_powers {
            let _ = writeln!(
                s,
                "  stage {:<14} {:>9.3} dB -> {:>9.3} dB",
                st.stage,
                crate::signal::power_to_db(st.power_in),
                crate::signal::power_to_db(st.power_out)
            );
        }
        if let Some(a) = &self.aclr {
            let flag = |c: bool| if c { " (capped)" } else { "" };
            let _ = writeln!(
                s,
                "ACLR lower {:.2} dB{}  upper {:.2} dB{}",
                a.aclr_lower_db,
                flag(a.capped_lower),
                a.aclr_upper_db,
                flag(a.capped_upper)
            );
        }
        if let Some(e) = &self.evm {
            let _ = writeln!(s, "EVM {:.4} % over {} REs", e.rms_pct, e.n_re);
        }
        for v in &self.verdicts {
            let tier = match v.tier {
                Tier::Conformance => "conformance",
                Tier::Minimum => "minimum",
            };
            let _ = writeln!(
                s,
                "{} {:<10} {:<11} measured {:.4} {} limit {} {} margin {:+.4}",
                if v.pass { "PASS" } else { "FAIL" },
                v.test,
                tier,
                v.measured,
                v.unit,
                v.limit,
                v.unit,
                v.margin
            );
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}
