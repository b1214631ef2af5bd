//! Ready-made link chains.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::chain::{ChannelChain, DetectorModel, Stage, StageKind};
use super::stages::{AmplifierModel, LaserModel};
use crate::error::{Error, Result};
use crate::nr::CarrierConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// No impairments.
    Ideal,
    /// DAC, directly modulated laser, detector, link noise, amplifier, ADC.
    PaperFso,
    /// The optical link followed by a short radio hop: path loss, a narrow
    /// band-pass around 622 MHz and a second amplifier.
    PaperFsoWireless,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Ideal, Preset::PaperFso, Preset::PaperFsoWireless];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ideal => "ideal",
            Preset::PaperFso => "paper-fso",
            Preset::PaperFsoWireless => "paper-fso-wireless",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}` (expected ideal, paper-fso or paper-fso-wireless)")))
    }
}

/// Free parameters of the presets. None of the absolute levels are known for
/// the real link, so they are exposed rather than buried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkKnobs {
    pub dac_bits: u32,
    /// DAC clip level for the unit-RMS drive signal.
    pub dac_full_scale: f64,
    pub laser: LaserModel,
    pub fso_loss_db: f64,
    pub detector: DetectorModel,
    /// SNR at the detector output inside the occupied bandwidth.
    pub link_snr_db: f64,
    pub amplifier: AmplifierModel,
    pub adc_bits: u32,
    pub adc_headroom_db: f64,
    /// Resample before the ADC (high-rate mode only).
    pub adc_rate_hz: Option<f64>,
    pub path_loss_db: f64,
    pub bpf_center_hz: f64,
    pub bpf_width_hz: f64,
    pub bpf_transition_hz: f64,
    pub wireless_amplifier: AmplifierModel,
}

impl Default for LinkKnobs {
    fn default() -> Self {
        Self {
            dac_bits: 10,
            dac_full_scale: 4.0,
            laser: LaserModel::qcl_default(),
            fso_loss_db: 0.0,
            detector: DetectorModel::default(),
            link_snr_db: 48.0,
            amplifier: AmplifierModel::new(30.0, 6.0),
            adc_bits: 8,
            adc_headroom_db: 12.0,
            adc_rate_hz: None,
            path_loss_db: 40.0,
            bpf_center_hz: 622e6,
            bpf_width_hz: 60e6,
            bpf_transition_hz: 20e6,
            wireless_amplifier: AmplifierModel::new(30.0, 6.0),
        }
    }
}

impl LinkKnobs {
    /// Knobs for a passband simulated at `carrier.passband_rate_hz`: the ADC
    /// runs at 10 GS/s when the passband is faster than that.
    pub fn for_carrier(carrier: &CarrierConfig) -> Self {
        let mut k = Self::default();
        if carrier.passband_rate_hz > 10e9 {
            k.adc_rate_hz = Some(10e9);
            // keep the detector FIR resolution comparable to the default rate
            k.detector.n_taps = ((255.0 * carrier.passband_rate_hz / 2.4576e9) as usize) | 1;
        }
        k
    }
}

/// The stage list of `preset` for a real passband at `carrier`.
pub fn build_chain(preset: Preset, carrier: &CarrierConfig, knobs: &LinkKnobs, seed: u64) -> ChannelChain {
    let mut stages = Vec::new();
    if preset == Preset::Ideal {
        return ChannelChain::new(stages, seed);
    }
    stages.push(
        Stage::new(StageKind::Quantizer { bits: knobs.dac_bits, full_scale: Some(knobs.dac_full_scale), headroom_db: None })
            .named("dac")
            .at_rate(carrier.passband_rate_hz),
    );
    stages.push(Stage::new(StageKind::Laser(knobs.laser)).named("laser"));
    if knobs.fso_loss_db != 0.0 {
        stages.push(Stage::new(StageKind::Attenuation { loss_db: knobs.fso_loss_db }).named("fso_path"));
    }
    stages.push(Stage::new(StageKind::Detector(knobs.detector.clone())).named("detector"));
    stages.push(
        Stage::new(StageKind::Awgn { snr_db: knobs.link_snr_db, reference_bw_hz: Some(carrier.occupied_bw_hz) })
            .named("link_noise"),
    );
    stages.push(Stage::new(StageKind::Amplifier(knobs.amplifier)).named("amplifier"));
    if preset == Preset::PaperFsoWireless {
        stages.push(Stage::new(StageKind::Attenuation { loss_db: knobs.path_loss_db }).named("radio_path"));
        stages.push(
            Stage::new(StageKind::Bandpass {
                center_hz: knobs.bpf_center_hz,
                width_hz: knobs.bpf_width_hz,
                transition_hz: knobs.bpf_transition_hz,
                atten_db: 80.0,
            })
            .named("bpf"),
        );
        stages.push(Stage::new(StageKind::Amplifier(knobs.wireless_amplifier)).named("rx_amplifier"));
    }
    if let Some(r) = knobs.adc_rate_hz {
        stages.push(Stage::new(StageKind::Resample { rate_hz: r }).named("adc_resample"));
    }
    stages.push(
        Stage::new(StageKind::Quantizer { bits: knobs.adc_bits, full_scale: None, headroom_db: Some(knobs.adc_headroom_db) })
            .named("adc"),
    );
    ChannelChain::new(stages, seed)
}

/// Where a detector response comes from, for the report's fidelity section.
pub fn detector_source(d: &DetectorModel) -> String {
    match (&d.response_csv, d.lowpass_corner_hz) {
        (Some(p), _) => format!("table {}", PathBuf::from(p).display()),
        (None, Some(c)) => format!("single pole at {c} Hz"),
        (None, None) => "flat".to_string(),
    }
}
