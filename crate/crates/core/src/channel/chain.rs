//! Ordered, seeded impairment chains.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::stages::{add_awgn, laser_pi_transfer, noisy_amplify, quantize, AmplifierModel, LaserModel, QuantizerModel};
use crate::dsp::fir::{filter_complex, filter_real};
use crate::dsp::resample::{Resampler, ResamplerDesign};
use crate::dsp::response::{fir_from_measured_response, FrequencyResponse, ResponsePoint};
use crate::dsp::window::design_bandpass;
use crate::error::{config, Error, Result};
use crate::signal::{db_to_amplitude, db_to_power, power_to_db, SampledSignal, Samples, StageRecord};

pub const DEFAULT_DETECTOR_CORNER_HZ: f64 = 720e6;

fn default_taps() -> usize {
    255
}

fn default_corner() -> Option<f64> {
    Some(DEFAULT_DETECTOR_CORNER_HZ)
}

fn default_true() -> bool {
    true
}

/// Photodetector: responsivity, optional AC coupling and a low-pass response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Output units per mW of optical power.
    pub responsivity: f64,
    /// Removes the mean (the DC photocurrent) before the electrical path.
    #[serde(default = "default_true")]
    pub ac_coupled: bool,
    /// Single-pole corner used when no response file is given.
    #[serde(default = "default_corner")]
    pub lowpass_corner_hz: Option<f64>,
    /// `freq_hz,mag_db[,phase_deg]` table replacing the single pole.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_csv: Option<PathBuf>,
    #[serde(default = "default_taps")]
    pub n_taps: usize,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            responsivity: 1.0,
            ac_coupled: true,
            lowpass_corner_hz: default_corner(),
            response_csv: None,
            n_taps: default_taps(),
        }
    }
}

/// One impairment. Serialized with a `type` tag, e.g. `{"type": "gain", "gain_db": 6}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StageKind {
    /// Either a fixed `full_scale` or one set `headroom_db` above the input RMS.
    Quantizer {
        bits: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        full_scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        headroom_db: Option<f64>,
    },
    Laser(LaserModel),
    /// Scalar optical or RF loss.
    Attenuation { loss_db: f64 },
    Detector(DetectorModel),
    /// With `reference_bw_hz` the SNR is counted inside that bandwidth only.
    Awgn {
        snr_db: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_bw_hz: Option<f64>,
    },
    Amplifier(AmplifierModel),
    Bandpass {
        center_hz: f64,
        width_hz: f64,
        transition_hz: f64,
        #[serde(default = "default_atten")]
        atten_db: f64,
    },
    Gain { gain_db: f64 },
    /// Unmodulated tone at `carrier_hz`, `level_dbc` relative to the signal power.
    CarrierLeak { carrier_hz: f64, level_dbc: f64 },
    Resample { rate_hz: f64 },
    Fir {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        response_csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        points: Vec<ResponsePoint>,
        #[serde(default = "default_taps")]
        n_taps: usize,
    },
}

fn default_atten() -> f64 {
    80.0
}

impl StageKind {
    pub fn label(&self) -> &'static str {
        match self {
            StageKind::Quantizer { .. } => "quantizer",
            StageKind::Laser(_) => "laser",
            StageKind::Attenuation { .. } => "attenuation",
            StageKind::Detector(_) => "detector",
            StageKind::Awgn { .. } => "awgn",
            StageKind::Amplifier(_) => "amplifier",
            StageKind::Bandpass { .. } => "bandpass",
            StageKind::Gain { .. } => "gain",
            StageKind::CarrierLeak { .. } => "carrier_leak",
            StageKind::Resample { .. } => "resample",
            StageKind::Fir { .. } => "fir",
        }
    }

    fn is_real_only(&self) -> bool {
        matches!(
            self,
            StageKind::Quantizer { .. } | StageKind::Laser(_) | StageKind::Detector(_) | StageKind::Amplifier(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Sample rate this stage was designed for; checked against the incoming signal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_hz: Option<f64>,
    #[serde(flatten)]
    pub kind: StageKind,
}

impl Stage {
    pub fn new(kind: StageKind) -> Self {
        Self { name: None, rate_hz: None, kind }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn at_rate(mut self, rate_hz: f64) -> Self {
        self.rate_hz = Some(rate_hz);
        self
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.label().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChannelChain {
    pub stages: Vec<Stage>,
    pub seed: u64,
}

/// Seed for stage `index`, drawn from its own ChaCha stream of the master seed.
pub fn stage_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

impl ChannelChain {
    pub fn new(stages: Vec<Stage>, seed: u64) -> Self {
        Self { stages, seed }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain serializes")
    }

    /// Walks the stage list checking rates and parameters without touching samples.
    pub fn validate(&self, input_rate_hz: f64) -> Result<f64> {
        let mut rate = input_rate_hz;
        for stage in &self.stages {
            if let Some(r) = stage.rate_hz {
                if (r - rate).abs() > 1e-6 * rate {
                    return Err(Error::Config(format!(
                        "rate mismatch: stage `{}` expects {r} Hz but receives {rate} Hz",
                        stage.display_name()
                    )));
                }
            }
            validate_kind(&stage.kind, rate).map_err(|e| e.in_stage(stage.display_name()))?;
            if let StageKind::Resample { rate_hz } = stage.kind {
                rate = rate_hz;
            }
        }
        Ok(rate)
    }
}

fn validate_kind(kind: &StageKind, rate: f64) -> Result<()> {
    match kind {
        StageKind::Quantizer { bits, full_scale, headroom_db } => {
            if full_scale.is_some() == headroom_db.is_some() {
                return config("quantizer needs exactly one of full_scale and headroom_db");
            }
            QuantizerModel::new(*bits, full_scale.unwrap_or(1.0)).validate()
        }
        StageKind::Laser(m) => m.validate(),
        StageKind::Amplifier(a) => a.validate(),
        StageKind::Detector(d) => {
            if d.response_csv.is_none() && d.lowpass_corner_hz.is_none() {
                return Ok(());
            }
            if let Some(c) = d.lowpass_corner_hz {
                if c <= 0.0 {
                    return config("detector corner must be positive");
                }
            }
            Ok(())
        }
        StageKind::Bandpass { center_hz, width_hz, transition_hz, .. } => {
            let top = center_hz + width_hz / 2.0 + transition_hz;
            if *width_hz <= 0.0 || *transition_hz <= 0.0 || top >= rate / 2.0 || center_hz - width_hz / 2.0 - transition_hz <= 0.0 {
                return config("band-pass must fit between DC and Nyquist");
            }
            Ok(())
        }
        StageKind::Resample { rate_hz } => crate::dsp::resample::rate_ratio(rate, *rate_hz).map(|_| ()),
        StageKind::Fir { response_csv, points, .. } => {
            if response_csv.is_none() && points.is_empty() {
                return config("fir stage needs a response file or points");
            }
            Ok(())
        }
        StageKind::Awgn { snr_db, reference_bw_hz } => {
            if snr_db.is_nan() {
                return config("SNR is NaN");
            }
            if let Some(b) = reference_bw_hz {
                if *b <= 0.0 || *b > rate {
                    return config("reference bandwidth must lie in (0, rate]");
                }
            }
            Ok(())
        }
        StageKind::Attenuation { .. } | StageKind::Gain { .. } | StageKind::CarrierLeak { .. } => Ok(()),
    }
}

fn detector_taps(d: &DetectorModel, rate: f64) -> Result<Option<Vec<f64>>> {
    let resp = match (&d.response_csv, d.lowpass_corner_hz) {
        (Some(path), _) => FrequencyResponse::from_csv_path(path)?,
        (None, Some(corner)) => FrequencyResponse::single_pole(corner, rate / 2.0, 513),
        (None, None) => return Ok(None),
    };
    Ok(Some(fir_from_measured_response(&resp, rate, d.n_taps)?))
}

fn filter_signal(sig: &SampledSignal, taps: &[f64]) -> SampledSignal {
    let samples = match &sig.samples {
        Samples::Real(x) => Samples::Real(filter_real(x, taps, true)),
        Samples::Complex(x) => Samples::Complex(filter_complex(x, taps, true)),
    };
    SampledSignal { samples, rate_hz: sig.rate_hz, meta: sig.meta.clone() }
}

fn apply_kind(kind: &StageKind, sig: &SampledSignal, seed: u64) -> Result<SampledSignal> {
    if kind.is_real_only() {
        sig.as_real()?;
    }
    match kind {
        StageKind::Quantizer { bits, full_scale, headroom_db } => {
            let fs = match (full_scale, headroom_db) {
                (Some(f), _) => *f,
                (None, Some(h)) => sig.power().sqrt() * db_to_amplitude(*h),
                _ => return config("quantizer needs full_scale or headroom_db"),
            };
            if !(fs > 0.0) {
                return Err(Error::Input("cannot set converter range on a zero signal".into()));
            }
            quantize(sig, &QuantizerModel::new(*bits, fs))
        }
        StageKind::Laser(m) => laser_pi_transfer(sig, m),
        StageKind::Attenuation { loss_db } => Ok(sig.scaled(db_to_amplitude(-loss_db))),
        StageKind::Gain { gain_db } => Ok(sig.scaled(db_to_amplitude(*gain_db))),
        StageKind::Detector(d) => {
            let x = sig.as_real()?;
            let mean = if d.ac_coupled { x.iter().sum::<f64>() / x.len().max(1) as f64 } else { 0.0 };
            let y: Vec<f64> = x.iter().map(|v| d.responsivity * (v - mean)).collect();
            let out = SampledSignal::real(y, sig.rate_hz).with_meta(sig.meta.clone());
            Ok(match detector_taps(d, sig.rate_hz)? {
                Some(taps) => filter_signal(&out, &taps),
                None => out,
            })
        }
        StageKind::Awgn { snr_db, reference_bw_hz } => {
            let snr_full = match reference_bw_hz {
                // white noise spreads over fs (complex) or fs/2 (real)
                Some(b) => {
                    let span = match sig.samples {
                        Samples::Real(_) => sig.rate_hz / 2.0,
                        Samples::Complex(_) => sig.rate_hz,
                    };
                    snr_db - power_to_db(span / b)
                }
                None => *snr_db,
            };
            add_awgn(sig, snr_full, seed)
        }
        StageKind::Amplifier(a) => noisy_amplify(sig, a, seed),
        StageKind::Bandpass { center_hz, width_hz, transition_hz, atten_db } => {
            let fs = sig.rate_hz;
            let taps = design_bandpass(center_hz / fs, width_hz / 2.0 / fs, (width_hz / 2.0 + transition_hz) / fs, *atten_db);
            Ok(filter_signal(sig, &taps))
        }
        StageKind::CarrierLeak { carrier_hz, level_dbc } => {
            let p = sig.power() * db_to_power(*level_dbc);
            let w = 2.0 * PI * carrier_hz / sig.rate_hz;
            let samples = match &sig.samples {
                Samples::Real(x) => {
                    let a = (2.0 * p).sqrt();
                    Samples::Real(x.iter().enumerate().map(|(n, v)| v + a * (w * n as f64).cos()).collect())
                }
                Samples::Complex(x) => {
                    let a = p.sqrt();
                    Samples::Complex(
                        x.iter().enumerate().map(|(n, v)| v + Complex64::from_polar(a, w * n as f64)).collect(),
                    )
                }
            };
            Ok(SampledSignal { samples, rate_hz: sig.rate_hz, meta: sig.meta.clone() })
        }
        StageKind::Resample { rate_hz } => {
            let low = sig.rate_hz.min(*rate_hz);
            let design = ResamplerDesign { pass_hz: 0.4 * low, stop_hz: 0.6 * low, atten_db: 80.0 };
            let r = Resampler::new(sig.rate_hz, *rate_hz, design)?;
            let samples = match &sig.samples {
                Samples::Real(x) => Samples::Real(r.process_real(x)),
                Samples::Complex(x) => Samples::Complex(r.process(x)),
            };
            Ok(SampledSignal { samples, rate_hz: *rate_hz, meta: sig.meta.clone() })
        }
        StageKind::Fir { response_csv, points, n_taps } => {
            let resp = match response_csv {
                Some(p) => FrequencyResponse::from_csv_path(p)?,
                None => FrequencyResponse::new(points.clone())?,
            };
            let taps = fir_from_measured_response(&resp, sig.rate_hz, *n_taps)?;
            Ok(filter_signal(sig, &taps))
        }
    }
}

/// Applies every stage in order and appends one [`StageRecord`] per stage to
/// the signal history.
pub fn run_chain(sig: &SampledSignal, chain: &ChannelChain) -> Result<SampledSignal> {
    chain.validate(sig.rate_hz)?;
    let mut cur = sig.clone();
    for (i, stage) in chain.stages.iter().enumerate() {
        let name = stage.display_name();
        let power_in = cur.power();
        let mut next = apply_kind(&stage.kind, &cur, stage_seed(chain.seed, i)).map_err(|e| e.in_stage(name.clone()))?;
        next.meta.history.push(StageRecord {
            stage: name,
            rate_hz: next.rate_hz,
            power_in,
            power_out: next.power(),
        });
        cur = next;
    }
    Ok(cur)
}
