//! Baseband <-> real passband conversion.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::numerology::CarrierConfig;
use crate::dsp::resample::{Resampler, ResamplerDesign};
use crate::error::{Error, Result};
use crate::signal::{SampledSignal, SignalMeta};

/// Interpolation filter applied on the way up to the passband rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TxFilter {
    /// Channel filter: flat over the occupied band, closed before the
    /// adjacent channel starts.
    #[default]
    Channel,
    /// Image rejection only: everything the baseband rate can represent passes.
    ImageReject,
}

impl TxFilter {
    pub fn design(self, occupied_bw_hz: f64, baseband_rate_hz: f64) -> ResamplerDesign {
        let edge = occupied_bw_hz / 2.0;
        match self {
            // closes 1.5 MHz above the occupied edge (adjacent channels start at +1.64 MHz)
            TxFilter::Channel => ResamplerDesign {
                pass_hz: edge + 0.05e6,
                stop_hz: edge + 1.55e6,
                atten_db: 100.0,
            },
            TxFilter::ImageReject => ResamplerDesign {
                pass_hz: baseband_rate_hz / 2.0 - 2e6,
                stop_hz: baseband_rate_hz / 2.0 + 2e6,
                atten_db: 100.0,
            },
        }
    }
}

/// Anti-alias mask used when coming down from passband.
pub fn rx_decimation_design(occupied_bw_hz: f64, baseband_rate_hz: f64) -> ResamplerDesign {
    let pass = occupied_bw_hz / 2.0 + 0.1e6;
    ResamplerDesign {
        pass_hz: pass,
        stop_hz: baseband_rate_hz - pass,
        atten_db: 90.0,
    }
}

/// Resamples complex baseband to the passband rate and mixes it up to the
/// carrier. The result is `sqrt(2) * Re{b(t) exp(j 2 pi fc t)}`, so passband and
/// baseband power agree. Uses the [`TxFilter::Channel`] interpolator.
pub fn upconvert_to_passband(bb: &SampledSignal, carrier: &CarrierConfig) -> Result<SampledSignal> {
    upconvert_with_filter(bb, carrier, TxFilter::Channel)
}

pub fn upconvert_with_filter(bb: &SampledSignal, carrier: &CarrierConfig, filter: TxFilter) -> Result<SampledSignal> {
    carrier.validate()?;
    let x = bb.as_complex()?;
    let design = filter.design(carrier.occupied_bw_hz, bb.rate_hz);
    let up = Resampler::new(bb.rate_hz, carrier.passband_rate_hz, design)?;
    let y = up.process(x);
    let w = 2.0 * PI * carrier.carrier_hz / carrier.passband_rate_hz;
    let out = y
        .iter()
        .enumerate()
        .map(|(n, v)| SQRT_2 * (v * Complex64::from_polar(1.0, w * n as f64)).re)
        .collect();
    let meta = SignalMeta {
        carrier_hz: Some(carrier.carrier_hz),
        seed: bb.meta.seed,
        description: format!("{} upconverted to {} Hz", bb.meta.description, carrier.carrier_hz),
        history: bb.meta.history.clone(),
    };
    Ok(SampledSignal::real(out, carrier.passband_rate_hz).with_meta(meta))
}

/// Mixes a real passband signal down with a fixed oscillator and decimates to
/// `out_rate_hz` (no carrier tracking).
pub fn downconvert_fixed(pb: &SampledSignal, carrier_hz: f64, out_rate_hz: f64, occupied_bw_hz: f64) -> Result<SampledSignal> {
    let x = pb.as_real()?;
    if carrier_hz <= 0.0 || carrier_hz >= pb.rate_hz / 2.0 {
        return Err(Error::Config("carrier outside the passband Nyquist zone".into()));
    }
    let down = Resampler::new(pb.rate_hz, out_rate_hz, rx_decimation_design(occupied_bw_hz, out_rate_hz))?;
    let w = 2.0 * PI * carrier_hz / pb.rate_hz;
    let mixed: Vec<Complex64> = x
        .iter()
        .enumerate()
        .map(|(n, &v)| Complex64::from_polar(SQRT_2 * v, -w * n as f64))
        .collect();
    let meta = SignalMeta {
        carrier_hz: None,
        ..pb.meta.clone()
    };
    Ok(SampledSignal::complex(down.process(&mixed), out_rate_hz).with_meta(meta))
}
