//! Adjacent channel leakage ratio.

use serde::{Deserialize, Serialize};

use super::psd::{welch_psd, PsdEstimate, WindowKind};
use crate::error::{Error, Result};
use crate::nr::CarrierConfig;
use crate::signal::{power_to_db, SampledSignal, SignalKind};

pub const ACLR_CAP_DB: f64 = 80.0;
pub const DEFAULT_CHANNEL_SPACING_HZ: f64 = 20e6;
pub const MAX_RBW_HZ: f64 = 100e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AclrResult {
    pub assigned_power: f64,
    pub lower_power: f64,
    pub upper_power: f64,
    pub aclr_lower_db: f64,
    pub aclr_upper_db: f64,
    /// True when the leakage was below the numeric floor and the value was clamped.
    pub capped_lower: bool,
    pub capped_upper: bool,
    pub integration_bw_hz: f64,
    pub channel_spacing_hz: f64,
    pub bin_hz: f64,
}

impl AclrResult {
    pub fn capped(&self) -> bool {
        self.capped_lower || self.capped_upper
    }

    pub fn worst_db(&self) -> f64 {
        self.aclr_lower_db.min(self.aclr_upper_db)
    }
}

fn ratio_db(assigned: f64, adjacent: f64) -> (f64, bool) {
    if adjacent <= 0.0 {
        return (ACLR_CAP_DB, true);
    }
    let v = power_to_db(assigned / adjacent);
    if v > ACLR_CAP_DB {
        (ACLR_CAP_DB, true)
    } else {
        (v, false)
    }
}

/// Smallest power-of-two segment whose bin spacing is at most [`MAX_RBW_HZ`].
pub fn aclr_segment_len(rate_hz: f64) -> usize {
    ((rate_hz / MAX_RBW_HZ).ceil() as usize).next_power_of_two()
}

/// ACLR from an existing PSD, channels centred on `center_hz`.
pub fn aclr_from_psd(psd: &PsdEstimate, center_hz: f64, integration_bw_hz: f64, spacing_hz: f64) -> AclrResult {
    let half = integration_bw_hz / 2.0;
    let band = |c: f64| psd.band_power(c - half, c + half);
    let assigned_power = band(center_hz);
    let lower_power = band(center_hz - spacing_hz);
    let upper_power = band(center_hz + spacing_hz);
    let (aclr_lower_db, capped_lower) = ratio_db(assigned_power, lower_power);
    let (aclr_upper_db, capped_upper) = ratio_db(assigned_power, upper_power);
    AclrResult {
        assigned_power,
        lower_power,
        upper_power,
        aclr_lower_db,
        aclr_upper_db,
        capped_lower,
        capped_upper,
        integration_bw_hz,
        channel_spacing_hz: spacing_hz,
        bin_hz: psd.bin_hz,
    }
}

/// Integrates the Welch PSD over the occupied bandwidth of the assigned
/// channel and of the channels `spacing` below and above it.
///
/// Real signals are taken as passband around `carrier.carrier_hz`; complex
/// signals as baseband around 0 Hz.
pub fn measure_aclr(sig: &SampledSignal, carrier: &CarrierConfig, channel_spacing_hz: f64) -> Result<AclrResult> {
    let fs = sig.rate_hz;
    let half_span = channel_spacing_hz + carrier.occupied_bw_hz / 2.0;
    let center = match sig.kind() {
        SignalKind::Real => {
            if carrier.carrier_hz - half_span <= 0.0 || carrier.carrier_hz + half_span >= fs / 2.0 {
                return Err(Error::Measurement(format!(
                    "adjacent channels at {} +/- {} Hz do not fit in [0, {}] Hz",
                    carrier.carrier_hz,
                    half_span,
                    fs / 2.0
                )));
            }
            carrier.carrier_hz
        }
        SignalKind::Complex => {
            if half_span >= fs / 2.0 {
                return Err(Error::Measurement(format!(
                    "baseband rate {fs} Hz cannot hold adjacent channels up to {half_span} Hz"
                )));
            }
            0.0
        }
    };
    let seg = aclr_segment_len(fs);
    if seg > sig.len() {
        return Err(Error::Measurement(format!(
            "{} samples cannot give {} Hz resolution",
            sig.len(),
            MAX_RBW_HZ
        )));
    }
    let psd = welch_psd(sig, seg, 0.5, WindowKind::Hann)?;
    Ok(aclr_from_psd(&psd, center, carrier.occupied_bw_hz, channel_spacing_hz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::stages::complex_noise;
    use crate::dsp::fir::filter_complex;
    use crate::dsp::window::design_lowpass;
    use crate::nr::{make_numerology, upconvert_to_passband};

    fn carrier() -> CarrierConfig {
        CarrierConfig::n71(&make_numerology(30e3, 20e6).unwrap())
    }

    #[test]
    fn flat_noise_gives_zero_db() {
        let fs = 122.88e6;
        let x = complex_noise(2_000_000, 1.0, 5);
        let r = measure_aclr(&SampledSignal::complex(x, fs), &carrier(), 20e6).unwrap();
        assert!(r.aclr_lower_db.abs() < 0.1 && r.aclr_upper_db.abs() < 0.1, "{r:?}");
        assert!(!r.capped());
    }

    #[test]
    fn brick_wall_band_is_capped() {
        let c = carrier();
        let fs = 30.72e6;
        let taps = design_lowpass(8.0e6 / fs, 9.0e6 / fs, 140.0);
        let x = filter_complex(&complex_noise(400_000, 1.0, 6), &taps, true);
        let pb = upconvert_to_passband(&SampledSignal::complex(x, fs), &c).unwrap();
        let r = measure_aclr(&pb, &c, 20e6).unwrap();
        assert!(r.capped_lower && r.capped_upper, "{r:?}");
        assert_eq!(r.aclr_lower_db, ACLR_CAP_DB);
    }

    #[test]
    fn aclr_is_difference_of_band_powers() {
        let fs = 122.88e6;
        let x = complex_noise(500_000, 1.0, 8);
        let r = measure_aclr(&SampledSignal::complex(x, fs), &carrier(), 20e6).unwrap();
        let want = 10.0 * r.assigned_power.log10() - 10.0 * r.lower_power.log10();
        assert!((r.aclr_lower_db - want).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance() {
        let fs = 122.88e6;
        let x = complex_noise(500_000, 1.0, 9);
        let s = SampledSignal::complex(x, fs);
        let a = measure_aclr(&s, &carrier(), 20e6).unwrap();
        let b = measure_aclr(&s.scaled(37.5), &carrier(), 20e6).unwrap();
        assert!((a.aclr_lower_db - b.aclr_lower_db).abs() < 1e-9);
        assert!((a.aclr_upper_db - b.aclr_upper_db).abs() < 1e-9);
    }

    #[test]
    fn narrow_span_is_measurement_error() {
        let s = SampledSignal::complex(complex_noise(100_000, 1.0, 1), 30.72e6);
        assert!(matches!(measure_aclr(&s, &carrier(), 20e6), Err(Error::Measurement(_))));
        let s = SampledSignal::real(vec![1.0; 100_000], 1.0e9);
        assert!(matches!(measure_aclr(&s, &carrier(), 20e6), Err(Error::Measurement(_))));
    }

    #[test]
    fn segment_meets_resolution() {
        assert_eq!(aclr_segment_len(2.4576e9), 32768);
        let rbw = 2.4576e9 / aclr_segment_len(2.4576e9) as f64;
        assert!(rbw <= MAX_RBW_HZ);
    }
}
