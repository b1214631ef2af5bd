//! Second-order Costas loop driving an NCO at the passband rate.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::resample::Resampler;
use crate::error::{Error, Result};
use crate::nr::rf::rx_decimation_design;
use crate::signal::{SampledSignal, SignalMeta};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostasConfig {
    pub nominal_carrier_hz: f64,
    pub loop_bandwidth_hz: f64,
    pub damping: f64,
    /// Corner of the one-pole filter isolating the carrier region before the detector.
    pub prefilter_bw_hz: f64,
    pub output_rate_hz: f64,
    /// Bandwidth kept by the decimation filter.
    pub occupied_bw_hz: f64,
    /// Lock is judged on the error samples after this time.
    pub settle_s: f64,
    pub lock_variance_max: f64,
}

impl Default for CostasConfig {
    fn default() -> Self {
        Self {
            nominal_carrier_hz: 627e6,
            loop_bandwidth_hz: 500.0,
            damping: 0.707,
            prefilter_bw_hz: 20e3,
            output_rate_hz: 30.72e6,
            occupied_bw_hz: 18.36e6,
            settle_s: 5e-3,
            lock_variance_max: 0.005,
        }
    }
}

/// Proportional and integral gains of the loop filter for a detector gain of one.
pub fn loop_gains(bandwidth_hz: f64, damping: f64, update_rate_hz: f64) -> (f64, f64) {
    let theta = bandwidth_hz / update_rate_hz / (damping + 1.0 / (4.0 * damping));
    let d = 1.0 + 2.0 * damping * theta + theta * theta;
    (4.0 * damping * theta / d, 4.0 * theta * theta / d)
}

impl CostasConfig {
    pub fn validate(&self, input_rate_hz: f64) -> Result<()> {
        if !(self.damping > 0.0) {
            return Err(Error::Config("damping must be positive".into()));
        }
        if !(self.loop_bandwidth_hz > 0.0) || self.loop_bandwidth_hz * 100.0 > self.nominal_carrier_hz {
            return Err(Error::Config("loop bandwidth must be positive and far below the carrier".into()));
        }
        if self.nominal_carrier_hz >= input_rate_hz / 2.0 {
            return Err(Error::Config("carrier above the input Nyquist frequency".into()));
        }
        Ok(())
    }
}

/// NCO state per output sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostasTrace {
    /// Instantaneous NCO frequency in Hz.
    pub freq_hz: Vec<f64>,
    /// NCO phase correction in radians, relative to the nominal oscillator.
    pub phase_rad: Vec<f64>,
    pub error: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CostasOutput {
    pub baseband: SampledSignal,
    pub trace: CostasTrace,
    pub error_variance: f64,
}

/// Mixes the real passband input to complex baseband at `cfg.output_rate_hz`
/// while a Costas loop steers the oscillator.
///
/// The loop runs at the output rate on a one-pole filtered copy of the
/// baseband, with the decision-free error `Im(c^2) / (2|c|^2)`. It fails with
/// [`Error::NoLock`] when the error variance after `settle_s` exceeds
/// `lock_variance_max`, or when there is nothing to track.
pub fn costas_downconvert(sig: &SampledSignal, cfg: &CostasConfig) -> Result<CostasOutput> {
    let x = sig.as_real()?;
    cfg.validate(sig.rate_hz)?;
    let fs_in = sig.rate_hz;
    let fs_out = cfg.output_rate_hz;
    let down = Resampler::new(fs_in, fs_out, rx_decimation_design(cfg.occupied_bw_hz, fs_out))?;
    let n_out = down.output_len(x.len());
    let (kp, ki) = loop_gains(cfg.loop_bandwidth_hz, cfg.damping, fs_out);
    let alpha = 1.0 - (-2.0 * PI * cfg.prefilter_bw_hz / fs_out).exp();
    let ratio = fs_in / fs_out;
    let w0 = 2.0 * PI * cfg.nominal_carrier_hz / fs_in;

    let mut buf: Vec<Complex64> = Vec::new();
    let mut base = 0usize;
    let mut next_in = 0usize;
    // oscillator: nominal phase plus loop correction `phi`
    let mut phi = 0.0f64;
    let mut dphi = 0.0f64; // correction per input sample
    let mut integ = 0.0f64;
    let mut c = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n_out);
    let mut trace = CostasTrace::default();

    for m in 0..n_out {
        let need = down.input_needed(m).min(x.len());
        while next_in < need {
            let th = (w0 * next_in as f64) % (2.0 * PI) + phi;
            buf.push(Complex64::from_polar(SQRT_2 * x[next_in], -th));
            phi += dphi;
            next_in += 1;
        }
        let y = down.output_at_window(m, &buf, base);
        out.push(y);

        c += (y - c) * alpha;
        let p = c.norm_sqr();
        let e = if p > 0.0 { (c * c).im / (2.0 * p) } else { 0.0 };
        integ += ki * e;
        let step = kp * e + integ; // radians per output sample
        dphi = step / ratio;
        trace.error.push(e);
        trace.phase_rad.push(phi);
        trace.freq_hz.push(cfg.nominal_carrier_hz + step * fs_out / (2.0 * PI));

        let first = down.input_first(m + 1).saturating_sub(2);
        if first > base + 65_536 {
            buf.drain(..first - base);
            base = first;
        }
    }

    let settle = ((cfg.settle_s * fs_out) as usize).min(n_out);
    let tail = &trace.error[settle..];
    let in_power = crate::signal::mean_power_real(x);
    if in_power == 0.0 {
        return Err(Error::NoLock("no input signal".into()));
    }
    if tail.is_empty() {
        return Err(Error::NoLock(format!(
            "capture of {:.3} ms is shorter than the {:.3} ms settle time",
            n_out as f64 / fs_out * 1e3,
            cfg.settle_s * 1e3
        )));
    }
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / tail.len() as f64;
    if var > cfg.lock_variance_max {
        return Err(Error::NoLock(format!(
            "error variance {var:.4} above {:.4}",
            cfg.lock_variance_max
        )));
    }
    let meta = SignalMeta {
        carrier_hz: None,
        description: format!("Costas downconversion of {}", sig.meta.description),
        ..sig.meta.clone()
    };
    Ok(CostasOutput {
        baseband: SampledSignal::complex(out, fs_out).with_meta(meta),
        trace,
        error_variance: var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 2.4576e9;

    fn tone(offset_hz: f64, phase_deg: f64, dur_s: f64) -> SampledSignal {
        let n = (dur_s * FS) as usize;
        let f = 627e6 + offset_hz;
        let ph = phase_deg.to_radians();
        let x = (0..n)
            .map(|i| {
                let t = i as f64 / FS;
                // reduce the argument before the cosine to keep precision
                let cyc = (f * t).fract();
                SQRT_2 * (2.0 * PI * cyc + ph).cos()
            })
            .collect();
        SampledSignal::real(x, FS)
    }

    #[test]
    fn gains_match_closed_form() {
        let (kp, ki) = loop_gains(500.0, 0.707, 30.72e6);
        let theta = 500.0 / 30.72e6 / (0.707 + 1.0 / (4.0 * 0.707));
        assert!((kp - 4.0 * 0.707 * theta).abs() / kp < 1e-4);
        assert!((ki - 4.0 * theta * theta).abs() / ki < 1e-4);
    }

    #[test]
    fn tracks_one_khz_offset_within_a_millisecond() {
        let cfg = CostasConfig { loop_bandwidth_hz: 5e3, prefilter_bw_hz: 100e3, settle_s: 0.8e-3, ..CostasConfig::default() };
        let out = costas_downconvert(&tone(1e3, 0.0, 1.5e-3), &cfg).unwrap();
        let start = (1e-3 * 30.72e6) as usize;
        for f in &out.trace.freq_hz[start..] {
            assert!((f - 627.001e6).abs() < 10.0, "{f}");
        }
    }

    #[test]
    fn default_loop_settles_small_offset() {
        let out = costas_downconvert(&tone(100.0, 0.0, 12e-3), &CostasConfig::default()).unwrap();
        let start = (10e-3 * 30.72e6) as usize;
        let tail = &out.trace.freq_hz[start..];
        for f in tail {
            assert!((f - 627.0001e6).abs() < 1.0, "{f}");
        }
    }

    #[test]
    fn removes_static_phase_offset() {
        let cfg = CostasConfig { loop_bandwidth_hz: 5e3, prefilter_bw_hz: 100e3, settle_s: 1e-3, ..CostasConfig::default() };
        let out = costas_downconvert(&tone(0.0, 30.0, 1.5e-3), &cfg).unwrap();
        let bb = out.baseband.as_complex().unwrap();
        for v in &bb[(1e-3 * 30.72e6) as usize..bb.len() - 100] {
            assert!(v.arg().to_degrees().abs() < 1.0, "{}", v.arg().to_degrees());
            assert!((v.norm() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn no_limit_cycle_after_settle() {
        let cfg = CostasConfig { loop_bandwidth_hz: 5e3, prefilter_bw_hz: 100e3, settle_s: 1e-3, ..CostasConfig::default() };
        let out = costas_downconvert(&tone(1e3, 10.0, 2e-3), &cfg).unwrap();
        let f = &out.trace.freq_hz[(1.2e-3 * 30.72e6) as usize..];
        let (lo, hi) = f.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi - lo < 1.0, "{}", hi - lo);
    }

    #[test]
    fn zero_input_does_not_lock() {
        let s = SampledSignal::real(vec![0.0; 2_000_000], FS);
        assert!(matches!(costas_downconvert(&s, &CostasConfig::default()), Err(Error::NoLock(_))));
    }
}
