//! Individual impairment stages of the fronthaul link.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::signal::{db_to_power, SampledSignal};

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const T0_KELVIN: f64 = 290.0;

/// Directly-modulated laser with a piecewise-linear P-I characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserModel {
    pub i_threshold_ma: f64,
    pub slope_mw_per_ma: f64,
    pub i_bias_ma: f64,
    pub mod_gain_ma_per_unit: f64,
}

impl LaserModel {
    /// Two measured P-I points: threshold at 420 mA, 21 mW at 670 mA.
    pub const THRESHOLD_MA: f64 = 420.0;
    pub const TOP_MA: f64 = 670.0;
    pub const TOP_MW: f64 = 21.0;

    /// Biased mid-way through the linear region. With a unit-RMS drive,
    /// excursions beyond about 3.8 sigma dip below threshold and are clipped.
    pub fn qcl_default() -> Self {
        Self {
            i_threshold_ma: Self::THRESHOLD_MA,
            slope_mw_per_ma: Self::TOP_MW / (Self::TOP_MA - Self::THRESHOLD_MA),
            i_bias_ma: 0.5 * (Self::THRESHOLD_MA + Self::TOP_MA),
            mod_gain_ma_per_unit: 33.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.i_threshold_ma >= self.i_bias_ma {
            return config("laser must be biased above threshold");
        }
        if self.slope_mw_per_ma <= 0.0 {
            return config("slope efficiency must be positive");
        }
        Ok(())
    }

    /// Optical power in mW at drive current `i_ma`.
    pub fn power_mw(&self, i_ma: f64) -> f64 {
        self.slope_mw_per_ma * (i_ma - self.i_threshold_ma).max(0.0)
    }

    pub fn current_ma(&self, drive: f64) -> f64 {
        self.i_bias_ma + self.mod_gain_ma_per_unit * drive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuantizerStyle {
    #[default]
    Midtread,
}

/// Uniform converter with `2^bits` codes spread over +/- `full_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerModel {
    pub bits: u32,
    pub full_scale: f64,
    #[serde(default)]
    pub style: QuantizerStyle,
}

impl QuantizerModel {
    pub fn new(bits: u32, full_scale: f64) -> Self {
        Self { bits, full_scale, style: QuantizerStyle::Midtread }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits < 2 || self.bits > 32 {
            return config("quantizer needs between 2 and 32 bits");
        }
        if !(self.full_scale > 0.0) {
            return config("quantizer full scale must be positive");
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        2.0 * self.full_scale / (1u64 << self.bits) as f64
    }

    /// Midtread: codes `-2^(b-1) ..= 2^(b-1)-1`, zero is a code.
    pub fn apply(&self, v: f64) -> f64 {
        let step = self.step();
        let half = (1i64 << (self.bits - 1)) as f64;
        let code = (v / step).round().clamp(-half, half - 1.0);
        code * step
    }

    pub fn max_code_value(&self) -> f64 {
        ((1i64 << (self.bits - 1)) as f64 - 1.0) * self.step()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierModel {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
}

fn default_temperature() -> f64 {
    T0_KELVIN
}

impl AmplifierModel {
    pub fn new(gain_db: f64, noise_figure_db: f64) -> Self {
        Self { gain_db, noise_figure_db, temperature_k: T0_KELVIN }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gain_db.is_finite() {
            return config("amplifier gain must be finite");
        }
        if self.noise_figure_db < 0.0 {
            return config("noise figure must be >= 0 dB");
        }
        Ok(())
    }

    /// Input-referred added noise power `k T B (F - 1)`, with B equal to the
    /// sample rate and a 1 ohm reference impedance (power = v^2).
    pub fn input_noise_power(&self, rate_hz: f64) -> f64 {
        BOLTZMANN * self.temperature_k * rate_hz * (db_to_power(self.noise_figure_db) - 1.0)
    }
}

fn map_real(sig: &SampledSignal, f: impl Fn(f64) -> f64) -> Result<SampledSignal> {
    let x = sig.as_real()?;
    Ok(SampledSignal::real(x.iter().map(|&v| f(v)).collect(), sig.rate_hz).with_meta(sig.meta.clone()))
}

pub fn quantize(sig: &SampledSignal, q: &QuantizerModel) -> Result<SampledSignal> {
    q.validate()?;
    map_real(sig, |v| q.apply(v))
}

/// Maps normalized RF drive to optical power (mW) through the P-I curve.
pub fn laser_pi_transfer(sig: &SampledSignal, m: &LaserModel) -> Result<SampledSignal> {
    m.validate()?;
    map_real(sig, |v| m.power_mw(m.current_ma(v)))
}

fn gaussian_noise(n: usize, variance: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite variance");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// Circular complex white Gaussian noise of mean power `power`.
pub fn complex_noise(n: usize, power: f64, seed: u64) -> Vec<num_complex::Complex64> {
    let v = gaussian_noise(2 * n, power / 2.0, seed);
    v.chunks_exact(2).map(|c| num_complex::Complex64::new(c[0], c[1])).collect()
}

/// `sqrt(G) * (x + n)` with `n` white Gaussian of the input-referred noise power.
pub fn noisy_amplify(sig: &SampledSignal, a: &AmplifierModel, seed: u64) -> Result<SampledSignal> {
    a.validate()?;
    let x = sig.as_real()?;
    let g = db_to_power(a.gain_db).sqrt();
    let var = a.input_noise_power(sig.rate_hz);
    let out = if var > 0.0 {
        let n = gaussian_noise(x.len(), var, seed);
        x.iter().zip(n).map(|(v, e)| g * (v + e)).collect()
    } else {
        x.iter().map(|v| g * v).collect()
    };
    Ok(SampledSignal::real(out, sig.rate_hz).with_meta(sig.meta.clone()))
}

/// Adds white Gaussian noise at `snr_db` below the measured signal power.
/// `f64::INFINITY` passes the signal through untouched.
pub fn add_awgn(sig: &SampledSignal, snr_db: f64, seed: u64) -> Result<SampledSignal> {
    let p = sig.power();
    if p <= 0.0 {
        return Err(Error::UndefinedSnr);
    }
    if snr_db == f64::INFINITY {
        return Ok(sig.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::Config("SNR is NaN".into()));
    }
    let var = p / db_to_power(snr_db);
    match &sig.samples {
        crate::signal::Samples::Real(x) => {
            let n = gaussian_noise(x.len(), var, seed);
            Ok(SampledSignal::real(x.iter().zip(n).map(|(a, b)| a + b).collect(), sig.rate_hz)
                .with_meta(sig.meta.clone()))
        }
        crate::signal::Samples::Complex(x) => {
            let n = complex_noise(x.len(), var, seed);
            let out = x.iter().zip(n).map(|(v, e)| v + e).collect();
            Ok(SampledSignal::complex(out, sig.rate_hz).with_meta(sig.meta.clone()))
        }
    }
}
