//! Sample streams shared by every stage of the bench.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Real(v) => v.len(),
            Samples::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> SignalKind {
        match self {
            Samples::Real(_) => SignalKind::Real,
            Samples::Complex(_) => SignalKind::Complex,
        }
    }
}

/// Power level observed at the output of one channel stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub rate_hz: f64,
    pub power_in: f64,
    pub power_out: f64,
}

/// Provenance carried alongside the samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SignalMeta {
    pub carrier_hz: Option<f64>,
    pub seed: Option<u64>,
    pub description: String,
    pub history: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Samples,
    pub rate_hz: f64,
    pub meta: SignalMeta,
}

impl SampledSignal {
    pub fn real(samples: Vec<f64>, rate_hz: f64) -> Self {
        assert!(rate_hz > 0.0, "sample rate must be positive");
        Self {
            samples: Samples::Real(samples),
            rate_hz,
            meta: SignalMeta::default(),
        }
    }

    pub fn complex(samples: Vec<Complex64>, rate_hz: f64) -> Self {
        assert!(rate_hz > 0.0, "sample rate must be positive");
        Self {
            samples: Samples::Complex(samples),
            rate_hz,
            meta: SignalMeta::default(),
        }
    }

    pub fn with_meta(mut self, meta: SignalMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn kind(&self) -> SignalKind {
        self.samples.kind()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.rate_hz
    }

    pub fn as_real(&self) -> Result<&[f64]> {
        match &self.samples {
            Samples::Real(v) => Ok(v),
            Samples::Complex(_) => Err(Error::Input("expected a real signal".into())),
        }
    }

    pub fn as_complex(&self) -> Result<&[Complex64]> {
        match &self.samples {
            Samples::Complex(v) => Ok(v),
            Samples::Real(_) => Err(Error::Input("expected a complex signal".into())),
        }
    }

    /// Mean power, `mean(|x|^2)`.
    pub fn power(&self) -> f64 {
        match &self.samples {
            Samples::Real(v) => mean_power_real(v),
            Samples::Complex(v) => mean_power(v),
        }
    }

    /// Multiplies every sample by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v.iter().map(|x| x * k).collect()),
            Samples::Complex(v) => Samples::Complex(v.iter().map(|x| x * k).collect()),
        };
        Self {
            samples,
            rate_hz: self.rate_hz,
            meta: self.meta.clone(),
        }
    }

    /// Rounds every sample to single precision, as storing it in an IQ file would.
    pub fn rounded_to_f32(&self) -> Self {
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v.iter().map(|&x| x as f32 as f64).collect()),
            Samples::Complex(v) => Samples::Complex(
                v.iter()
                    .map(|x| Complex64::new(x.re as f32 as f64, x.im as f32 as f64))
                    .collect(),
            ),
        };
        Self {
            samples,
            rate_hz: self.rate_hz,
            meta: self.meta.clone(),
        }
    }
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

pub fn mean_power_real(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn power_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_and_scaling() {
        let s = SampledSignal::complex(vec![Complex64::new(1.0, 1.0); 8], 1.0);
        assert!((s.power() - 2.0).abs() < 1e-15);
        assert!((s.scaled(2.0).power() - 8.0).abs() < 1e-12);
        assert!(s.as_real().is_err());
    }

    #[test]
    fn f32_rounding_is_idempotent() {
        let s = SampledSignal::real(vec![0.1, 1.0 / 3.0, -2.7], 10.0);
        let once = s.rounded_to_f32();
        assert_eq!(once, once.rounded_to_f32());
    }
}
