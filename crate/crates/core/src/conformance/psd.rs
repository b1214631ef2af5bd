//! Welch power spectral density.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dsp::window::hann;
use crate::error::{Error, Result};
use crate::signal::{SampledSignal, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hann,
    Rectangular,
}

pub const DEFAULT_SEGMENT: usize = 4096;
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Density per bin, in power per Hz. Real signals get a one-sided estimate
/// over `[0, fs/2]`, complex signals a two-sided one over `[-fs/2, fs/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub freqs_hz: Vec<f64>,
    pub density: Vec<f64>,
    /// Bin spacing.
    pub bin_hz: f64,
    /// Equivalent noise bandwidth of one bin.
    pub rbw_hz: f64,
    pub total_power: f64,
}

impl PsdEstimate {
    /// Density in dB relative to the total power, per Hz.
    pub fn density_db(&self) -> Vec<f64> {
        self.density
            .iter()
            .map(|d| 10.0 * (d / self.total_power).max(1e-300).log10())
            .collect()
    }

    pub fn integrated_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_hz
    }

    /// Power inside `[lo, hi]`, counting partially covered bins pro rata.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let half = self.bin_hz / 2.0;
        self.freqs_hz
            .iter()
            .zip(&self.density)
            .map(|(&f, &d)| {
                let overlap = (hi.min(f + half) - lo.max(f - half)).max(0.0);
                d * overlap
            })
            .sum()
    }
}

/// Welch-averaged periodogram, normalized so the integral equals the mean power.
pub fn welch_psd(sig: &SampledSignal, segment_len: usize, overlap_frac: f64, window: WindowKind) -> Result<PsdEstimate> {
    let n = sig.len();
    if segment_len < 2 || segment_len > n {
        return Err(Error::Input(format!("segment of {segment_len} samples does not fit a {n}-sample signal")));
    }
    if !(0.0..1.0).contains(&overlap_frac) {
        return Err(Error::Input("overlap must lie in [0, 1)".into()));
    }
    let l = segment_len;
    let w = match window {
        WindowKind::Hann => hann(l),
        WindowKind::Rectangular => vec![1.0; l],
    };
    let wpow: f64 = w.iter().map(|v| v * v).sum();
    let wsum: f64 = w.iter().sum();
    let step = ((l as f64 * (1.0 - overlap_frac)).round() as usize).max(1);
    let fs = sig.rate_hz;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(l);
    let mut acc = vec![0.0; l];
    let mut count = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    let mut start = 0;
    while start + l <= n {
        match &sig.samples {
            Samples::Real(x) => buf.iter_mut().enumerate().for_each(|(i, b)| *b = Complex64::new(x[start + i] * w[i], 0.0)),
            Samples::Complex(x) => buf.iter_mut().enumerate().for_each(|(i, b)| *b = x[start + i] * w[i]),
        }
        fft.process(&mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b.norm_sqr());
        count += 1;
        start += step;
    }
    let scale = 1.0 / (fs * wpow * count as f64);
    let bin_hz = fs / l as f64;
    let rbw_hz = fs * wpow / (wsum * wsum);
    let (freqs_hz, density) = match sig.samples {
        Samples::Real(_) => {
            let half = l / 2;
            let f = (0..=half).map(|k| k as f64 * bin_hz).collect();
            let d = (0..=half)
                .map(|k| {
                    let edge = k == 0 || (l.is_multiple_of(2) && k == half);
                    acc[k] * scale * if edge { 1.0 } else { 2.0 }
                })
                .collect();
            (f, d)
        }
        Samples::Complex(_) => {
            let f = (0..l).map(|i| (i as f64 - (l / 2) as f64) * bin_hz).collect();
            let d = (0..l).map(|i| acc[(i + l - l / 2) % l] * scale).collect();
            (f, d)
        }
    };
    Ok(PsdEstimate { freqs_hz, density, bin_hz, rbw_hz, total_power: sig.power() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::stages::complex_noise;
    use std::f64::consts::PI;

    #[test]
    fn white_noise_integrates_to_its_variance() {
        let x = complex_noise(1_000_000, 1.0, 2);
        let real: Vec<f64> = x.iter().map(|v| v.re * 2f64.sqrt()).collect();
        for sig in [SampledSignal::complex(x, 1e6), SampledSignal::real(real, 1e6)] {
            let p = welch_psd(&sig, DEFAULT_SEGMENT, DEFAULT_OVERLAP, WindowKind::Hann).unwrap();
            assert!((p.integrated_power() - 1.0).abs() < 0.01, "{}", p.integrated_power());
        }
    }

    #[test]
    fn tone_on_bin_centre() {
        let fs = 4096.0;
        let f0 = 256.0;
        let x: Vec<f64> = (0..65536).map(|n| 2f64.sqrt() * (2.0 * PI * f0 * n as f64 / fs).cos()).collect();
        let p = welch_psd(&SampledSignal::real(x, fs), 4096, 0.5, WindowKind::Hann).unwrap();
        let (ipk, _) = p.density.iter().enumerate().fold((0, 0.0), |a, (i, &d)| if d > a.1 { (i, d) } else { a });
        assert_eq!(p.freqs_hz[ipk], f0);
        // Hann main lobe holds practically all of the power
        assert!((p.band_power(f0 - 2.0, f0 + 2.0) - 1.0).abs() < 1e-3);
        assert!((p.integrated_power() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_lands_in_the_dc_bin() {
        let s = SampledSignal::complex(vec![Complex64::new(0.5, 0.5); 8192], 1e3);
        let p = welch_psd(&s, 1024, 0.5, WindowKind::Rectangular).unwrap();
        let dc = p.freqs_hz.iter().position(|&f| f == 0.0).unwrap();
        assert!((p.density[dc] * p.bin_hz - 0.5).abs() < 1e-12);
        let rest: f64 = p.density.iter().enumerate().filter(|(i, _)| *i != dc).map(|(_, d)| d).sum();
        assert!(rest < 1e-20);
    }

    #[test]
    fn segment_longer_than_signal_is_input_error() {
        let s = SampledSignal::real(vec![0.0; 100], 1.0);
        assert!(matches!(welch_psd(&s, 128, 0.5, WindowKind::Hann), Err(Error::Input(_))));
    }
}
