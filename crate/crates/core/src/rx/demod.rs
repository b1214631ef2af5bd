//! CP removal and forward FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::sync::SyncResult;
use crate::error::{Error, Result};
use crate::nr::Numerology;
use crate::signal::SampledSignal;

/// Received subcarrier values, shaped like the transmitted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    pub symbols_per_slot: usize,
    pub values: Vec<Complex64>,
}

impl ReceivedGrid {
    pub fn idx(&self, symbol: usize, subcarrier: usize) -> usize {
        symbol * self.n_subcarriers + subcarrier
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> Complex64 {
        self.values[self.idx(symbol, subcarrier)]
    }

    pub fn row(&self, symbol: usize) -> &[Complex64] {
        &self.values[symbol * self.n_subcarriers..(symbol + 1) * self.n_subcarriers]
    }

    pub fn n_slots(&self) -> usize {
        self.n_symbols / self.symbols_per_slot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DemodOptions {
    /// FFT window starts this many samples before the end of the CP.
    pub backoff: usize,
    /// Upper bound on the number of symbols to demodulate.
    pub max_symbols: Option<usize>,
}

pub fn ofdm_demodulate(bb: &SampledSignal, num: &Numerology, sync: &SyncResult) -> Result<ReceivedGrid> {
    ofdm_demodulate_with(bb, num, sync, &DemodOptions::default())
}

/// Demodulates every whole slot after `sync.start`, removing `sync.cfo_hz`.
///
/// The phase ramp caused by the window backoff is compensated, so perfect
/// timing returns the transmitted grid for any backoff inside the CP.
pub fn ofdm_demodulate_with(bb: &SampledSignal, num: &Numerology, sync: &SyncResult, opts: &DemodOptions) -> Result<ReceivedGrid> {
    let x = bb.as_complex()?;
    let n = num.fft_size;
    let b = opts.backoff;
    if b > *num.cp_lengths.iter().min().unwrap() {
        return Err(Error::Config("FFT backoff longer than the CP".into()));
    }
    let fits = |l: usize| sync.start + num.symbol_start(l) + num.cp_len(l) - b + n <= x.len();
    let mut n_sym = 0;
    while fits(n_sym) && opts.max_symbols.is_none_or(|m| n_sym < m) {
        n_sym += 1;
    }
    n_sym -= n_sym % num.symbols_per_slot;
    if n_sym == 0 {
        return Err(Error::Truncation(format!(
            "fewer than one slot of samples after index {}",
            sync.start
        )));
    }
    let n_sc = num.n_subcarriers();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();
    let w_cfo = -2.0 * PI * sync.cfo_hz / bb.rate_hz;
    let comp: Vec<Complex64> = (0..n_sc)
        .map(|k| Complex64::from_polar(scale, 2.0 * PI * num.subcarrier_offset(k) as f64 * b as f64 / n as f64))
        .collect();
    let mut values = Vec::with_capacity(n_sym * n_sc);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for l in 0..n_sym {
        let p = sync.start + num.symbol_start(l) + num.cp_len(l) - b;
        for (i, v) in buf.iter_mut().enumerate() {
            let idx = p + i;
            *v = if sync.cfo_hz != 0.0 {
                x[idx] * Complex64::from_polar(1.0, w_cfo * idx as f64)
            } else {
                x[idx]
            };
        }
        fft.process(&mut buf);
        values.extend((0..n_sc).map(|k| buf[num.fft_bin(k)] * comp[k]));
    }
    Ok(ReceivedGrid { n_symbols: n_sym, n_subcarriers: n_sc, symbols_per_slot: num.symbols_per_slot, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nr::{build_test_model_grid, make_numerology, ofdm_modulate, ResourceGrid, TestModelId, TestModelSpec};

    fn setup(w: usize) -> (Numerology, ResourceGrid, Vec<Complex64>) {
        let num = make_numerology(30e3, 20e6).unwrap();
        let g = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm3_1a, 51, 21), &num, 1).unwrap();
        let x = ofdm_modulate(&g, &num, w).unwrap().as_complex().unwrap().to_vec();
        (num, g, x)
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn round_trip_is_identity() {
        let (num, g, x) = setup(0);
        let s = SampledSignal::complex(x, num.sample_rate_hz);
        let r = ofdm_demodulate(&s, &num, &SyncResult::at(0)).unwrap();
        assert_eq!(r.n_symbols, g.n_symbols);
        assert!(max_err(&r.values, &g.symbols) < 1e-9);
    }

    #[test]
    fn backoff_is_compensated() {
        let (num, g, x) = setup(32);
        let s = SampledSignal::complex(x, num.sample_rate_hz);
        let opts = DemodOptions { backoff: 20, max_symbols: None };
        let r = ofdm_demodulate_with(&s, &num, &SyncResult::at(0), &opts).unwrap();
        assert!(max_err(&r.values, &g.symbols) < 1e-9);
    }

    #[test]
    fn one_sample_late_gives_linear_phase() {
        let (num, g, x) = setup(0);
        let mut y = vec![Complex64::new(0.0, 0.0)];
        y.extend_from_slice(&x);
        let s = SampledSignal::complex(y, num.sample_rate_hz);
        let r = ofdm_demodulate(&s, &num, &SyncResult::at(0)).unwrap();
        for l in 0..g.n_symbols {
            for k in 0..g.n_subcarriers {
                let ramp = Complex64::from_polar(1.0, -2.0 * PI * num.subcarrier_offset(k) as f64 / 1024.0);
                assert!((r.get(l, k) - g.get(l, k) * ramp).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn delay_beyond_cp_causes_isi() {
        let (num, g, x) = setup(0);
        let d = 100;
        let mut y = vec![Complex64::new(0.0, 0.0); d];
        y.extend_from_slice(&x);
        let s = SampledSignal::complex(y, num.sample_rate_hz);
        let r = ofdm_demodulate(&s, &num, &SyncResult::at(0)).unwrap();
        // undo the pure delay so only the ISI remains
        let mut worst: f64 = 0.0;
        for l in 1..g.n_symbols {
            for k in 0..g.n_subcarriers {
                let ramp = Complex64::from_polar(1.0, -2.0 * PI * num.subcarrier_offset(k) as f64 * d as f64 / 1024.0);
                worst = worst.max((r.get(l, k) - g.get(l, k) * ramp).norm());
            }
        }
        assert!(worst > 1e-3, "{worst}");
    }

    #[test]
    fn short_signal_is_truncation() {
        let (num, _, x) = setup(0);
        let s = SampledSignal::complex(x[..10_000].to_vec(), num.sample_rate_hz);
        assert!(matches!(ofdm_demodulate(&s, &num, &SyncResult::at(0)), Err(Error::Truncation(_))));
    }

    #[test]
    fn cfo_is_removed() {
        let (num, g, x) = setup(0);
        let fs = num.sample_rate_hz;
        let y: Vec<Complex64> = x.iter().enumerate().map(|(n, v)| v * Complex64::from_polar(1.0, 2.0 * PI * 2500.0 * n as f64 / fs)).collect();
        let sync = SyncResult { cfo_hz: 2500.0, ..SyncResult::at(0) };
        let r = ofdm_demodulate(&SampledSignal::complex(y, fs), &num, &sync).unwrap();
        assert!(max_err(&r.values, &g.symbols) < 1e-9);
    }
}
