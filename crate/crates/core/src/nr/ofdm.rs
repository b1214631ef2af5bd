//! CP-OFDM modulation with optional raised-cosine overlap windowing.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::numerology::Numerology;
use super::test_model::ResourceGrid;
use crate::error::{config, Result};
use crate::signal::{SampledSignal, SignalMeta};

/// Rising half of a raised-cosine edge of `w` samples.
pub fn rc_ramp(w: usize) -> Vec<f64> {
    (0..w)
        .map(|i| 0.5 * (1.0 - (PI * (i as f64 + 0.5) / w as f64).cos()))
        .collect()
}

/// Places the occupied subcarriers of one grid row onto the FFT bins.
pub fn map_to_bins(row: &[Complex64], num: &Numerology) -> Vec<Complex64> {
    let mut bins = vec![Complex64::new(0.0, 0.0); num.fft_size];
    for (k, &v) in row.iter().enumerate() {
        bins[num.fft_bin(k)] = v;
    }
    bins
}

/// Turns a resource grid into complex baseband at `num.sample_rate_hz`.
///
/// Transforms are unitary. With `window_len > 0` every symbol is extended by
/// a cyclic suffix of that length, its first and last `window_len` samples
/// are shaped by a raised cosine, and the suffix is overlap-added onto the
/// next symbol's prefix. The last suffix wraps onto the first symbol, as it
/// would when the waveform is played back in a loop.
pub fn ofdm_modulate(grid: &ResourceGrid, num: &Numerology, window_len: usize) -> Result<SampledSignal> {
    if grid.n_subcarriers != num.n_subcarriers() {
        return config("grid width does not match the numerology");
    }
    if !grid.n_symbols.is_multiple_of(num.symbols_per_subframe()) {
        return config("grid must hold whole subframes");
    }
    let min_cp = *num.cp_lengths.iter().min().unwrap();
    if window_len > min_cp {
        return config(format!("window length {window_len} exceeds the shortest CP ({min_cp})"));
    }
    let n = num.fft_size;
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let scale = 1.0 / (n as f64).sqrt();
    let total = num.symbol_start(grid.n_symbols);
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let ramp = rc_ramp(window_len);

    for l in 0..grid.n_symbols {
        let mut body = map_to_bins(grid.row(l), num);
        ifft.process(&mut body);
        body.iter_mut().for_each(|v| *v *= scale);
        let cp = num.cp_len(l);
        let start = num.symbol_start(l);
        // extended symbol: CP | body | suffix
        for i in 0..cp + n + window_len {
            let v = body[(i + n - cp) % n];
            let w = if i < window_len {
                ramp[i]
            } else if i >= cp + n {
                1.0 - ramp[i - cp - n]
            } else {
                1.0
            };
            out[(start + i) % total] += v * w;
        }
    }
    Ok(SampledSignal::complex(out, num.sample_rate_hz).with_meta(SignalMeta {
        description: format!("OFDM baseband, window {window_len}"),
        ..SignalMeta::default()
    }))
}

/// Peak-to-average power ratio in dB.
pub fn papr_db(x: &[Complex64]) -> f64 {
    let mean = crate::signal::mean_power(x);
    let peak = x.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    10.0 * (peak / mean).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nr::numerology::make_numerology;
    use crate::nr::test_model::{build_test_model_grid, TestModelId, TestModelSpec};

    fn setup() -> (Numerology, ResourceGrid) {
        let num = make_numerology(30e3, 20e6).unwrap();
        let g = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm3_1, 51, 9), &num, 1).unwrap();
        (num, g)
    }

    #[test]
    fn dc_tone_gives_constant_samples() {
        let num = make_numerology(30e3, 20e6).unwrap();
        let mut g = ResourceGrid::zeros(28, 612, 14);
        for l in 0..28 {
            g.set(l, num.dc_subcarrier(), Complex64::new(1.0, 0.0));
        }
        let s = ofdm_modulate(&g, &num, 0).unwrap();
        let x = s.as_complex().unwrap();
        assert_eq!(x.len(), 30720);
        let want = 1.0 / 32.0;
        for v in x {
            assert!((v.re - want).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn parseval_holds() {
        let (num, g) = setup();
        let s = ofdm_modulate(&g, &num, 0).unwrap();
        let x = s.as_complex().unwrap();
        for l in [0usize, 1, 5, 14, 27] {
            let st = num.symbol_start(l) + num.cp_len(l);
            let time: f64 = x[st..st + 1024].iter().map(|v| v.norm_sqr()).sum::<f64>() / 1024.0;
            let freq: f64 = g.row(l).iter().map(|v| v.norm_sqr()).sum::<f64>() / 1024.0;
            assert!((time / freq - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn windowing_only_touches_overlap_edges() {
        let (num, g) = setup();
        let plain = ofdm_modulate(&g, &num, 0).unwrap();
        let w = 32;
        let shaped = ofdm_modulate(&g, &num, w).unwrap();
        let (a, b) = (plain.as_complex().unwrap(), shaped.as_complex().unwrap());
        for l in 0..g.n_symbols {
            let st = num.symbol_start(l);
            for i in w..num.cp_len(l) + 1024 {
                assert!((a[st + i] - b[st + i]).norm() < 1e-15, "symbol {l} sample {i}");
            }
            // the overlap region differs
            assert!((0..w).any(|i| (a[st + i] - b[st + i]).norm() > 1e-6));
        }
    }

    #[test]
    fn continuous_tone_survives_windowing() {
        // a DC tone is identical in every symbol, so the overlap-add reconstructs it
        let num = make_numerology(30e3, 20e6).unwrap();
        let mut g = ResourceGrid::zeros(28, 612, 14);
        for l in 0..28 {
            g.set(l, num.dc_subcarrier(), Complex64::new(1.0, 0.0));
        }
        let s = ofdm_modulate(&g, &num, 64).unwrap();
        for v in s.as_complex().unwrap() {
            assert!((v.re - 1.0 / 32.0).abs() < 1e-12);
        }
    }

    #[test]
    fn papr_and_oversized_window() {
        let (num, g) = setup();
        let s = ofdm_modulate(&g, &num, 0).unwrap();
        let x = s.as_complex().unwrap();
        assert!(papr_db(&x[..15360]) > 8.0);
        assert!(ofdm_modulate(&g, &num, 73).is_err());
    }
}
