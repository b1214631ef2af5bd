//! Rational polyphase resampler with zero group delay.

use num_complex::Complex64;

use super::window::{kaiser_beta, kaiser_len, kaiser_lowpass};
use crate::error::{config, Result};

/// Anti-imaging / anti-aliasing filter mask, in Hz at the lower of the two rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResamplerDesign {
    pub pass_hz: f64,
    pub stop_hz: f64,
    pub atten_db: f64,
}

/// Changes the sample rate by `up / down`.
///
/// Output sample `m` is aligned with input time `m * down / up`, so the filter
/// delay is removed and no samples need trimming.
#[derive(Debug, Clone)]
pub struct Resampler {
    up: usize,
    down: usize,
    half: usize,
    /// `branches[p][i] = h[p + i * up]`.
    branches: Vec<Vec<f64>>,
    taps_len: usize,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Reduced integer ratio `out / in` for two integral rates.
pub fn rate_ratio(in_hz: f64, out_hz: f64) -> Result<(usize, usize)> {
    if in_hz.fract() != 0.0 || out_hz.fract() != 0.0 || in_hz <= 0.0 || out_hz <= 0.0 {
        return config(format!("rates must be positive whole Hz: {in_hz} -> {out_hz}"));
    }
    let (a, b) = (out_hz as u64, in_hz as u64);
    let g = gcd(a, b);
    Ok(((a / g) as usize, (b / g) as usize))
}

impl Resampler {
    pub fn new(in_hz: f64, out_hz: f64, design: ResamplerDesign) -> Result<Self> {
        let (up, down) = rate_ratio(in_hz, out_hz)?;
        let low_rate = in_hz.min(out_hz);
        if design.stop_hz > low_rate - design.pass_hz + 1e-6 || design.pass_hz >= design.stop_hz {
            return config("resampler mask must satisfy pass < stop <= low_rate - pass");
        }
        let fs = in_hz * up as f64;
        let width = (design.stop_hz - design.pass_hz) / fs;
        let n = kaiser_len(design.atten_db, width);
        let fc = 0.5 * (design.pass_hz + design.stop_hz) / fs;
        let mut h = kaiser_lowpass(n, fc, kaiser_beta(design.atten_db));
        h.iter_mut().for_each(|v| *v *= up as f64);
        Ok(Self::from_taps(up, down, h))
    }

    /// Wraps explicit odd-length linear-phase taps at the intermediate rate.
    pub fn from_taps(up: usize, down: usize, h: Vec<f64>) -> Self {
        assert!(h.len() % 2 == 1, "taps must have odd length");
        let half = (h.len() - 1) / 2;
        let branches = (0..up)
            .map(|p| h.iter().skip(p).step_by(up).copied().collect())
            .collect();
        Self {
            up,
            down,
            half,
            branches,
            taps_len: h.len(),
        }
    }

    pub fn ratio(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn taps_len(&self) -> usize {
        self.taps_len
    }

    pub fn output_len(&self, n_in: usize) -> usize {
        (n_in * self.up).div_ceil(self.down)
    }

    /// Index one past the last input sample that output `m` depends on.
    pub fn input_needed(&self, m: usize) -> usize {
        (m * self.down + self.half) / self.up + 1
    }

    /// Output sample `m` computed from `x`; samples beyond `x` count as zero.
    pub fn output_at(&self, m: usize, x: &[Complex64]) -> Complex64 {
        self.output_at_window(m, x, 0)
    }

    /// Like [`Self::output_at`], with `x[0]` holding input sample `base`.
    /// Inputs before `base` count as zero.
    pub fn output_at_window(&self, m: usize, x: &[Complex64], base: usize) -> Complex64 {
        let t = m * self.down + self.half;
        let p = t % self.up;
        let j0 = (t / self.up) as isize - base as isize;
        let branch = &self.branches[p];
        let mut acc = Complex64::new(0.0, 0.0);
        let n = x.len() as isize;
        // x index j0 - i must lie in [0, n)
        let i_lo = (j0 - n + 1).max(0) as usize;
        let i_hi = ((j0 + 1).max(0) as usize).min(branch.len());
        for i in i_lo..i_hi {
            acc += x[(j0 - i as isize) as usize] * branch[i];
        }
        acc
    }

    /// First input sample that output `m` depends on.
    pub fn input_first(&self, m: usize) -> usize {
        let t = m * self.down + self.half;
        let j0 = t / self.up;
        let len = self.branches[t % self.up].len();
        (j0 + 1).saturating_sub(len)
    }

    pub fn process(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.output_len(x.len())).map(|m| self.output_at(m, x)).collect()
    }

    pub fn process_real(&self, x: &[f64]) -> Vec<f64> {
        let t = self.output_len(x.len());
        (0..t)
            .map(|m| {
                let tt = m * self.down + self.half;
                let p = tt % self.up;
                let j0 = (tt / self.up) as isize;
                let branch = &self.branches[p];
                let n = x.len() as isize;
                let i_lo = (j0 - n + 1).max(0) as usize;
                let i_hi = ((j0 + 1).max(0) as usize).min(branch.len());
                (i_lo..i_hi)
                    .map(|i| x[(j0 - i as isize) as usize] * branch[i])
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(n: usize, f: f64, fs: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * PI * f * i as f64 / fs))
            .collect()
    }

    #[test]
    fn ratio_reduction() {
        assert_eq!(rate_ratio(30.72e6, 2.4576e9).unwrap(), (80, 1));
        assert_eq!(rate_ratio(50e9, 10e9).unwrap(), (1, 5));
        assert_eq!(rate_ratio(30.72e6, 50e9).unwrap(), (78125, 48));
        assert!(rate_ratio(1.5, 3.0).is_err());
    }

    #[test]
    fn interpolated_tone_is_aligned_and_clean() {
        let fs = 1e6;
        let r = Resampler::new(fs, 4e6, ResamplerDesign { pass_hz: 200e3, stop_hz: 500e3, atten_db: 90.0 }).unwrap();
        let x = tone(2000, 50e3, fs);
        let y = r.process(&x);
        assert_eq!(y.len(), 8000);
        let want = tone(8000, 50e3, 4e6);
        let err = y[1000..7000]
            .iter()
            .zip(&want[1000..7000])
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / 6000.0;
        assert!(10.0 * err.log10() < -80.0, "{}", 10.0 * err.log10());
    }

    #[test]
    fn up_then_down_round_trip() {
        let fs = 1e6;
        let d = ResamplerDesign { pass_hz: 300e3, stop_hz: 700e3, atten_db: 90.0 };
        let up = Resampler::new(fs, 5e6, d).unwrap();
        let down = Resampler::new(5e6, fs, d).unwrap();
        let x: Vec<Complex64> = tone(3000, 120e3, fs)
            .iter()
            .zip(tone(3000, -250e3, fs))
            .map(|(a, b)| a + b * 0.5)
            .collect();
        let y = down.process(&up.process(&x));
        assert_eq!(y.len(), x.len());
        let err: f64 = y[200..2800].iter().zip(&x[200..2800]).map(|(a, b)| (a - b).norm_sqr()).sum();
        let pw: f64 = x[200..2800].iter().map(|a| a.norm_sqr()).sum();
        assert!(10.0 * (err / pw).log10() < -70.0);
    }

    #[test]
    fn fractional_ratio() {
        // 48 kHz -> 44.1 kHz
        let r = Resampler::new(48e3, 44.1e3, ResamplerDesign { pass_hz: 15e3, stop_hz: 22e3, atten_db: 80.0 }).unwrap();
        assert_eq!(r.ratio(), (147, 160));
        let x = tone(4800, 1e3, 48e3);
        let y = r.process(&x);
        assert_eq!(y.len(), 4410);
        let want = tone(4410, 1e3, 44.1e3);
        for i in 500..3900 {
            assert!((y[i] - want[i]).norm() < 1e-3, "{i}");
        }
    }

    #[test]
    fn real_path_matches_complex_path() {
        let r = Resampler::new(1e6, 3e6, ResamplerDesign { pass_hz: 200e3, stop_hz: 600e3, atten_db: 60.0 }).unwrap();
        let x: Vec<f64> = (0..500).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect();
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let a = r.process_real(&x);
        let b = r.process(&xc);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v.re).abs() < 1e-12 && v.im == 0.0);
        }
    }
}
