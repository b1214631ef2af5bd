//! Window functions and Kaiser lowpass design.

use std::f64::consts::PI;

/// Zeroth-order modified Bessel function of the first kind (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

pub fn kaiser(n: usize, beta: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = bessel_i0(beta);
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let r = 2.0 * i as f64 / m - 1.0;
            bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / denom
        })
        .collect()
}

/// Periodic Hann window (for spectral estimation).
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Kaiser beta for a stopband attenuation in dB.
pub fn kaiser_beta(atten_db: f64) -> f64 {
    if atten_db > 50.0 {
        0.1102 * (atten_db - 8.7)
    } else if atten_db >= 21.0 {
        0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0)
    } else {
        0.0
    }
}

/// Odd Kaiser filter length for a transition `width` (cycles/sample).
pub fn kaiser_len(atten_db: f64, width: f64) -> usize {
    let n = ((atten_db - 7.95) / (2.285 * 2.0 * PI * width)).ceil() as usize + 1;
    n | 1
}

/// Windowed-sinc lowpass with cutoff `fc` (cycles/sample), unit DC gain.
pub fn kaiser_lowpass(n_taps: usize, fc: f64, beta: f64) -> Vec<f64> {
    let w = kaiser(n_taps, beta);
    let mid = (n_taps - 1) as f64 / 2.0;
    let mut h: Vec<f64> = (0..n_taps)
        .map(|i| {
            let t = i as f64 - mid;
            let s = if t == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * t).sin() / (PI * t)
            };
            s * w[i]
        })
        .collect();
    let dc: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= dc);
    h
}

/// Lowpass with passband edge `pass` and stopband edge `stop` (both cycles/sample).
pub fn design_lowpass(pass: f64, stop: f64, atten_db: f64) -> Vec<f64> {
    assert!(stop > pass && pass > 0.0 && stop < 0.5);
    let n = kaiser_len(atten_db, stop - pass);
    kaiser_lowpass(n, 0.5 * (pass + stop), kaiser_beta(atten_db))
}

/// Real bandpass centred on `center` (cycles/sample): a lowpass prototype of
/// half-width `half_pass`/`half_stop` shifted up by a cosine.
pub fn design_bandpass(center: f64, half_pass: f64, half_stop: f64, atten_db: f64) -> Vec<f64> {
    let lp = design_lowpass(half_pass, half_stop, atten_db);
    let mid = (lp.len() - 1) as f64 / 2.0;
    lp.iter()
        .enumerate()
        .map(|(i, h)| 2.0 * h * (2.0 * PI * center * (i as f64 - mid)).cos())
        .collect()
}

/// |H(f)| of real taps at `f` cycles/sample.
pub fn magnitude_at(taps: &[f64], f: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (n, h) in taps.iter().enumerate() {
        let a = -2.0 * PI * f * n as f64;
        re += h * a.cos();
        im += h * a.sin();
    }
    (re * re + im * im).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) and I0(5) from tables
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008).abs() < 1e-12);
        assert!((bessel_i0(5.0) - 27.239_871_823_604_45).abs() < 1e-9);
    }

    #[test]
    fn lowpass_meets_mask() {
        let h = design_lowpass(0.1, 0.15, 80.0);
        for f in [0.0, 0.05, 0.1] {
            assert!((magnitude_at(&h, f) - 1.0).abs() < 1e-3, "{f}");
        }
        for f in [0.15, 0.2, 0.3, 0.45] {
            assert!(20.0 * magnitude_at(&h, f).log10() < -78.0, "{f}");
        }
    }

    #[test]
    fn bandpass_centre_and_rejection() {
        let h = design_bandpass(0.25, 0.02, 0.04, 70.0);
        assert!((magnitude_at(&h, 0.25) - 1.0).abs() < 1e-3);
        assert!((magnitude_at(&h, 0.265) - 1.0).abs() < 1e-3);
        assert!(20.0 * magnitude_at(&h, 0.2).log10() < -68.0);
        assert!(20.0 * magnitude_at(&h, 0.0).log10() < -68.0);
    }
}
