//! FIR filtering by FFT overlap-save.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Filters `x` with `taps`, returning `x.len()` samples.
///
/// With `centered`, output `n` is aligned with input `n` for odd-length
/// linear-phase taps (the `(len-1)/2` delay is removed); otherwise the
/// filter is applied causally.
pub fn filter_complex(x: &[Complex64], taps: &[f64], centered: bool) -> Vec<Complex64> {
    if x.is_empty() || taps.is_empty() {
        return vec![Complex64::new(0.0, 0.0); x.len()];
    }
    let l = taps.len();
    let delay = if centered { (l - 1) / 2 } else { 0 };
    let nfft = (4 * l).next_power_of_two().max(4096);
    let step = nfft - l + 1;

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nfft);
    let inv = planner.plan_fft_inverse(nfft);

    let mut hf: Vec<Complex64> = taps.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    hf.resize(nfft, Complex64::new(0.0, 0.0));
    fwd.process(&mut hf);
    let scale = 1.0 / nfft as f64;

    // Full linear convolution index range needed: [delay, delay + x.len()).
    let total = x.len() + delay;
    let mut out = Vec::with_capacity(x.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    let mut start = 0usize; // first convolution output index produced by this block
    while start < total {
        // block covers input samples [start - (l-1), start - (l-1) + nfft)
        for (i, b) in buf.iter_mut().enumerate() {
            let j = start as isize - (l as isize - 1) + i as isize;
            *b = if j >= 0 && (j as usize) < x.len() {
                x[j as usize]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fwd.process(&mut buf);
        buf.iter_mut().zip(&hf).for_each(|(b, h)| *b *= h * scale);
        inv.process(&mut buf);
        for (i, v) in buf[l - 1..].iter().enumerate() {
            let n = start + i;
            if n >= delay && n < total {
                out.push(*v);
            }
        }
        start += step;
    }
    out
}

pub fn filter_real(x: &[f64], taps: &[f64], centered: bool) -> Vec<f64> {
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    filter_complex(&xc, taps, centered).into_iter().map(|v| v.re).collect()
}
