//! Frame timing and carrier-frequency-offset estimation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nr::ofdm::map_to_bins;
use crate::nr::{Numerology, ReRole, ResourceGrid};
use crate::signal::SampledSignal;

pub const DEFAULT_SYNC_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    /// Sample index of the first CP sample of the frame.
    pub start: usize,
    /// Parabolic refinement of the correlation peak, in samples (-0.5..0.5).
    pub frac_timing: f64,
    pub cfo_hz: f64,
    /// Normalized correlation at the peak (0..1).
    pub peak_metric: f64,
}

impl SyncResult {
    /// Perfect timing at sample `start`, no frequency offset.
    pub fn at(start: usize) -> Self {
        Self { start, frac_timing: 0.0, cfo_hz: 0.0, peak_metric: 1.0 }
    }
}

/// Time-domain DMRS symbol of the first slot, CP included, and its offset
/// from the frame start.
fn dmrs_template(num: &Numerology, reference: &ResourceGrid) -> Result<(Vec<Complex64>, usize)> {
    let l = (0..reference.symbols_per_slot.min(reference.n_symbols))
        .find(|&l| reference.row_roles(l).contains(&ReRole::Dmrs))
        .ok_or_else(|| Error::SyncFailure("reference has no DMRS in its first slot".into()))?;
    let row: Vec<Complex64> = reference
        .row(l)
        .iter()
        .zip(reference.row_roles(l))
        .map(|(&v, &r)| if r == ReRole::Dmrs { v } else { Complex64::new(0.0, 0.0) })
        .collect();
    let n = num.fft_size;
    let mut body = map_to_bins(&row, num);
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut body);
    let s = 1.0 / (n as f64).sqrt();
    let cp = num.cp_len(l);
    let t = (0..cp + n).map(|i| body[(i + n - cp) % n] * s).collect();
    Ok((t, num.symbol_start(l)))
}

/// `sum_i x[d+i] conj(t[i])` for every lag `d` with the template inside `x`.
fn xcorr(x: &[Complex64], t: &[Complex64]) -> Vec<Complex64> {
    let lags = x.len() + 1 - t.len();
    let nfft = (x.len() + t.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nfft);
    let inv = planner.plan_fft_inverse(nfft);
    let mut a = x.to_vec();
    a.resize(nfft, Complex64::new(0.0, 0.0));
    let mut b = t.to_vec();
    b.resize(nfft, Complex64::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    a.iter_mut().zip(&b).for_each(|(u, v)| *u *= v.conj());
    inv.process(&mut a);
    let s = 1.0 / nfft as f64;
    a[..lags].iter().map(|v| v * s).collect()
}

/// CP autocorrelation `sum x[d+i] conj(x[d+i+N])` over a `len`-sample window, for every `d`.
fn cp_autocorr(x: &[Complex64], n: usize, len: usize) -> Vec<Complex64> {
    if x.len() < n + len {
        return Vec::new();
    }
    let prod: Vec<Complex64> = (0..x.len() - n).map(|i| x[i] * x[i + n].conj()).collect();
    let mut out = Vec::with_capacity(prod.len() + 1 - len);
    let mut acc: Complex64 = prod[..len].iter().sum();
    out.push(acc);
    for d in 1..=prod.len() - len {
        acc += prod[d + len - 1] - prod[d - 1];
        out.push(acc);
    }
    out
}

fn rotate(x: &[Complex64], cfo_hz: f64, fs: f64) -> Vec<Complex64> {
    let w = -2.0 * PI * cfo_hz / fs;
    x.iter().enumerate().map(|(n, v)| v * Complex64::from_polar(1.0, w * n as f64)).collect()
}

/// Estimates frame start and carrier frequency offset.
///
/// A coarse CFO comes from the phase of the CP autocorrelation around its
/// strongest lags, the frame start from correlation against the first slot's
/// DMRS symbol, and a refined CFO from the CP tails once symbol boundaries
/// are known. The CFO is unambiguous within half a subcarrier spacing.
pub fn time_synchronize(bb: &SampledSignal, num: &Numerology, reference: &ResourceGrid) -> Result<SyncResult> {
    time_synchronize_with(bb, num, reference, DEFAULT_SYNC_THRESHOLD)
}

pub fn time_synchronize_with(
    bb: &SampledSignal,
    num: &Numerology,
    reference: &ResourceGrid,
    threshold: f64,
) -> Result<SyncResult> {
    let x = bb.as_complex()?;
    let n = num.fft_size;
    let fs = bb.rate_hz;
    let slot_len = num.symbol_start(num.symbols_per_slot);
    if x.len() < slot_len {
        return Err(Error::Truncation(format!("{} samples is shorter than one slot", x.len())));
    }
    let min_cp = *num.cp_lengths.iter().min().unwrap();

    // coarse CFO over the strongest CP correlation lags
    let g = cp_autocorr(x, n, min_cp);
    let peak = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let strong: Complex64 = g.iter().filter(|v| v.norm() > 0.7 * peak).sum();
    let coarse = if peak > 0.0 { -strong.arg() * fs / (2.0 * PI * n as f64) } else { 0.0 };

    let y = rotate(x, coarse, fs);
    let (t, offset) = dmrs_template(num, reference)?;
    if y.len() < offset + t.len() {
        return Err(Error::Truncation("signal too short for the DMRS template".into()));
    }
    let c = xcorr(&y[offset..], &t);
    let et: f64 = t.iter().map(|v| v.norm_sqr()).sum();
    // sliding window energy of y[offset + d .. offset + d + len]
    let p: Vec<f64> = y[offset..].iter().map(|v| v.norm_sqr()).collect();
    let mut ex = Vec::with_capacity(c.len());
    let mut acc: f64 = p[..t.len()].iter().sum();
    ex.push(acc);
    for d in 1..c.len() {
        acc += p[d + t.len() - 1] - p[d - 1];
        ex.push(acc);
    }
    let metric: Vec<f64> = c
        .iter()
        .zip(&ex)
        .map(|(v, e)| if *e > 0.0 { v.norm_sqr() / (et * e) } else { 0.0 })
        .collect();
    let (best, &best_metric) = metric
        .iter()
        .enumerate()
        .fold((0, &-1.0), |acc, (i, m)| if *m > *acc.1 { (i, m) } else { acc });
    if !(best_metric >= threshold) {
        return Err(Error::SyncFailure(format!(
            "DMRS correlation peak {best_metric:.3} below threshold {threshold}"
        )));
    }
    let frac_timing = if best > 0 && best + 1 < c.len() {
        let (a, b, d) = (c[best - 1].norm(), c[best].norm(), c[best + 1].norm());
        let den = a - 2.0 * b + d;
        if den.abs() > 0.0 { (0.5 * (a - d) / den).clamp(-0.5, 0.5) } else { 0.0 }
    } else {
        0.0
    };
    let start = best;

    // refined CFO from the second half of every complete CP
    let mut acc = Complex64::new(0.0, 0.0);
    let mut l = 0;
    loop {
        let s = start + num.symbol_start(l);
        let cp = num.cp_len(l);
        if s + cp + n > y.len() {
            break;
        }
        for i in cp / 2..cp {
            acc += y[s + i] * y[s + i + n].conj();
        }
        l += 1;
    }
    let fine = if acc.norm() > 0.0 { -acc.arg() * fs / (2.0 * PI * n as f64) } else { 0.0 };
    Ok(SyncResult { start, frac_timing, cfo_hz: coarse + fine, peak_metric: best_metric })
}
