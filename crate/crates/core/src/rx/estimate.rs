//! Least-squares channel estimation on the DMRS.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::demod::ReceivedGrid;
use crate::error::{Error, Result};
use crate::nr::{ReRole, ResourceGrid};

/// Per-slot channel gain of every occupied subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    /// `per_slot[s][k]`.
    pub per_slot: Vec<Vec<Complex64>>,
    /// False where the estimate is not usable (non-finite).
    pub valid: Vec<Vec<bool>>,
    /// Linear phase slope removed before interpolation, in samples of delay.
    pub delay_samples: Vec<f64>,
}

impl ChannelEstimate {
    pub fn n_subcarriers(&self) -> usize {
        self.per_slot.first().map_or(0, |v| v.len())
    }

    /// An estimate equal to `h` on every subcarrier of `n_slots` slots.
    pub fn known(h: Vec<Complex64>, n_slots: usize) -> Self {
        let valid = vec![h.iter().map(|v| v.re.is_finite() && v.im.is_finite()).collect(); n_slots];
        Self { per_slot: vec![h; n_slots], valid, delay_samples: vec![0.0; n_slots] }
    }
}

fn check_shape(rx: &ReceivedGrid, reference: &ResourceGrid) -> Result<()> {
    if rx.n_subcarriers != reference.n_subcarriers || rx.symbols_per_slot != reference.symbols_per_slot {
        return Err(Error::Input("received and reference grids differ in shape".into()));
    }
    if rx.n_symbols > reference.n_symbols {
        return Err(Error::Input("reference grid is shorter than the received grid".into()));
    }
    Ok(())
}

/// LS estimate `Y/X` at the DMRS, averaged over the slot's DMRS symbols,
/// then linearly interpolated across frequency and held over the slot.
///
/// The common delay ramp is removed before interpolating and restored after,
/// so a pure delay is reproduced exactly. Subcarriers outside the outermost
/// pilots are extrapolated from the two nearest pilots. `fft_size` sets the
/// units of the reported delay.
pub fn estimate_channel_ls(rx: &ReceivedGrid, reference: &ResourceGrid, fft_size: usize) -> Result<ChannelEstimate> {
    check_shape(rx, reference)?;
    let n_sc = rx.n_subcarriers;
    let mut per_slot = Vec::new();
    let mut valid = Vec::new();
    let mut delays = Vec::new();
    for slot in 0..rx.n_slots() {
        let dmrs = reference.dmrs_symbols_in_slot(slot);
        if dmrs.is_empty() {
            return Err(Error::Estimation(format!("slot {slot} has no DMRS")));
        }
        let mut sum = vec![Complex64::new(0.0, 0.0); n_sc];
        let mut cnt = vec![0usize; n_sc];
        for &l in &dmrs {
            for k in 0..n_sc {
                if reference.role(l, k) == ReRole::Dmrs {
                    let x = reference.reference[reference.idx(l, k)];
                    if x.norm_sqr() > 0.0 {
                        sum[k] += rx.get(l, k) / x;
                        cnt[k] += 1;
                    }
                }
            }
        }
        let pilots: Vec<usize> = (0..n_sc).filter(|&k| cnt[k] > 0).collect();
        if pilots.len() < 2 {
            return Err(Error::Estimation(format!("slot {slot} has fewer than two pilots")));
        }
        let hp: Vec<Complex64> = pilots.iter().map(|&k| sum[k] / cnt[k] as f64).collect();

        // common phase slope per subcarrier
        let z: Complex64 = hp
            .windows(2)
            .zip(pilots.windows(2))
            .map(|(h, k)| (h[1] * h[0].conj()).powf(1.0 / (k[1] - k[0]) as f64))
            .sum();
        let slope = if z.norm() > 0.0 { z.arg() } else { 0.0 };
        let ramp = |k: usize| Complex64::from_polar(1.0, slope * k as f64);
        let g: Vec<Complex64> = hp.iter().zip(&pilots).map(|(h, &k)| h * ramp(k).conj()).collect();

        let mut h = vec![Complex64::new(0.0, 0.0); n_sc];
        let mut seg = 0;
        for (k, hk) in h.iter_mut().enumerate() {
            while seg + 2 < pilots.len() && k > pilots[seg + 1] {
                seg += 1;
            }
            let (k0, k1) = (pilots[seg] as f64, pilots[seg + 1] as f64);
            let t = (k as f64 - k0) / (k1 - k0);
            *hk = (g[seg] + (g[seg + 1] - g[seg]) * t) * ramp(k);
        }
        valid.push(h.iter().map(|v| v.re.is_finite() && v.im.is_finite()).collect());
        per_slot.push(h);
        delays.push(-slope * fft_size as f64 / (2.0 * PI));
    }
    Ok(ChannelEstimate { per_slot, valid, delay_samples: delays })
}

/// Removes the phase drift left by a residual frequency offset: the
/// slot-to-slot rotation of the channel estimate gives the offset, and every
/// symbol is counter-rotated relative to its slot's DMRS. Returns the offset
/// in Hz; one-slot grids are left untouched.
pub fn track_common_phase(
    rx: &mut ReceivedGrid,
    h: &ChannelEstimate,
    reference: &ResourceGrid,
    symbol_times_s: &[f64],
) -> f64 {
    let n_slots = h.per_slot.len().min(rx.n_slots());
    if n_slots < 2 {
        return 0.0;
    }
    let mid = |slot: usize| {
        let d = reference.dmrs_symbols_in_slot(slot);
        d.iter().map(|&l| symbol_times_s[l]).sum::<f64>() / d.len() as f64
    };
    let mut z = Complex64::new(0.0, 0.0);
    let mut dt = 0.0;
    for s in 0..n_slots - 1 {
        let c: Complex64 = h.per_slot[s + 1].iter().zip(&h.per_slot[s]).map(|(a, b)| a * b.conj()).sum();
        z += c;
        dt += mid(s + 1) - mid(s);
    }
    dt /= (n_slots - 1) as f64;
    let cfo = z.arg() / (2.0 * PI * dt);
    for s in 0..n_slots {
        let t0 = mid(s);
        let n = rx.n_subcarriers;
        let first = s * rx.symbols_per_slot;
        for (l, &t) in symbol_times_s.iter().enumerate().skip(first).take(rx.symbols_per_slot) {
            let rot = Complex64::from_polar(1.0, -2.0 * PI * cfo * (t - t0));
            rx.values[l * n..(l + 1) * n].iter_mut().for_each(|v| *v *= rot);
        }
    }
    cfo
}

/// Pools the estimate over all slots for a time-invariant channel. Each
/// slot's common phase relative to slot 0 is removed from both the estimate
/// and the received symbols of that slot before averaging.
pub fn average_over_slots(rx: &mut ReceivedGrid, h: &ChannelEstimate) -> ChannelEstimate {
    let n_slots = h.per_slot.len().min(rx.n_slots());
    if n_slots < 2 {
        return h.clone();
    }
    let n_sc = rx.n_subcarriers;
    let mut acc = vec![Complex64::new(0.0, 0.0); n_sc];
    for s in 0..n_slots {
        let z: Complex64 = h.per_slot[s].iter().zip(&h.per_slot[0]).map(|(a, b)| a * b.conj()).sum();
        let rot = if z.norm() > 0.0 { (z / z.norm()).conj() } else { Complex64::new(1.0, 0.0) };
        acc.iter_mut().zip(&h.per_slot[s]).for_each(|(a, v)| *a += v * rot);
        let lo = s * rx.symbols_per_slot * n_sc;
        let hi = (s + 1) * rx.symbols_per_slot * n_sc;
        rx.values[lo..hi].iter_mut().for_each(|v| *v *= rot);
    }
    let mean: Vec<Complex64> = acc.iter().map(|a| a / n_slots as f64).collect();
    let delay = h.delay_samples.iter().sum::<f64>() / h.delay_samples.len() as f64;
    let mut out = ChannelEstimate::known(mean, h.per_slot.len());
    out.delay_samples = vec![delay; h.per_slot.len()];
    out
}
