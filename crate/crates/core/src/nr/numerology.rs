//! NR FR1 numerology: resource-block counts, FFT sizing and cyclic-prefix schedule.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Extra room above the occupied subcarriers when picking the FFT size.
pub const FFT_GUARD_MARGIN: f64 = 0.2;

/// Basic NR time unit denominators: Tc = 1 / (480 kHz * 4096).
const TC_DENOM: u64 = 480_000 * 4096;
const KAPPA: u64 = 64;

/// Maximum transmission bandwidth configuration (N_RB) for FR1, indexed by
/// (SCS kHz, channel bandwidth MHz).
const FR1_NRB: &[(u32, u32, usize)] = &[
    (15, 5, 25),
    (15, 10, 52),
    (15, 15, 79),
    (15, 20, 106),
    (15, 25, 133),
    (15, 30, 160),
    (15, 35, 188),
    (15, 40, 216),
    (15, 45, 242),
    (15, 50, 270),
    (30, 5, 11),
    (30, 10, 24),
    (30, 15, 38),
    (30, 20, 51),
    (30, 25, 65),
    (30, 30, 78),
    (30, 35, 92),
    (30, 40, 106),
    (30, 45, 119),
    (30, 50, 133),
    (30, 60, 162),
    (30, 70, 189),
    (30, 80, 217),
    (30, 90, 245),
    (30, 100, 273),
    (60, 10, 11),
    (60, 15, 18),
    (60, 20, 24),
    (60, 25, 31),
    (60, 30, 38),
    (60, 35, 44),
    (60, 40, 51),
    (60, 45, 58),
    (60, 50, 65),
    (60, 60, 79),
    (60, 70, 93),
    (60, 80, 107),
    (60, 90, 121),
    (60, 100, 135),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Numerology {
    pub scs_hz: f64,
    pub bandwidth_hz: f64,
    pub n_rb: usize,
    pub fft_size: usize,
    pub sample_rate_hz: f64,
    /// CP length of every OFDM symbol of one 1 ms subframe.
    pub cp_lengths: Vec<usize>,
    pub symbols_per_slot: usize,
    pub slots_per_frame: usize,
}

impl Numerology {
    pub fn n_subcarriers(&self) -> usize {
        12 * self.n_rb
    }

    pub fn occupied_bw_hz(&self) -> f64 {
        self.n_subcarriers() as f64 * self.scs_hz
    }

    /// Numerology index mu, with scs = 15 kHz * 2^mu.
    pub fn mu(&self) -> u32 {
        (self.scs_hz / 15e3).log2().round() as u32
    }

    pub fn slots_per_subframe(&self) -> usize {
        self.slots_per_frame / 10
    }

    pub fn symbols_per_subframe(&self) -> usize {
        self.symbols_per_slot * self.slots_per_subframe()
    }

    pub fn samples_per_subframe(&self) -> usize {
        self.cp_lengths.iter().map(|cp| cp + self.fft_size).sum()
    }

    /// CP length of OFDM symbol `l` counted from the start of the signal.
    pub fn cp_len(&self, l: usize) -> usize {
        self.cp_lengths[l % self.cp_lengths.len()]
    }

    /// Sample offset of the start (first CP sample) of symbol `l`.
    pub fn symbol_start(&self, l: usize) -> usize {
        let per_sf = self.symbols_per_subframe();
        let whole = l / per_sf;
        let mut pos = whole * self.samples_per_subframe();
        for i in 0..(l % per_sf) {
            pos += self.cp_lengths[i] + self.fft_size;
        }
        pos
    }

    /// Frequency index relative to DC of occupied subcarrier `k` (0-based from the lowest).
    pub fn subcarrier_offset(&self, k: usize) -> i64 {
        k as i64 - (self.n_subcarriers() / 2) as i64
    }

    /// FFT bin holding occupied subcarrier `k`.
    pub fn fft_bin(&self, k: usize) -> usize {
        self.subcarrier_offset(k).rem_euclid(self.fft_size as i64) as usize
    }

    /// Index of the subcarrier located at DC.
    pub fn dc_subcarrier(&self) -> usize {
        self.n_subcarriers() / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size < self.n_subcarriers() {
            return config("fft_size smaller than the occupied subcarrier count");
        }
        if self.fft_size as f64 * self.scs_hz != self.sample_rate_hz {
            return config("sample rate must equal fft_size x scs");
        }
        if self.cp_lengths.is_empty() || self.cp_lengths.contains(&0) {
            return config("every CP length must be positive");
        }
        let per_ms = self.sample_rate_hz / 1000.0;
        if self.samples_per_subframe() as f64 != per_ms {
            return config("CP schedule does not span exactly 1 ms");
        }
        Ok(())
    }
}

/// Looks up N_RB for an FR1 (SCS, channel bandwidth) pair and derives the FFT
/// size, sample rate and normal-CP schedule.
pub fn make_numerology(scs_hz: f64, bandwidth_hz: f64) -> Result<Numerology> {
    let scs_khz = (scs_hz / 1e3).round() as u32;
    let bw_mhz = (bandwidth_hz / 1e6).round() as u32;
    if (scs_khz as f64 * 1e3 - scs_hz).abs() > 1e-6 || (bw_mhz as f64 * 1e6 - bandwidth_hz).abs() > 1e-3 {
        return config(format!("unsupported SCS/bandwidth {scs_hz} Hz / {bandwidth_hz} Hz"));
    }
    let Some(&(_, _, n_rb)) = FR1_NRB.iter().find(|(s, b, _)| *s == scs_khz && *b == bw_mhz) else {
        return config(format!("no FR1 N_RB entry for {scs_khz} kHz / {bw_mhz} MHz"));
    };
    let mu = match scs_khz {
        15 => 0u32,
        30 => 1,
        60 => 2,
        _ => unreachable!(),
    };

    let min_bins = (12 * n_rb) as f64 * (1.0 + FFT_GUARD_MARGIN);
    let fft_size = (min_bins.ceil() as usize).next_power_of_two();
    let scs = scs_khz as u64 * 1000;
    let rate = fft_size as u64 * scs;

    // Normal CP in Tc units: 144*kappa*2^-mu, plus 16*kappa at l = 0 and l = 7*2^mu.
    let to_samples = |tc: u64| -> Result<usize> {
        let num = tc * rate;
        if !num.is_multiple_of(TC_DENOM) {
            return config("CP length is not an integer number of samples");
        }
        Ok((num / TC_DENOM) as usize)
    };
    let short = to_samples((144 * KAPPA) >> mu)?;
    let long = to_samples(((144 * KAPPA) >> mu) + 16 * KAPPA)?;
    let per_sf = 14usize << mu;
    let half = 7usize << mu;
    let cp_lengths = (0..per_sf)
        .map(|l| if l % half == 0 { long } else { short })
        .collect();

    let num = Numerology {
        scs_hz,
        bandwidth_hz,
        n_rb,
        fft_size,
        sample_rate_hz: rate as f64,
        cp_lengths,
        symbols_per_slot: 14,
        slots_per_frame: 10 << mu,
    };
    num.validate()?;
    Ok(num)
}

/// RF placement of the carrier and the real passband simulation rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierConfig {
    pub carrier_hz: f64,
    pub passband_rate_hz: f64,
    pub occupied_bw_hz: f64,
}

impl CarrierConfig {
    /// Band n71 carrier at 627 MHz, simulated at 80x the 30.72 MHz baseband rate.
    pub fn n71(num: &Numerology) -> Self {
        Self {
            carrier_hz: 627e6,
            passband_rate_hz: num.sample_rate_hz * 80.0,
            occupied_bw_hz: num.occupied_bw_hz(),
        }
    }

    /// Runs the passband at the 50 GSa/s arbitrary-waveform-generator rate.
    pub fn high_rate(num: &Numerology) -> Self {
        Self {
            passband_rate_hz: 50e9,
            ..Self::n71(num)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let top = self.carrier_hz + self.occupied_bw_hz / 2.0;
        if self.passband_rate_hz <= 2.0 * top {
            return config(format!(
                "passband rate {} Hz violates Nyquist for content up to {} Hz",
                self.passband_rate_hz, top
            ));
        }
        if self.carrier_hz <= self.occupied_bw_hz / 2.0 {
            return config("carrier too low for a real passband signal");
        }
        Ok(())
    }
}
