//! Complete receive chain from passband (or baseband) samples to an
//! equalized grid.

use serde::{Deserialize, Serialize};

use super::costas::{costas_downconvert, CostasConfig, CostasTrace};
use super::demod::{ofdm_demodulate_with, DemodOptions, ReceivedGrid};
use super::equalize::{zf_equalize, EqualizedGrid, DEFAULT_ZF_FLOOR};
use super::estimate::{average_over_slots, estimate_channel_ls, track_common_phase, ChannelEstimate};
use super::sync::{time_synchronize_with, SyncResult, DEFAULT_SYNC_THRESHOLD};
use crate::error::{Error, Result};
use crate::nr::{downconvert_fixed, CarrierConfig, Numerology, ResourceGrid};
use crate::signal::{SampledSignal, SignalKind};

/// Which carrier-recovery path the receiver may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierRecovery {
    /// Costas loop, falling back when it does not lock.
    #[default]
    Auto,
    Costas,
    /// Nominal oscillator with CP-based CFO and DMRS common-phase tracking.
    Fallback,
}

/// The path that actually produced the baseband.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryPath {
    Costas,
    Fallback,
    /// Input was already complex baseband.
    Baseband,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RxConfig {
    pub carrier_recovery: CarrierRecovery,
    /// Loop parameters; carrier, rates and bandwidth are taken from the scenario.
    pub costas: CostasConfig,
    /// Samples the FFT window is moved into the CP; `None` uses a quarter of the shortest CP.
    pub fft_backoff: Option<usize>,
    pub zf_floor_rel: f64,
    pub sync_threshold: f64,
    pub common_phase_tracking: bool,
    /// Average the channel estimate over all slots of the capture.
    pub slot_averaging: bool,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            carrier_recovery: CarrierRecovery::Auto,
            costas: CostasConfig::default(),
            fft_backoff: None,
            zf_floor_rel: DEFAULT_ZF_FLOOR,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            common_phase_tracking: true,
            slot_averaging: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RxOutput {
    pub baseband: SampledSignal,
    pub sync: SyncResult,
    pub received: ReceivedGrid,
    pub estimate: ChannelEstimate,
    pub equalized: EqualizedGrid,
    pub recovery: RecoveryPath,
    /// Why the Costas loop was not used, when it was tried.
    pub costas_note: Option<String>,
    pub costas_trace: Option<CostasTrace>,
    pub residual_cfo_hz: f64,
}

fn to_baseband(
    sig: &SampledSignal,
    num: &Numerology,
    carrier: &CarrierConfig,
    cfg: &RxConfig,
) -> Result<(SampledSignal, RecoveryPath, Option<String>, Option<CostasTrace>)> {
    if sig.kind() == SignalKind::Complex {
        if (sig.rate_hz - num.sample_rate_hz).abs() > 1e-6 {
            return Err(Error::Input("complex input must be at the numerology sample rate".into()));
        }
        return Ok((sig.clone(), RecoveryPath::Baseband, None, None));
    }
    let fallback = || downconvert_fixed(sig, carrier.carrier_hz, num.sample_rate_hz, carrier.occupied_bw_hz);
    if cfg.carrier_recovery == CarrierRecovery::Fallback {
        return Ok((fallback()?, RecoveryPath::Fallback, None, None));
    }
    let costas = CostasConfig {
        nominal_carrier_hz: carrier.carrier_hz,
        output_rate_hz: num.sample_rate_hz,
        occupied_bw_hz: carrier.occupied_bw_hz,
        ..cfg.costas.clone()
    };
    match costas_downconvert(sig, &costas) {
        Ok(out) => Ok((out.baseband, RecoveryPath::Costas, None, Some(out.trace))),
        Err(Error::NoLock(why)) if cfg.carrier_recovery == CarrierRecovery::Auto => {
            Ok((fallback()?, RecoveryPath::Fallback, Some(why), None))
        }
        Err(e) => Err(e),
    }
}

/// Carrier recovery, synchronization, demodulation, LS estimation and ZF
/// equalization. `reference` is the transmitted grid (its DMRS drives sync
/// and estimation).
pub fn receive(
    sig: &SampledSignal,
    num: &Numerology,
    carrier: &CarrierConfig,
    reference: &ResourceGrid,
    cfg: &RxConfig,
) -> Result<RxOutput> {
    let (baseband, recovery, costas_note, costas_trace) =
        to_baseband(sig, num, carrier, cfg).map_err(|e| e.in_stage("carrier_recovery"))?;
    let sync = time_synchronize_with(&baseband, num, reference, cfg.sync_threshold).map_err(|e| e.in_stage("sync"))?;
    let min_cp = *num.cp_lengths.iter().min().unwrap();
    let opts = DemodOptions {
        backoff: cfg.fft_backoff.unwrap_or(min_cp / 4),
        max_symbols: Some(reference.n_symbols),
    };
    let mut received = ofdm_demodulate_with(&baseband, num, &sync, &opts).map_err(|e| e.in_stage("demodulate"))?;
    let mut estimate =
        estimate_channel_ls(&received, reference, num.fft_size).map_err(|e| e.in_stage("estimate"))?;
    let mut residual_cfo_hz = 0.0;
    if cfg.common_phase_tracking {
        let times: Vec<f64> = (0..received.n_symbols)
            .map(|l| (sync.start + num.symbol_start(l) + num.cp_len(l)) as f64 / num.sample_rate_hz)
            .collect();
        residual_cfo_hz = track_common_phase(&mut received, &estimate, reference, &times);
        estimate = estimate_channel_ls(&received, reference, num.fft_size).map_err(|e| e.in_stage("estimate"))?;
    }
    if cfg.slot_averaging {
        estimate = average_over_slots(&mut received, &estimate);
    }
    let equalized = zf_equalize(&received, &estimate, cfg.zf_floor_rel).map_err(|e| e.in_stage("equalize"))?;
    Ok(RxOutput {
        baseband,
        sync,
        received,
        estimate,
        equalized,
        recovery,
        costas_note,
        costas_trace,
        residual_cfo_hz,
    })
}
