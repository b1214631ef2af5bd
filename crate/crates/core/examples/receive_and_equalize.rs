//! Passband TM3.1 with a small frequency offset and a delay, recovered by the
//! receiver chain.

use nrfso::channel::{run_chain, ChannelChain, Stage, StageKind};
use nrfso::conformance::{measure_evm, EvmReference};
use nrfso::nr::{build_test_model_grid, make_numerology, ofdm_modulate, upconvert_to_passband, CarrierConfig, TestModelId, TestModelSpec};
use nrfso::rx::{receive, RxConfig};
use nrfso::SampledSignal;

fn main() -> nrfso::Result<()> {
    let num = make_numerology(30e3, 20e6)?;
    let carrier = CarrierConfig::n71(&num);
    let grid = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm3_1, num.n_rb, 9), &num, 2)?;
    let bb = ofdm_modulate(&grid, &num, 32)?;
    // 2 kHz offset applied at baseband, then 700 samples of leading silence
    let fs = num.sample_rate_hz;
    let mut x = vec![num_complex::Complex64::new(0.0, 0.0); 700];
    x.extend(bb.as_complex()?.iter().enumerate().map(|(n, v)| {
        v * num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 2e3 * n as f64 / fs)
    }));
    let pb = upconvert_to_passband(&SampledSignal::complex(x, fs), &carrier)?;
    let noisy = run_chain(&pb, &ChannelChain::new(vec![Stage::new(StageKind::Awgn { snr_db: 35.0, reference_bw_hz: Some(carrier.occupied_bw_hz) })], 1))?;
    let out = receive(&noisy, &num, &carrier, &grid, &RxConfig::default())?;
    println!("path {:?}  start {}  cfo {:.1} Hz", out.recovery, out.sync.start, out.sync.cfo_hz);
    let evm = measure_evm(&out.equalized, &grid, EvmReference::Known)?;
    println!("EVM {:.3} % over {} REs (35 dB SNR -> {:.3} %)", evm.rms_pct, evm.n_re, 100.0 * 10f64.powf(-35.0 / 20.0));
    Ok(())
}
