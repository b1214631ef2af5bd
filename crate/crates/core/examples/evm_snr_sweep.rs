//! Flat AWGN at baseband, full receiver, EVM against 100 * 10^(-SNR/20).

use nrfso::channel::{ChannelChain, Stage, StageKind};
use nrfso::harness::{execute, Domain, Scenario};
use nrfso::nr::TestModelId;
use nrfso::rx::RxConfig;

fn main() -> nrfso::Result<()> {
    for snr in [20.0, 25.0, 30.0, 35.0] {
        let chain = ChannelChain::new(vec![Stage::new(StageKind::Awgn { snr_db: snr, reference_bw_hz: Some(18.36e6) })], 21);
        let s = Scenario {
            tm: TestModelId::Tm3_1a,
            domain: Domain::Baseband,
            n_subframes: 10,
            chain: Some(chain),
            rx: RxConfig { slot_averaging: true, ..RxConfig::default() },
            seed: 21,
            ..Scenario::default()
        };
        let evm = execute(&s)?.report.evm.expect("EVM measured");
        println!("{snr:>4} dB: EVM {:.3} %  expected {:.3} %  ({} REs)", evm.rms_pct, 100.0 * 10f64.powf(-snr / 20.0), evm.n_re);
    }
    Ok(())
}
