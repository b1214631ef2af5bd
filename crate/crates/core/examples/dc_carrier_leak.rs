//! Per-subcarrier EVM with a residual carrier at 627 MHz.

use nrfso::channel::{ChannelChain, Stage, StageKind};
use nrfso::harness::{execute, Scenario};
use nrfso::nr::TestModelId;

fn main() -> nrfso::Result<()> {
    for level in [-50.0, -40.0, -30.0] {
        let chain = ChannelChain::new(vec![Stage::new(StageKind::CarrierLeak { carrier_hz: 627e6, level_dbc: level })], 2);
        let s = Scenario { tm: TestModelId::Tm3_1a, chain: Some(chain), seed: 2, ..Scenario::default() };
        let evm = execute(&s)?.report.evm.expect("EVM measured");
        println!(
            "leak {level} dBc: DC subcarrier {:.3} %  median {:.4} %  overall {:.3} %",
            evm.dc_subcarrier_pct.unwrap_or(f64::NAN),
            evm.median_subcarrier_pct,
            evm.rms_pct
        );
    }
    Ok(())
}
