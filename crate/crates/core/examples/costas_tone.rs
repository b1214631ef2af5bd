//! Costas loop pulling in a carrier that is 1 kHz above nominal.

use std::f64::consts::{PI, SQRT_2};

use nrfso::rx::{costas_downconvert, CostasConfig};
use nrfso::SampledSignal;

fn main() -> nrfso::Result<()> {
    let fs = 2.4576e9;
    let f = 627e6 + 1e3;
    let x: Vec<f64> = (0..(2e-3 * fs) as usize).map(|i| SQRT_2 * (2.0 * PI * (f * i as f64 / fs).fract()).cos()).collect();
    let cfg = CostasConfig { loop_bandwidth_hz: 5e3, prefilter_bw_hz: 100e3, settle_s: 1e-3, ..CostasConfig::default() };
    let out = costas_downconvert(&SampledSignal::real(x, fs), &cfg)?;
    let fs_out = cfg.output_rate_hz;
    for t_ms in [0.05, 0.1, 0.2, 0.5, 1.0, 1.9] {
        let i = (t_ms * 1e-3 * fs_out) as usize;
        println!("t = {t_ms:>4} ms  NCO offset {:>9.3} Hz", out.trace.freq_hz[i] - cfg.nominal_carrier_hz);
    }
    println!("error variance after settle {:.2e}", out.error_variance);
    Ok(())
}
