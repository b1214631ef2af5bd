//! Baseband to 627 MHz real passband and back with a fixed oscillator.

use nrfso::nr::{
    build_test_model_grid, downconvert_fixed, make_numerology, ofdm_modulate, upconvert_to_passband, CarrierConfig,
    TestModelId, TestModelSpec,
};
use nrfso::signal::power_to_db;

fn main() -> nrfso::Result<()> {
    let num = make_numerology(30e3, 20e6)?;
    let carrier = CarrierConfig::n71(&num);
    let grid = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm1_1, num.n_rb, 2), &num, 1)?;
    let bb = ofdm_modulate(&grid, &num, 32)?;
    let pb = upconvert_to_passband(&bb, &carrier)?;
    println!("passband: {} samples at {} GS/s, power {:.3} dB", pb.len(), pb.rate_hz / 1e9, power_to_db(pb.power()));
    let back = downconvert_fixed(&pb, carrier.carrier_hz, num.sample_rate_hz, carrier.occupied_bw_hz)?;
    let (a, b) = (bb.as_complex()?, back.as_complex()?);
    let mid = a.len() / 2;
    let err: f64 = (mid - 2000..mid + 2000).map(|i| (a[i] - b[i]).norm_sqr()).sum::<f64>() / 4000.0;
    println!("round-trip error {:.1} dB relative to the signal", power_to_db(err / bb.power()));
    Ok(())
}
