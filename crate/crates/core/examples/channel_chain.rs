//! Runs a TM1.1 passband through the `paper-fso-wireless` preset and prints
//! the power after every stage.

use nrfso::channel::{build_chain, run_chain, LinkKnobs, Preset};
use nrfso::nr::{build_test_model_grid, make_numerology, ofdm_modulate, upconvert_to_passband, CarrierConfig, TestModelId, TestModelSpec};
use nrfso::signal::power_to_db;

fn main() -> nrfso::Result<()> {
    let num = make_numerology(30e3, 20e6)?;
    let carrier = CarrierConfig::n71(&num);
    let grid = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm1_1, num.n_rb, 4), &num, 1)?;
    let bb = ofdm_modulate(&grid, &num, 32)?;
    let bb = bb.scaled(1.0 / bb.power().sqrt());
    let pb = upconvert_to_passband(&bb, &carrier)?;
    let chain = build_chain(Preset::PaperFsoWireless, &carrier, &LinkKnobs::for_carrier(&carrier), 4);
    println!("{}", chain.to_json());
    let out = run_chain(&pb, &chain)?;
    for r in &out.meta.history {
        println!("{:<14} {:>8.2} dB -> {:>8.2} dB", r.stage, power_to_db(r.power_in), power_to_db(r.power_out));
    }
    Ok(())
}
