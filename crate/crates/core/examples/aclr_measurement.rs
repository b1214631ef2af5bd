//! ACLR of the ideal transmitter for several transmit windows, with the
//! image-reject interpolator so the window is what shapes the skirts.

use nrfso::conformance::{measure_aclr, DEFAULT_CHANNEL_SPACING_HZ};
use nrfso::nr::{build_test_model_grid, make_numerology, ofdm_modulate, upconvert_with_filter, CarrierConfig, TestModelId, TestModelSpec, TxFilter};

fn main() -> nrfso::Result<()> {
    let num = make_numerology(30e3, 20e6)?;
    let carrier = CarrierConfig::n71(&num);
    let grid = build_test_model_grid(&TestModelSpec::new(TestModelId::Tm1_1, num.n_rb, 3), &num, 1)?;
    for w in [0, 16, 32, 64] {
        let bb = ofdm_modulate(&grid, &num, w)?;
        let pb = upconvert_with_filter(&bb, &carrier, TxFilter::ImageReject)?;
        let a = measure_aclr(&pb, &carrier, DEFAULT_CHANNEL_SPACING_HZ)?;
        println!("W = {w:>2}: lower {:.2} dB  upper {:.2} dB  (bin {:.0} Hz)", a.aclr_lower_db, a.aclr_upper_db, a.bin_hz);
    }
    let bb = ofdm_modulate(&grid, &num, 32)?;
    let a = measure_aclr(&upconvert_with_filter(&bb, &carrier, TxFilter::Channel)?, &carrier, DEFAULT_CHANNEL_SPACING_HZ)?;
    println!("channel filter: lower {:.2} dB capped {}  upper {:.2} dB capped {}", a.aclr_lower_db, a.capped_lower, a.aclr_upper_db, a.capped_upper);
    Ok(())
}
