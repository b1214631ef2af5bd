//! Realizes the shipped synthetic detector response as an FIR and compares
//! the realized magnitude with the table.

use nrfso::dsp::response::{fir_from_measured_response, realized_response_db, FrequencyResponse};

fn main() -> nrfso::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/detector_response_synthetic.csv");
    let resp = FrequencyResponse::from_csv_path(path)?;
    let fs = 2.4576e9;
    let taps = fir_from_measured_response(&resp, fs, 255)?;
    println!("{} taps", taps.len());
    for f in [0.0, 200e6, 450e6, 627e6, 720e6, 1000e6] {
        println!("{:>6.0} MHz  table {:>7.3} dB  fir {:>7.3} dB", f / 1e6, resp.eval(f).0, realized_response_db(&taps, fs, f));
    }
    Ok(())
}
