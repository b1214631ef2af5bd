//! Writes a capture with its JSON sidecar and reads it back.

use nrfso::io::{read_iq, write_iq};
use nrfso::signal::SignalMeta;
use nrfso::SampledSignal;

fn main() -> nrfso::Result<()> {
    let dir = std::env::temp_dir().join("nrfso-iq");
    std::fs::create_dir_all(&dir)?;
    let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.125).collect();
    let sig = SampledSignal::real(x, 2.4576e9).with_meta(SignalMeta {
        carrier_hz: Some(627e6),
        seed: Some(3),
        description: "ramp".into(),
        ..SignalMeta::default()
    });
    let (iq, meta) = (dir.join("ramp.iq"), dir.join("ramp.json"));
    write_iq(&iq, &meta, &sig)?;
    println!("{}", std::fs::read_to_string(&meta)?);
    let back = read_iq(&iq, &meta)?;
    println!("{:?}", back.as_real()?);
    Ok(())
}
