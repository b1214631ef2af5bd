//! SQNR of a midtread quantizer against the 6.02 b + 1.76 dB rule for a full-scale sine.

use std::f64::consts::PI;

use nrfso::channel::{quantize, QuantizerModel};
use nrfso::signal::{mean_power_real, power_to_db};
use nrfso::SampledSignal;

fn main() -> nrfso::Result<()> {
    let n = 1 << 16;
    let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * 0.01234567 * i as f64).sin()).collect();
    let sig = SampledSignal::real(x.clone(), 1.0);
    for bits in [6, 8, 10, 12] {
        let q = quantize(&sig, &QuantizerModel::new(bits, 1.0))?;
        let e: Vec<f64> = q.as_real()?.iter().zip(&x).map(|(a, b)| a - b).collect();
        let sqnr = power_to_db(mean_power_real(&x) / mean_power_real(&e));
        println!("{bits:>2} bits: SQNR {sqnr:.2} dB (rule {:.2} dB)", 6.02 * bits as f64 + 1.76);
    }
    Ok(())
}
