//! Builds the four test-model grids, modulates them and writes one as an IQ file.

use nrfso::io::write_iq;
use nrfso::nr::{build_test_model_grid, make_numerology, ofdm_modulate, papr_db, TestModelId, TestModelSpec};

fn main() -> nrfso::Result<()> {
    let num = make_numerology(30e3, 20e6)?;
    println!(
        "N_RB {}  FFT {}  fs {} MHz  CP {:?}",
        num.n_rb,
        num.fft_size,
        num.sample_rate_hz / 1e6,
        &num.cp_lengths[..3]
    );
    let dir = std::env::temp_dir().join("nrfso-example");
    std::fs::create_dir_all(&dir)?;
    for id in TestModelId::ALL {
        let grid = build_test_model_grid(&TestModelSpec::new(id, num.n_rb, 1), &num, 1)?;
        let wave = ofdm_modulate(&grid, &num, 32)?;
        let x = wave.as_complex()?;
        println!("{id:<7} {:<7} {} samples  PAPR {:.2} dB", grid.modulation.name(), x.len(), papr_db(x));
        if id == TestModelId::Tm3_1a {
            write_iq(&dir.join("tm3_1a.iq"), &dir.join("tm3_1a.json"), &wave)?;
            println!("wrote {}", dir.join("tm3_1a.iq").display());
        }
    }
    Ok(())
}
