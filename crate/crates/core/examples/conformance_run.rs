//! Full `paper-fso` scenario for TM3.1a with artifacts written to a temp directory.

use nrfso::channel::Preset;
use nrfso::harness::{run_scenario, Scenario};
use nrfso::nr::TestModelId;

fn main() -> nrfso::Result<()> {
    let dir = std::env::temp_dir().join("nrfso-conformance-run");
    let s = Scenario { tm: TestModelId::Tm3_1a, preset: Preset::PaperFso, seed: 7, out_dir: Some(dir.clone()), ..Scenario::default() };
    let run = run_scenario(&s)?;
    print!("{}", run.report.to_text());
    println!("artifacts: {:?} in {}", run.report.artifacts, dir.display());
    Ok(())
}
