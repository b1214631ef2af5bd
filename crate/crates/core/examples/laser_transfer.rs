//! Piecewise-linear P-I curve of the directly modulated laser.

use nrfso::channel::LaserModel;

fn main() {
    let laser = LaserModel::qcl_default();
    println!("current_mA,power_mW");
    for i in (380..=700).step_by(20) {
        println!("{i},{:.3}", laser.power_mw(i as f64));
    }
    for drive in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        let i = laser.current_ma(drive);
        println!("drive {drive:+.1} -> {i:.1} mA -> {:.3} mW", laser.power_mw(i));
    }
}
