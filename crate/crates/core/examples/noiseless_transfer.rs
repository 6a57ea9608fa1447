//! Noiseless transfer along an engineered chain and its Trotter error.
//!
//! Prints the exact transfer probability at the perfect-transfer time and
//! how the Trotterized circuit approaches it as the step count grows.
//!
//! ```text
//! cargo run --release --example noiseless_transfer -- 5
//! ```

use pstsim::analysis::uniform_grid;
use pstsim::simulator::{ChainSpec, NoiseModel, TransferSetup, DEFAULT_ANGLE_SCALE};
use std::f64::consts::PI;

fn main() -> pstsim::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(Ok(4), |a| a.parse())
        .expect("qubit count must be an integer");
    let chain = ChainSpec::perfect_transfer(n, 2.0)?;
    println!("couplings: {:?}", chain.couplings());

    // With couplings C·sqrt(i(n−i)) and effective hopping DEFAULT_ANGLE_SCALE·J,
    // transfer completes at t = π / (2 · C · DEFAULT_ANGLE_SCALE).
    let t_pst = PI / (2.0 * 2.0 * DEFAULT_ANGLE_SCALE);
    let setup = TransferSetup::new(chain, NoiseModel::noiseless());
    let grid = uniform_grid(0.0, 2.0 * t_pst, 201)?;

    println!(
        "{:>6} {:>12} {:>14} {:>12}",
        "N", "F(t_pst)", "hitting time", "peak"
    );
    for steps in [1, 2, 5, 10, 20, 40] {
        let at = setup.fidelity_series(&[t_pst], steps)?.fidelity[0];
        let record = setup.fidelity_series(&grid, steps)?;
        println!(
            "{steps:>6} {at:>12.6} {:>14.4} {:>12.6}",
            record.hitting_time, record.peak_fidelity
        );
    }
    println!("ideal transfer time: {t_pst:.4}");
    Ok(())
}
