//! Sweep Trotter depth under gate errors, T1/T2 and ZZ crosstalk and watch
//! the peak fidelity decay and the hitting time drift.
//!
//! ```text
//! cargo run --release --example noisy_sweep
//! ```

use pstsim::analysis::uniform_grid;
use pstsim::channels::ChannelSpec;
use pstsim::gates::GateDurations;
use pstsim::simulator::{
    ChainSpec, Crosstalk, CrosstalkMode, Decoherence, DecoherencePlacement, NoiseModel,
    TransferSetup,
};
use std::f64::consts::PI;

fn main() -> pstsim::Result<()> {
    let noise = NoiseModel {
        gate_error_1q: Some(ChannelSpec::Depolarizing1q { q: 5e-4 }),
        gate_error_2q: Some(ChannelSpec::Depolarizing2q { q: 1.28e-2 }),
        crosstalk: Some(Crosstalk {
            zeta: 1e4,
            mode: CrosstalkMode::Physical,
        }),
        decoherence: Some(Decoherence {
            t1: 80e-6,
            t2: 140e-6,
            placement: DecoherencePlacement::EveryQubitPerLayer,
        }),
        durations: GateDurations::default(),
    };
    let setup = TransferSetup::new(ChainSpec::uniform(3, 2.0)?, noise);
    let grid = uniform_grid(0.0, PI, 101)?;
    let sweep = setup.sweep("noisy", &grid, [1, 2, 4, 8, 12, 16, 20, 25, 30])?;

    let step_us = setup.circuit(1.0, 1)?.step_wall_clock * 1e6;
    println!("one Trotter step lasts {step_us:.2} µs");
    println!(
        "{:>4} {:>14} {:>10} {:>12}",
        "N", "hitting time", "peak", "wall (µs)"
    );
    for r in &sweep.records {
        println!(
            "{:>4} {:>14.4} {:>10.4} {:>12.1}",
            r.n_steps,
            r.hitting_time,
            r.peak_fidelity,
            step_us * r.n_steps as f64
        );
    }
    Ok(())
}
