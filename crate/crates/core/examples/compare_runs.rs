//! Compare a noiseless sweep with two gate-noise models using each metric.
//!
//! ```text
//! cargo run --release --example compare_runs
//! ```

use pstsim::analysis::uniform_grid;
use pstsim::channels::ChannelSpec;
use pstsim::harness::{compare_sweeps, Metric};
use pstsim::simulator::{ChainSpec, NoiseModel, TransferSetup};
use std::f64::consts::PI;

fn main() -> pstsim::Result<()> {
    let chain = ChainSpec::uniform(3, 2.0)?;
    let grid = uniform_grid(0.0, PI, 101)?;
    let sweep = |label: &str, one: Option<ChannelSpec>, two: Option<ChannelSpec>| {
        let noise = NoiseModel {
            gate_error_1q: one,
            gate_error_2q: two,
            ..NoiseModel::noiseless()
        };
        TransferSetup::new(chain.clone(), noise).sweep(label, &grid, 1..=20)
    };
    let clean = sweep("noiseless", None, None)?;
    let depol = sweep(
        "depolarizing",
        Some(ChannelSpec::Depolarizing1q { q: 5e-4 }),
        Some(ChannelSpec::Depolarizing2q { q: 5e-4 }),
    )?;
    let flips = sweep(
        "bit_flip",
        Some(ChannelSpec::Pauli1q {
            p_x: 3.75e-4,
            p_y: 0.0,
            p_z: 0.0,
        }),
        Some(ChannelSpec::Pauli2q {
            p_x: 3.75e-4,
            p_y: 0.0,
            p_z: 0.0,
        }),
    )?;

    for metric in [
        Metric::DeltaFidelity,
        Metric::DeltaHitting,
        Metric::DynamicsError,
    ] {
        for other in [&depol, &flips] {
            let report = compare_sweeps(&clean, other, metric)?;
            println!(
                "{:<15} {:>10} vs {:<13} {:.5}",
                format!("{metric:?}"),
                report.a,
                report.b,
                report.value
            );
        }
    }
    Ok(())
}
