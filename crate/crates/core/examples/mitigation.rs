//! Fit the stationary value, decay rate and time drift from a noisy sweep,
//! then rescale and shift it.
//!
//! ```text
//! cargo run --release --example mitigation
//! ```

use pstsim::analysis::{uniform_grid, SweepResult};
use pstsim::channels::ChannelSpec;
use pstsim::mitigation::{mitigate, MitigationOptions};
use pstsim::simulator::{ChainSpec, NoiseModel, TransferSetup};
use std::f64::consts::PI;

fn main() -> pstsim::Result<()> {
    let noise = NoiseModel {
        gate_error_1q: Some(ChannelSpec::Depolarizing1q { q: 2e-4 }),
        gate_error_2q: Some(ChannelSpec::Depolarizing2q { q: 4e-3 }),
        ..NoiseModel::noiseless()
    };
    let chain = ChainSpec::uniform(3, 2.0)?;
    let grid = uniform_grid(0.0, PI, 101)?;
    let noisy = TransferSetup::new(chain.clone(), noise).sweep("noisy", &grid, 1..=30)?;
    let clean = TransferSetup::new(chain, NoiseModel::noiseless()).sweep("clean", &grid, 1..=30)?;

    let m = mitigate(&noisy, &MitigationOptions::default())?;
    let f = &m.fit;
    println!("alpha = {:.4}", f.alpha);
    println!(
        "c1    = {:.5}  (residual {:.2e}, {} points)",
        f.c1, f.c1_residual, f.c1_points
    );
    println!(
        "c2    = {:.5}  (residual {:.2e}, {} points)",
        f.c2, f.c2_residual, f.c2_points
    );
    println!(
        "t_ideal = {:.4}, fit window N in {:?}",
        f.t_ideal, f.fit_window
    );
    println!(
        "clamped samples: {}, skipped depths: {:?}",
        m.clamp_events, m.unmitigatable
    );

    let peak = |s: &SweepResult, n: usize| s.record(n).map_or(f64::NAN, |r| r.peak_fidelity);
    println!(
        "{:>4} {:>10} {:>10} {:>10}",
        "N", "clean", "raw", "rescaled"
    );
    for n in [5, 10, 20, 30] {
        println!(
            "{n:>4} {:>10.4} {:>10.4} {:>10.4}",
            peak(&clean, n),
            peak(&noisy, n),
            peak(&m.rescaled, n)
        );
    }
    Ok(())
}
