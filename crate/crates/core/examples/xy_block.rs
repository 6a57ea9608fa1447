//! Decompose the two-qubit XY interaction into native gates and check the
//! composed unitary against its matrix exponential.
//!
//! ```text
//! cargo run --release --example xy_block -- 0.7
//! ```

use num_complex::Complex64;
use pstsim::gates::{compose, xy_block, GateDurations};
use pstsim::quantum::Operator;

/// exp(−iθ(XX+YY)/2) written out in closed form: a rotation inside {|01⟩, |10⟩}.
fn closed_form(theta: f64) -> Operator {
    let (c, s) = (theta.cos(), theta.sin());
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let m = Complex64::new(0.0, -s);
    let c = Complex64::new(c, 0.0);
    Operator::new(2, vec![one, z, z, z, z, c, m, z, z, m, c, z, z, z, z, one]).unwrap()
}

fn main() -> pstsim::Result<()> {
    let theta: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(0.7), |a| a.parse())
        .expect("angle must be a number");
    let durations = GateDurations::default();
    let ops = xy_block(theta, (0, 1), &durations)?;
    for op in &ops {
        println!("{:?} on {:?}", op.gate, op.targets);
    }
    let u = compose(&ops, 2)?;
    println!(
        "gates: {}, wall clock: {:.1} ns",
        ops.len(),
        durations.xy_block() * 1e9
    );
    println!("unitarity defect: {:.2e}", u.unitarity_defect());
    println!(
        "distance to closed form (up to global phase): {:.2e}",
        u.phase_aligned_diff(&closed_form(theta))
    );
    Ok(())
}
