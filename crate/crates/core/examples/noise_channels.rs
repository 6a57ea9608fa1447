//! Build every noise channel, apply it to a single-qubit state and print the
//! completeness defect together with the resulting Bloch vector.
//!
//! ```text
//! cargo run --release --example noise_channels
//! ```

use pstsim::channels::{crosstalk_zz, ChannelSpec, KrausSet};
use pstsim::quantum::{completeness_defect, DensityMatrix, Operator};

fn bloch(rho: &DensityMatrix) -> [f64; 3] {
    [
        Operator::pauli_x(),
        Operator::pauli_y(),
        Operator::pauli_z(),
    ]
    .map(|p| rho.expectation(&p).unwrap())
}

fn main() -> pstsim::Result<()> {
    // |+i⟩ has a Bloch vector along +y, so amplitude damping and dephasing are both visible.
    let plus_i = DensityMatrix::from_pure(&[
        pstsim::quantum::ONE.scale(std::f64::consts::FRAC_1_SQRT_2),
        pstsim::quantum::I.scale(std::f64::consts::FRAC_1_SQRT_2),
    ])?;
    let specs = [
        ChannelSpec::Depolarizing1q { q: 0.1 },
        ChannelSpec::Pauli1q {
            p_x: 0.05,
            p_y: 0.0,
            p_z: 0.0,
        },
        ChannelSpec::ThermalT1 {
            t1: 80e-6,
            tau: 20e-6,
        },
        ChannelSpec::DephasingT2 {
            t2: 140e-6,
            tau: 20e-6,
        },
    ];
    println!(
        "{:<16} {:>10} {:>28}",
        "channel", "defect", "bloch (x, y, z)"
    );
    for spec in specs {
        let k = spec.kraus()?;
        let out = plus_i.apply_kraus(k.ops(), &[0])?;
        let [x, y, z] = bloch(&out);
        let name = format!("{spec:?}");
        let name = name.split_whitespace().next().unwrap_or_default();
        println!(
            "{name:<16} {:>10.1e} {:>8.4} {:>8.4} {:>8.4}",
            completeness_defect(k.ops()),
            x,
            y,
            z
        );
    }

    // Two-qubit channels on |+i⟩⊗|+i⟩: the lifted depolarizing map and ZZ crosstalk.
    let pair = DensityMatrix::from_operator(plus_i.as_operator().kron(&plus_i.as_operator()))?;
    let two_q = [
        ChannelSpec::Depolarizing2q { q: 0.1 }.kraus()?,
        KrausSet::unitary(crosstalk_zz(2.0e5, 1e-6)?)?,
    ];
    for (name, k) in ["Depolarizing2q", "CrosstalkZz"].iter().zip(two_q) {
        let out = pair.apply_kraus(k.ops(), &[0, 1])?;
        let zz = out.expectation(&Operator::pauli_z().kron(&Operator::pauli_z()))?;
        let yy = out.expectation(&Operator::pauli_y().kron(&Operator::pauli_y()))?;
        println!(
            "{name:<16} {:>10.1e}  <YY> = {yy:.4}, <ZZ> = {zz:.4}, {} Kraus ops",
            completeness_defect(k.ops()),
            k.len()
        );
    }
    Ok(())
}
