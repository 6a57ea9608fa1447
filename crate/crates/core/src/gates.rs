//! Fixed gate set and the two-qubit XY interaction block.
//!
//! The block is the standard two-CNOT construction: basis change `H S† H` on
//! both qubits, `CNOT`, `Rx(θ) ⊗ Rz(θ)`, `CNOT`, then `H S H` on both qubits.
//! Its 4x4 unitary equals `exp(-i θ/2 (X⊗X + Y⊗Y))` up to a global phase, so
//! a single excitation on the pair rotates as `cos θ |01> + sin θ |10>`
//! (with a relative phase).

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{embed, Operator, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    S,
    Sdg,
    /// Rotation about X by the given angle in radians.
    Rx(f64),
    /// Rotation about Z by the given angle in radians.
    Rz(f64),
    /// Control is the first target, target the second.
    Cnot,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> Operator {
        match *self {
            Gate::H => Operator::from_real(
                1,
                &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            )
            .expect("static gate"),
            Gate::S => Operator::diagonal(&[ONE, I]),
            Gate::Sdg => Operator::diagonal(&[ONE, -I]),
            Gate::Rx(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let off = C64::new(0.0, -s);
                Operator::new(1, vec![C64::new(c, 0.0), off, off, C64::new(c, 0.0)])
                    .expect("static gate")
            }
            Gate::Rz(theta) => Operator::diagonal(&[
                C64::from_polar(1.0, -theta / 2.0),
                C64::from_polar(1.0, theta / 2.0),
            ]),
            Gate::Cnot => Operator::new(
                2,
                vec![
                    ONE, ZERO, ZERO, ZERO, //
                    ZERO, ONE, ZERO, ZERO, //
                    ZERO, ZERO, ZERO, ONE, //
                    ZERO, ZERO, ONE, ZERO,
                ],
            )
            .expect("static gate"),
        }
    }
}

/// Physical gate durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub single_qubit: f64,
    pub two_qubit: f64,
}

impl GateDurations {
    pub fn new(single_qubit: f64, two_qubit: f64) -> Result<Self> {
        if !(single_qubit > 0.0 && two_qubit > 0.0)
            || !single_qubit.is_finite()
            || !two_qubit.is_finite()
        {
            return Err(Error::input("gate durations must be positive and finite"));
        }
        Ok(Self {
            single_qubit,
            two_qubit,
        })
    }

    pub fn for_gate(&self, gate: &Gate) -> f64 {
        match gate.arity() {
            1 => self.single_qubit,
            _ => self.two_qubit,
        }
    }

    /// Wall-clock duration of one XY block: seven single-qubit layers and two CNOTs.
    pub fn xy_block(&self) -> f64 {
        7.0 * self.single_qubit + 2.0 * self.two_qubit
    }
}

impl Default for GateDurations {
    /// 35.5 ns single-qubit and 340 ns two-qubit gates.
    fn default() -> Self {
        Self {
            single_qubit: 35.5e-9,
            two_qubit: 340e-9,
        }
    }
}

/// A gate placed on specific qubits, with its physical duration.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub targets: Vec<usize>,
    pub duration: f64,
}

impl GateOp {
    pub fn new(gate: Gate, targets: Vec<usize>, duration: f64) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::input(format!(
                "{gate:?} acts on {} qubit(s), got {} target(s)",
                gate.arity(),
                targets.len()
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::input("two-qubit gate needs distinct targets"));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::input(format!(
                "gate duration must be positive, got {duration}"
            )));
        }
        Ok(Self {
            gate,
            targets,
            duration,
        })
    }

    pub fn matrix(&self) -> Operator {
        self.gate.matrix()
    }
}

/// Gates that run concurrently on pairwise-disjoint qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitLayer {
    gates: Vec<GateOp>,
    duration: f64,
}

impl CircuitLayer {
    pub fn new(gates: Vec<GateOp>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::input("a layer needs at least one gate"));
        }
        let mut used: Vec<usize> = Vec::new();
        for g in &gates {
            for &q in &g.targets {
                if used.contains(&q) {
                    return Err(Error::input(format!(
                        "qubit {q} appears twice in one layer"
                    )));
                }
                used.push(q);
            }
        }
        let duration = gates.iter().map(|g| g.duration).fold(0.0, f64::max);
        Ok(Self { gates, duration })
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    fn merge(mut self, other: CircuitLayer) -> Result<Self> {
        self.gates.extend(other.gates);
        CircuitLayer::new(self.gates)
    }
}

fn check_pair(pair: (usize, usize)) -> Result<()> {
    if pair.1 != pair.0 + 1 {
        return Err(Error::input(format!(
            "XY block needs adjacent qubits (i, i+1), got {pair:?}"
        )));
    }
    Ok(())
}

/// The XY interaction block on `(i, i+1)` as a flat gate sequence.
pub fn xy_block(
    theta: f64,
    pair: (usize, usize),
    durations: &GateDurations,
) -> Result<Vec<GateOp>> {
    Ok(xy_block_layers(theta, pair, durations)?
        .into_iter()
        .flat_map(|layer| layer.gates)
        .collect())
}

/// The XY interaction block scheduled into its nine layers.
pub fn xy_block_layers(
    theta: f64,
    pair: (usize, usize),
    durations: &GateDurations,
) -> Result<Vec<CircuitLayer>> {
    check_pair(pair)?;
    let (a, b) = pair;
    let l1 = durations.single_qubit;
    let both = |gate: Gate| -> Result<CircuitLayer> {
        CircuitLayer::new(vec![
            GateOp::new(gate, vec![a], l1)?,
            GateOp::new(gate, vec![b], l1)?,
        ])
    };
    let cnot = || -> Result<CircuitLayer> {
        CircuitLayer::new(vec![GateOp::new(
            Gate::Cnot,
            vec![a, b],
            durations.two_qubit,
        )?])
    };
    Ok(vec![
        both(Gate::H)?,
        both(Gate::Sdg)?,
        both(Gate::H)?,
        cnot()?,
        CircuitLayer::new(vec![
            GateOp::new(Gate::Rx(theta), vec![a], l1)?,
            GateOp::new(Gate::Rz(theta), vec![b], l1)?,
        ])?,
        cnot()?,
        both(Gate::H)?,
        both(Gate::S)?,
        both(Gate::H)?,
    ])
}

/// Run several blocks on disjoint pairs side by side, layer by layer.
pub fn parallel_blocks(blocks: Vec<Vec<CircuitLayer>>) -> Result<Vec<CircuitLayer>> {
    let mut iter = blocks.into_iter();
    let Some(mut merged) = iter.next() else {
        return Ok(Vec::new());
    };
    for block in iter {
        if block.len() != merged.len() {
            return Err(Error::input("parallel blocks must have equal layer counts"));
        }
        merged = merged
            .into_iter()
            .zip(block)
            .map(|(l, r)| l.merge(r))
            .collect::<Result<_>>()?;
    }
    Ok(merged)
}

/// Full-register unitary of a gate sequence (first gate applied first).
pub fn compose(ops: &[GateOp], n_qubits: usize) -> Result<Operator> {
    let mut u = Operator::identity(n_qubits);
    for op in ops {
        u = embed(&op.matrix(), &op.targets, n_qubits)?.matmul(&u);
    }
    Ok(u)
}
