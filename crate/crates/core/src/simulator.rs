//! Trotterized state transfer along a qubit chain with interleaved noise.
//!
//! One Trotter step applies the XY block on every bond `(i, i+1)` with even
//! `i` (all in parallel), then on every bond with odd `i`. Block angles are
//! `θ_i = angle_scale · J_i · Δt` with `Δt = t / N`.
//!
//! Noise placement, per circuit layer:
//! 1. gate unitaries;
//! 2. gate error on each gate's qubits (the one-qubit channel after
//!    one-qubit gates, the lifted channel after CNOTs);
//! 3. T1 relaxation then T2 dephasing, either on every qubit for the layer
//!    duration or only on the gated qubits for each gate's duration;
//! 4. ZZ crosstalk on every neighbouring pair.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{check_grid, SweepResult, TransferRecord};
use crate::channels::{
    check_coherence_times, crosstalk_phase, dephasing_t2, thermal_t1, ChannelSpec, KrausSet,
};
use crate::error::{Error, Result};
use crate::gates::{parallel_blocks, xy_block_layers, CircuitLayer, GateDurations};
use crate::quantum::{DensityMatrix, Operator, Scratch, Support};

/// Default block-angle factor: `θ = J·Δt/2`.
pub const DEFAULT_ANGLE_SCALE: f64 = 0.5;

/// Couplings `J_i = C·√(i(n-i))`, `i = 1..n-1`.
pub fn build_couplings(n_qubits: usize, scale: f64) -> Result<Vec<f64>> {
    if n_qubits < 2 {
        return Err(Error::input(format!(
            "a chain needs at least two qubits, got {n_qubits}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::input(format!(
            "coupling scale must be positive, got {scale}"
        )));
    }
    Ok((1..n_qubits)
        .map(|i| scale * ((i * (n_qubits - i)) as f64).sqrt())
        .collect())
}

/// A linear chain described by its nearest-neighbour couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    couplings: Vec<f64>,
}

impl ChainSpec {
    /// Mirror-symmetric perfect-transfer couplings with scale `C`.
    pub fn perfect_transfer(n_qubits: usize, scale: f64) -> Result<Self> {
        Ok(Self {
            couplings: build_couplings(n_qubits, scale)?,
        })
    }

    pub fn from_couplings(couplings: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::input("a chain needs at least one coupling"));
        }
        if couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::input("couplings must be finite"));
        }
        if couplings.len() > 7 {
            return Err(Error::input("dense simulation is limited to 8 qubits"));
        }
        Ok(Self { couplings })
    }

    pub fn uniform(n_qubits: usize, coupling: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::input(format!(
                "a chain needs at least two qubits, got {n_qubits}"
            )));
        }
        Self::from_couplings(vec![coupling; n_qubits - 1])
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }
}

/// How the crosstalk constant turns into a phase per layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrosstalkMode {
    /// `ζ` in model-frequency units: `φ = ζ · (τ_layer / τ_step) · Δt`.
    Model,
    /// `ζ` in rad/s: `φ = ζ · τ_layer`.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosstalk {
    pub zeta: f64,
    pub mode: CrosstalkMode,
}

/// Where T1/T2 channels act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoherencePlacement {
    /// Every qubit, once per layer, for the layer duration.
    #[default]
    EveryQubitPerLayer,
    /// Only the qubits a gate acts on, for that gate's duration.
    GatedQubits,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoherence {
    /// Seconds.
    pub t1: f64,
    /// Seconds.
    pub t2: f64,
    pub placement: DecoherencePlacement,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    pub gate_error_1q: Option<ChannelSpec>,
    pub gate_error_2q: Option<ChannelSpec>,
    pub crosstalk: Option<Crosstalk>,
    pub decoherence: Option<Decoherence>,
    pub durations: GateDurations,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(spec) = &self.gate_error_1q {
            if !spec.is_gate_error() || spec.arity() != 1 {
                return Err(Error::input(format!(
                    "{spec:?} is not a one-qubit gate error"
                )));
            }
            spec.kraus()?;
        }
        if let Some(spec) = &self.gate_error_2q {
            if !spec.is_gate_error() || spec.arity() != 2 {
                return Err(Error::input(format!(
                    "{spec:?} is not a two-qubit gate error"
                )));
            }
            spec.kraus()?;
        }
        GateDurations::new(self.durations.single_qubit, self.durations.two_qubit)?;
        if let Some(d) = &self.decoherence {
            check_coherence_times(d.t1, d.t2)?;
        }
        if let Some(x) = &self.crosstalk {
            if !x.zeta.is_finite() {
                return Err(Error::input("crosstalk constant must be finite"));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.gate_error_1q.is_none()
            && self.gate_error_2q.is_none()
            && self.decoherence.is_none()
            && self.crosstalk.map_or(true, |x| x.zeta == 0.0)
    }
}

/// The layered circuit for `N` Trotter steps at model time `t`.
#[derive(Debug, Clone)]
pub struct TrotterCircuit {
    pub layers: Vec<CircuitLayer>,
    pub n_qubits: usize,
    pub n_steps: usize,
    pub model_time: f64,
    /// Seconds.
    pub wall_clock: f64,
    /// Seconds per Trotter step.
    pub step_wall_clock: f64,
}

impl TrotterCircuit {
    pub fn dt(&self) -> f64 {
        self.model_time / self.n_steps as f64
    }
}

fn step_layers(
    chain: &ChainSpec,
    dt: f64,
    angle_scale: f64,
    durations: &GateDurations,
) -> Result<Vec<CircuitLayer>> {
    let mut layers = Vec::new();
    for parity in [0, 1] {
        let blocks = chain
            .couplings()
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == parity)
            .map(|(i, &j)| xy_block_layers(angle_scale * j * dt, (i, i + 1), durations))
            .collect::<Result<Vec<_>>>()?;
        layers.extend(parallel_blocks(blocks)?);
    }
    Ok(layers)
}

/// Build the Trotter circuit; block angles are `angle_scale · J_i · t / N`.
pub fn build_circuit(
    chain: &ChainSpec,
    t: f64,
    n_steps: usize,
    angle_scale: f64,
    durations: &GateDurations,
) -> Result<TrotterCircuit> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::input(format!(
            "model time must be non-negative, got {t}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::input("at least one Trotter step is required"));
    }
    let step = step_layers(chain, t / n_steps as f64, angle_scale, durations)?;
    let step_wall_clock: f64 = step.iter().map(|l| l.duration()).sum();
    let mut layers = Vec::with_capacity(step.len() * n_steps);
    for _ in 0..n_steps {
        layers.extend(step.iter().cloned());
    }
    Ok(TrotterCircuit {
        layers,
        n_qubits: chain.n_qubits(),
        n_steps,
        model_time: t,
        wall_clock: step_wall_clock * n_steps as f64,
        step_wall_clock,
    })
}

/// Precomputed supports and noise operators for one register size and model.
struct NoiseKernel {
    qubit: Vec<Support>,
    pair: Vec<Support>,
    gate_1q: Option<KrausSet>,
    /// Single-qubit factor of the lifted two-qubit error.
    gate_2q_factor: Option<KrausSet>,
    decoherence: Option<Decoherence>,
    crosstalk: Option<Crosstalk>,
}

impl NoiseKernel {
    fn new(n_qubits: usize, noise: &NoiseModel) -> Result<Self> {
        noise.validate()?;
        Ok(Self {
            qubit: (0..n_qubits)
                .map(|q| Support::new(&[q], n_qubits))
                .collect::<Result<_>>()?,
            pair: (0..n_qubits - 1)
                .map(|q| Support::new(&[q, q + 1], n_qubits))
                .collect::<Result<_>>()?,
            gate_1q: noise
                .gate_error_1q
                .map(|s| s.single_qubit_factor())
                .transpose()?,
            gate_2q_factor: noise
                .gate_error_2q
                .map(|s| s.single_qubit_factor())
                .transpose()?,
            decoherence: noise.decoherence,
            crosstalk: noise.crosstalk.filter(|x| x.zeta != 0.0),
        })
    }
}

/// Per-duration T1 and T2 Kraus sets, built on first use.
#[derive(Default)]
struct DecoherenceCache {
    entries: Vec<(f64, KrausSet, KrausSet)>,
}

impl DecoherenceCache {
    fn get(&mut self, d: &Decoherence, tau: f64) -> Result<(&KrausSet, &KrausSet)> {
        let idx = match self.entries.iter().position(|(t, _, _)| *t == tau) {
            Some(i) => i,
            None => {
                self.entries
                    .push((tau, thermal_t1(d.t1, tau)?, dephasing_t2(d.t2, tau)?));
                self.entries.len() - 1
            }
        };
        let (_, a, b) = &self.entries[idx];
        Ok((a, b))
    }
}

/// Evolve `rho0` through the circuit with the given noise model.
pub fn simulate(
    circuit: &TrotterCircuit,
    noise: &NoiseModel,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho0.n_qubits() != circuit.n_qubits {
        return Err(Error::input(format!(
            "state has {} qubit(s), circuit has {}",
            rho0.n_qubits(),
            circuit.n_qubits
        )));
    }
    let kernel = NoiseKernel::new(circuit.n_qubits, noise)?;
    let mut rho = rho0.clone();
    let mut scratch = Scratch::default();
    let mut cache = DecoherenceCache::default();
    let mut gate_cache: Vec<(crate::gates::Gate, Operator)> = Vec::new();

    for layer in &circuit.layers {
        for op in layer.gates() {
            let u = match gate_cache.iter().find(|(g, _)| *g == op.gate) {
                Some((_, u)) => u,
                None => {
                    gate_cache.push((op.gate, op.matrix()));
                    &gate_cache.last().expect("just pushed").1
                }
            };
            let support = match op.targets.as_slice() {
                [q] => &kernel.qubit[*q],
                [a, b] if *b == a + 1 => &kernel.pair[*a],
                targets => &Support::new(targets, circuit.n_qubits)?,
            };
            rho.unitary_in_place(u, support);

            let error = if op.targets.len() == 1 {
                kernel.gate_1q.as_ref()
            } else {
                kernel.gate_2q_factor.as_ref()
            };
            if let Some(ch) = error {
                for &q in &op.targets {
                    rho.kraus_in_place(ch.ops(), &kernel.qubit[q], &mut scratch);
                }
            }

            if let Some(d) = kernel
                .decoherence
                .filter(|d| d.placement == DecoherencePlacement::GatedQubits)
            {
                let (t1, t2) = cache.get(&d, op.duration)?;
                for &q in &op.targets {
                    rho.kraus_in_place(t1.ops(), &kernel.qubit[q], &mut scratch);
                    rho.kraus_in_place(t2.ops(), &kernel.qubit[q], &mut scratch);
                }
            }
        }

        if let Some(d) = kernel
            .decoherence
            .filter(|d| d.placement == DecoherencePlacement::EveryQubitPerLayer)
        {
            let (t1, t2) = cache.get(&d, layer.duration())?;
            for support in &kernel.qubit {
                rho.kraus_in_place(t1.ops(), support, &mut scratch);
                rho.kraus_in_place(t2.ops(), support, &mut scratch);
            }
        }

        if let Some(x) = kernel.crosstalk {
            let phi = match x.mode {
                CrosstalkMode::Physical => x.zeta * layer.duration(),
                CrosstalkMode::Model => {
                    x.zeta * (layer.duration() / circuit.step_wall_clock) * circuit.dt()
                }
            };
            let u = crosstalk_phase(phi);
            for support in &kernel.pair {
                rho.unitary_in_place(&u, support);
            }
        }
    }
    Ok(rho)
}

/// Chain, noise and angle convention for a transfer experiment.
#[derive(Debug, Clone)]
pub struct TransferSetup {
    pub chain: ChainSpec,
    pub noise: NoiseModel,
    pub angle_scale: f64,
}

impl TransferSetup {
    pub fn new(chain: ChainSpec, noise: NoiseModel) -> Self {
        Self {
            chain,
            noise,
            angle_scale: DEFAULT_ANGLE_SCALE,
        }
    }

    pub fn with_angle_scale(mut self, angle_scale: f64) -> Self {
        self.angle_scale = angle_scale;
        self
    }

    pub fn circuit(&self, t: f64, n_steps: usize) -> Result<TrotterCircuit> {
        build_circuit(
            &self.chain,
            t,
            n_steps,
            self.angle_scale,
            &self.noise.durations,
        )
    }

    /// `|10…0>`: the excitation on the first qubit.
    pub fn initial_state(&self) -> DensityMatrix {
        let n = self.chain.n_qubits();
        DensityMatrix::basis_index(n, 1 << (n - 1))
    }

    /// Basis index of `|0…01>`: the excitation on the last qubit.
    pub fn destination_index(&self) -> usize {
        1
    }

    pub fn evolve(&self, t: f64, n_steps: usize, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        simulate(&self.circuit(t, n_steps)?, &self.noise, rho0)
    }

    /// Transfer fidelity `<0…01|ρ(t)|0…01>` at each grid time.
    pub fn fidelity_series(&self, t_grid: &[f64], n_steps: usize) -> Result<TransferRecord> {
        check_grid(t_grid)?;
        let rho0 = self.initial_state();
        let dest = self.destination_index();
        let fidelity = t_grid
            .par_iter()
            .map(|&t| {
                self.evolve(t, n_steps, &rho0)
                    .map(|rho| rho.population(dest).clamp(0.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        TransferRecord::new(n_steps, t_grid.to_vec(), fidelity)
    }

    /// Fidelity series for every depth in `depths`, computed in parallel.
    pub fn sweep(
        &self,
        label: &str,
        t_grid: &[f64],
        depths: impl IntoIterator<Item = usize>,
    ) -> Result<SweepResult> {
        check_grid(t_grid)?;
        let depths: Vec<usize> = depths.into_iter().collect();
        let jobs: Vec<(usize, f64)> = depths
            .iter()
            .flat_map(|&n| t_grid.iter().map(move |&t| (n, t)))
            .collect();
        let rho0 = self.initial_state();
        let dest = self.destination_index();
        let values = jobs
            .par_iter()
            .map(|&(n, t)| {
                self.evolve(t, n, &rho0)
                    .map(|rho| rho.population(dest).clamp(0.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        let records = depths
            .iter()
            .zip(values.chunks(t_grid.len()))
            .map(|(&n, f)| TransferRecord::new(n, t_grid.to_vec(), f.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        SweepResult::new(label, records)
    }
}

/// Free-function form of [`TransferSetup::fidelity_series`].
pub fn fidelity_series(
    setup: &TransferSetup,
    t_grid: &[f64],
    n_steps: usize,
) -> Result<TransferRecord> {
    setup.fidelity_series(t_grid, n_steps)
}
