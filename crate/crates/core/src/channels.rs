//! Kraus representations of the supported noise processes.
//!
//! Every channel is a [`KrausSet`]; unitary channels are singleton sets.
//! Two-qubit gate errors are always the uncorrelated tensor lift of a
//! one-qubit channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{completeness_defect, Operator, C64};

/// Completeness tolerance enforced on every constructed set.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// A complete set of Kraus operators on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<Operator>,
}

impl KrausSet {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::input("Kraus set is empty"));
        };
        let arity = first.arity();
        if ops.iter().any(|k| k.arity() != arity) {
            return Err(Error::input("Kraus operators have mixed arity"));
        }
        let defect = completeness_defect(&ops);
        if defect > COMPLETENESS_TOL {
            return Err(Error::contract(format!(
                "Kraus set incomplete: max |ΣE†E - I| = {defect:e}"
            )));
        }
        Ok(Self { ops })
    }

    pub fn unitary(u: Operator) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            ops: vec![Operator::identity(arity)],
        }
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn arity(&self) -> usize {
        self.ops[0].arity()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Drop operators that are exactly zero (e.g. `√0 · X`).
    fn pruned(mut self) -> Self {
        if self.ops.len() > 1 {
            self.ops
                .retain(|k| k.data().iter().any(|z| *z != C64::new(0.0, 0.0)));
        }
        self
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::input(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// `ρ → (1-q)ρ + q I/2`, as `{√(1-3q/4) I, √(q/4) X, √(q/4) Y, √(q/4) Z}`.
pub fn depolarizing_1q(q: f64) -> Result<KrausSet> {
    check_probability("q", q)?;
    let w = q / 4.0;
    KrausSet::new(vec![
        Operator::identity(1).scale_real((1.0 - 3.0 * w).sqrt()),
        Operator::pauli_x().scale_real(w.sqrt()),
        Operator::pauli_y().scale_real(w.sqrt()),
        Operator::pauli_z().scale_real(w.sqrt()),
    ])
    .map(KrausSet::pruned)
}

/// `ρ → (1-p)ρ + p_x XρX + p_y YρY + p_z ZρZ` with `p = p_x + p_y + p_z`.
pub fn pauli_1q(p_x: f64, p_y: f64, p_z: f64) -> Result<KrausSet> {
    check_probability("p_x", p_x)?;
    check_probability("p_y", p_y)?;
    check_probability("p_z", p_z)?;
    let p = p_x + p_y + p_z;
    if p > 1.0 + 1e-15 {
        return Err(Error::input(format!("p_x + p_y + p_z = {p} exceeds 1")));
    }
    KrausSet::new(vec![
        Operator::identity(1).scale_real((1.0 - p).max(0.0).sqrt()),
        Operator::pauli_x().scale_real(p_x.sqrt()),
        Operator::pauli_y().scale_real(p_y.sqrt()),
        Operator::pauli_z().scale_real(p_z.sqrt()),
    ])
    .map(KrausSet::pruned)
}

/// Uncorrelated two-qubit channel `Φ ⊗ Φ`: all products `E_i ⊗ E_j`.
pub fn lift_2q(channel: &KrausSet) -> Result<KrausSet> {
    if channel.arity() != 1 {
        return Err(Error::input("only one-qubit channels can be lifted"));
    }
    let ops = channel
        .ops
        .iter()
        .flat_map(|a| channel.ops.iter().map(move |b| a.kron(b)))
        .collect();
    KrausSet::new(ops)
}

/// `diag(e^{-iζτ}, e^{iζτ}, e^{iζτ}, e^{-iζτ})`, i.e. `exp(-iζτ Z⊗Z)`.
pub fn crosstalk_zz(zeta: f64, tau: f64) -> Result<Operator> {
    if !(tau >= 0.0) || !zeta.is_finite() || !tau.is_finite() {
        return Err(Error::input(format!(
            "crosstalk needs finite ζ and τ ≥ 0, got ζ={zeta}, τ={tau}"
        )));
    }
    Ok(crosstalk_phase(zeta * tau))
}

/// `exp(-iφ Z⊗Z)` for a phase already accumulated over the interval.
pub fn crosstalk_phase(phi: f64) -> Operator {
    let minus = C64::from_polar(1.0, -phi);
    let plus = C64::from_polar(1.0, phi);
    Operator::diagonal(&[minus, plus, plus, minus])
}

/// Amplitude damping over `tau` with `γ1 = 1 - e^{-τ/T1}`.
pub fn thermal_t1(t1: f64, tau: f64) -> Result<KrausSet> {
    if !(t1 > 0.0) {
        return Err(Error::input(format!("T1 must be positive, got {t1}")));
    }
    if !(tau >= 0.0) {
        return Err(Error::input(format!(
            "duration must be non-negative, got {tau}"
        )));
    }
    let gamma = -(-tau / t1).exp_m1();
    KrausSet::new(vec![
        Operator::from_real(1, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?,
        Operator::from_real(1, &[0.0, gamma.sqrt(), 0.0, 0.0])?,
    ])
    .map(KrausSet::pruned)
}

/// Pure dephasing over `tau`: `γ2 ρ + (1-γ2) ZρZ` with `γ2 = (1 + e^{-τ/T2})/2`,
/// so off-diagonals shrink by exactly `e^{-τ/T2}`.
pub fn dephasing_t2(t2: f64, tau: f64) -> Result<KrausSet> {
    if !(t2 > 0.0) {
        return Err(Error::input(format!("T2 must be positive, got {t2}")));
    }
    if !(tau >= 0.0) {
        return Err(Error::input(format!(
            "duration must be non-negative, got {tau}"
        )));
    }
    let gamma2 = 0.5 * (1.0 + (-tau / t2).exp());
    KrausSet::new(vec![
        Operator::identity(1).scale_real(gamma2.sqrt()),
        Operator::pauli_z().scale_real((1.0 - gamma2).sqrt()),
    ])
    .map(KrausSet::pruned)
}

/// Serializable description of a channel with its parameters.
///
/// Times are in seconds and `zeta` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Depolarizing1q { q: f64 },
    Depolarizing2q { q: f64 },
    Pauli1q { p_x: f64, p_y: f64, p_z: f64 },
    Pauli2q { p_x: f64, p_y: f64, p_z: f64 },
    CrosstalkZz { zeta: f64, tau: f64 },
    ThermalT1 { t1: f64, tau: f64 },
    DephasingT2 { t2: f64, tau: f64 },
}

impl ChannelSpec {
    /// Number of qubits the channel acts on.
    pub fn arity(&self) -> usize {
        match self {
            ChannelSpec::Depolarizing1q { .. }
            | ChannelSpec::Pauli1q { .. }
            | ChannelSpec::ThermalT1 { .. }
            | ChannelSpec::DephasingT2 { .. } => 1,
            ChannelSpec::Depolarizing2q { .. }
            | ChannelSpec::Pauli2q { .. }
            | ChannelSpec::CrosstalkZz { .. } => 2,
        }
    }

    pub fn kraus(&self) -> Result<KrausSet> {
        match *self {
            ChannelSpec::Depolarizing1q { q } => depolarizing_1q(q),
            ChannelSpec::Depolarizing2q { q } => lift_2q(&depolarizing_1q(q)?),
            ChannelSpec::Pauli1q { p_x, p_y, p_z } => pauli_1q(p_x, p_y, p_z),
            ChannelSpec::Pauli2q { p_x, p_y, p_z } => lift_2q(&pauli_1q(p_x, p_y, p_z)?),
            ChannelSpec::CrosstalkZz { zeta, tau } => KrausSet::unitary(crosstalk_zz(zeta, tau)?),
            ChannelSpec::ThermalT1 { t1, tau } => thermal_t1(t1, tau),
            ChannelSpec::DephasingT2 { t2, tau } => dephasing_t2(t2, tau),
        }
    }

    /// The single-qubit factor of a lifted gate-error channel, or the channel
    /// itself when it is already single-qubit.
    pub fn single_qubit_factor(&self) -> Result<KrausSet> {
        match *self {
            ChannelSpec::Depolarizing1q { q } | ChannelSpec::Depolarizing2q { q } => {
                depolarizing_1q(q)
            }
            ChannelSpec::Pauli1q { p_x, p_y, p_z } | ChannelSpec::Pauli2q { p_x, p_y, p_z } => {
                pauli_1q(p_x, p_y, p_z)
            }
            other => Err(Error::input(format!(
                "{other:?} is not a gate-error channel"
            ))),
        }
    }

    pub fn is_gate_error(&self) -> bool {
        matches!(
            self,
            ChannelSpec::Depolarizing1q { .. }
                | ChannelSpec::Depolarizing2q { .. }
                | ChannelSpec::Pauli1q { .. }
                | ChannelSpec::Pauli2q { .. }
        )
    }
}

/// Check `T1 > 0`, `T2 > 0` and `T2 ≤ 2 T1`.
pub fn check_coherence_times(t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(Error::input(format!("T1 must be positive, got {t1}")));
    }
    if !(t2 > 0.0 && t2.is_finite()) {
        return Err(Error::input(format!("T2 must be positive, got {t2}")));
    }
    if t2 > 2.0 * t1 {
        return Err(Error::input(format!(
            "T2 = {t2} exceeds 2·T1 = {}",
            2.0 * t1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{DensityMatrix, Operator, ONE};
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn apply(rho: &DensityMatrix, ch: &KrausSet) -> DensityMatrix {
        let targets: Vec<usize> = (0..ch.arity()).collect();
        rho.apply_kraus(ch.ops(), &targets).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::from_pure(&[C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)])
            .unwrap()
    }

    #[test]
    fn depolarizing_examples() {
        let rho = DensityMatrix::basis_state(1, "1").unwrap();
        assert_eq!(apply(&rho, &depolarizing_1q(0.0).unwrap()), rho);
        assert!(
            apply(&rho, &depolarizing_1q(1.0).unwrap())
                .max_abs_diff(&DensityMatrix::maximally_mixed(1))
                < 1e-15
        );

        let q = 5e-4;
        let out = apply(&plus(), &depolarizing_1q(q).unwrap());
        assert!((out.get(0, 1).re - 0.5 * (1.0 - q)).abs() < 1e-16);

        let ground = DensityMatrix::basis_state(1, "0").unwrap();
        let out = apply(&ground, &depolarizing_1q(0.2).unwrap());
        assert!((out.population(0) - (0.8 + 0.1)).abs() < 1e-15);
        assert!((out.population(1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn probabilities_are_validated() {
        assert!(depolarizing_1q(-0.1).is_err());
        assert!(depolarizing_1q(1.1).is_err());
        assert!(pauli_1q(-1e-3, 0.0, 0.0).is_err());
        assert!(pauli_1q(0.5, 0.4, 0.2).is_err());
    }

    #[test]
    fn pauli_examples() {
        let p = 0.09;
        let depol = depolarizing_1q(4.0 * p / 3.0).unwrap();
        let pauli = pauli_1q(p / 3.0, p / 3.0, p / 3.0).unwrap();
        let rho = plus();
        assert!(apply(&rho, &depol).max_abs_diff(&apply(&rho, &pauli)) < 1e-15);

        let diag = DensityMatrix::from_operator(Operator::diagonal(&[
            C64::new(0.3, 0.0),
            C64::new(0.7, 0.0),
        ]))
        .unwrap();
        assert!(apply(&diag, &pauli_1q(0.0, 0.0, 0.2).unwrap()).max_abs_diff(&diag) < 1e-16);

        let ground = DensityMatrix::basis_state(1, "0").unwrap();
        let out = apply(&ground, &pauli_1q(0.1, 0.0, 0.0).unwrap());
        assert!((out.population(0) - 0.9).abs() < 1e-15);
        assert!((out.population(1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn lift_examples() {
        let id = lift_2q(&KrausSet::identity(1)).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id.ops()[0], Operator::identity(2));

        let q = 0.04;
        let lifted = lift_2q(&depolarizing_1q(q).unwrap()).unwrap();
        assert_eq!(lifted.len(), 16);
        // weight of the identity term is |c_II|² = (1 - 3q/4)²
        let c = lifted.ops()[0].get(0, 0).norm_sqr();
        assert!((c - (1.0 - 0.75 * q).powi(2)).abs() < 1e-15);

        let p = 0.07;
        let lifted = lift_2q(&pauli_1q(p, 0.0, 0.0).unwrap()).unwrap();
        // zero Y/Z terms are pruned, leaving {I⊗I, I⊗X, X⊗I, X⊗X}
        assert_eq!(lifted.len(), 4);
        let xx = Operator::pauli_x().kron(&Operator::pauli_x()).scale_real(p);
        assert!(lifted.ops()[3].max_abs_diff(&xx) < 1e-16);
        assert!((lifted.ops()[3].get(0, 3).norm_sqr() - p * p).abs() < 1e-16);
    }

    #[test]
    fn lift_rejects_two_qubit_input() {
        let two = lift_2q(&depolarizing_1q(0.1).unwrap()).unwrap();
        assert!(lift_2q(&two).is_err());
    }

    #[test]
    fn crosstalk_examples() {
        assert!(
            crosstalk_zz(0.3, 0.0)
                .unwrap()
                .max_abs_diff(&Operator::identity(2))
                < 1e-16
        );
        let u = crosstalk_zz(1.0, FRAC_PI_2).unwrap();
        let zz = Operator::pauli_z().kron(&Operator::pauli_z());
        assert!(u.max_abs_diff(&zz.scale(C64::new(0.0, -1.0))) < 1e-15);
        assert!(crosstalk_zz(1.0, -1.0).is_err());

        let rho = DensityMatrix::basis_state(2, "01").unwrap();
        let out = rho
            .apply_unitary(&crosstalk_zz(3.7, 0.9).unwrap(), &[0, 1])
            .unwrap();
        for i in 0..4 {
            assert!((out.population(i) - rho.population(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn thermal_examples() {
        let rho = plus();
        assert_eq!(apply(&rho, &thermal_t1(80e-6, 0.0).unwrap()), rho);
        let relaxed = apply(&rho, &thermal_t1(1.0, 1e6).unwrap());
        assert!(relaxed.max_abs_diff(&DensityMatrix::basis_state(1, "0").unwrap()) < 1e-15);

        let excited = DensityMatrix::basis_state(1, "1").unwrap();
        let half = apply(&excited, &thermal_t1(2.0, 2.0 * LN_2).unwrap());
        assert!((half.population(0) - 0.5).abs() < 1e-15);
        assert!((half.population(1) - 0.5).abs() < 1e-15);
        assert!(thermal_t1(0.0, 1.0).is_err());
    }

    #[test]
    fn dephasing_examples() {
        let rho = plus();
        assert_eq!(apply(&rho, &dephasing_t2(140e-6, 0.0).unwrap()), rho);
        let flat = apply(&rho, &dephasing_t2(1.0, 1e6).unwrap());
        assert!(flat.get(0, 1).norm() < 1e-15);
        assert!((flat.population(0) - 0.5).abs() < 1e-15);

        let one = apply(&rho, &dephasing_t2(3.0, 3.0).unwrap());
        assert!((one.get(0, 1).re - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        assert!(dephasing_t2(-1.0, 1.0).is_err());
    }

    #[test]
    fn fixed_points() {
        let mixed = DensityMatrix::maximally_mixed(1);
        for ch in [
            depolarizing_1q(0.3).unwrap(),
            pauli_1q(0.1, 0.2, 0.05).unwrap(),
        ] {
            assert!(apply(&mixed, &ch).max_abs_diff(&mixed) < 1e-15);
        }
        let ground = DensityMatrix::basis_state(1, "0").unwrap();
        assert!(apply(&ground, &thermal_t1(1.0, 0.7).unwrap()).max_abs_diff(&ground) < 1e-15);
        let diag = DensityMatrix::from_operator(Operator::diagonal(&[
            C64::new(0.2, 0.0),
            C64::new(0.8, 0.0),
        ]))
        .unwrap();
        assert!(apply(&diag, &dephasing_t2(1.0, 0.7).unwrap()).max_abs_diff(&diag) < 1e-15);
    }

    #[test]
    fn spec_round_trip_and_arity() {
        let spec = ChannelSpec::Pauli2q {
            p_x: 0.01,
            p_y: 0.0,
            p_z: 0.02,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ChannelSpec>(&text).unwrap(), spec);
        assert_eq!(spec.kraus().unwrap().arity(), 2);
        assert_eq!(ChannelSpec::ThermalT1 { t1: 1.0, tau: 0.1 }.arity(), 1);
        let zz = ChannelSpec::CrosstalkZz {
            zeta: 1.0,
            tau: 0.2,
        }
        .kraus()
        .unwrap();
        assert_eq!(zz.len(), 1);
        assert!((zz.ops()[0].get(0, 0) - C64::from_polar(1.0, -0.2)).norm() < 1e-16);
        assert_ne!(zz.ops()[0].get(0, 0), ONE);
    }

    #[test]
    fn coherence_time_physicality() {
        assert!(check_coherence_times(80e-6, 140e-6).is_ok());
        assert!(check_coherence_times(80e-6, 170e-6).is_err());
        assert!(check_coherence_times(0.0, 1.0).is_err());
    }
}
