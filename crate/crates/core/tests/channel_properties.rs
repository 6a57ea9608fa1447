use num_complex::Complex64;
use proptest::prelude::*;
use pstsim::channels::*;
use pstsim::quantum::{completeness_defect, DensityMatrix, Operator};

fn random_state(n_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    let dim = 1usize << n_qubits;
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |entries| {
        let a = Operator::new(
            n_qubits,
            entries
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap();
        let gram = a.matmul(&a.adjoint());
        let tr = gram.trace().re;
        DensityMatrix::from_operator(gram.scale_real(1.0 / tr)).unwrap()
    })
}

fn one_qubit_channel() -> impl Strategy<Value = KrausSet> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|q| depolarizing_1q(q).unwrap()),
        (0.0f64..0.34, 0.0f64..0.33, 0.0f64..0.33).prop_map(|(x, y, z)| pauli_1q(x, y, z).unwrap()),
        (1e-7f64..1e-3, 0.0f64..1e-5).prop_map(|(t1, tau)| thermal_t1(t1, tau).unwrap()),
        (1e-7f64..1e-3, 0.0f64..1e-5).prop_map(|(t2, tau)| dephasing_t2(t2, tau).unwrap()),
    ]
}

fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    a.max_abs_diff(b)
}

proptest! {
    #[test]
    fn constructed_channels_are_complete(ch in one_qubit_channel()) {
        prop_assert!(completeness_defect(ch.ops()) <= 1e-12);
        let lifted = lift_2q(&ch).unwrap();
        prop_assert!(completeness_defect(lifted.ops()) <= 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_hermiticity(ch in one_qubit_channel(), rho in random_state(2), target in 0usize..2) {
        let out = rho.apply_kraus(ch.ops(), &[target]).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10 && out.trace().im.abs() <= 1e-10);
        prop_assert!(out.hermiticity_defect() <= 1e-10);
        let lifted = lift_2q(&ch).unwrap();
        let out = rho.apply_kraus(lifted.ops(), &[1 - target, target]).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.hermiticity_defect() <= 1e-10);
    }

    #[test]
    fn depolarizing_equals_symmetric_pauli(p in 0.0f64..=0.1, rho in random_state(1)) {
        let depol = rho.apply_kraus(depolarizing_1q(4.0 * p / 3.0).unwrap().ops(), &[0]).unwrap();
        let pauli = rho.apply_kraus(pauli_1q(p / 3.0, p / 3.0, p / 3.0).unwrap().ops(), &[0]).unwrap();
        prop_assert!(max_diff(&depol, &pauli) < 1e-14);
    }

    #[test]
    fn crosstalk_commutes_with_dephasing(phi in -3.0f64..3.0, t2 in 1e-6f64..1e-4, rho in random_state(2)) {
        let zz = crosstalk_phase(phi);
        let deph = dephasing_t2(t2, 1e-6).unwrap();
        let a = rho.apply_unitary(&zz, &[0, 1]).unwrap().apply_kraus(deph.ops(), &[1]).unwrap();
        let b = rho.apply_kraus(deph.ops(), &[1]).unwrap().apply_unitary(&zz, &[0, 1]).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-13);
    }

    #[test]
    fn crosstalk_keeps_populations(zeta in -1e6f64..1e6, tau in 0.0f64..1e-5, rho in random_state(2)) {
        let out = rho.apply_unitary(&crosstalk_zz(zeta, tau).unwrap(), &[0, 1]).unwrap();
        for i in 0..4 {
            prop_assert!((out.population(i) - rho.population(i)).abs() < 1e-14);
        }
    }
}
