//! Headline numbers of the bundled suites, pinned as regression values.

mod common;

use pstsim::harness::{load_config, run_suite_in, ConfigFile, Metric, SuiteOutcome};

fn run(name: &str) -> SuiteOutcome {
    let suite = match load_config(&common::config_path(name)).unwrap() {
        ConfigFile::Suite(s) => s,
        ConfigFile::Experiment(_) => panic!("{name} is not a suite"),
    };
    let dir = tempfile::tempdir().unwrap();
    run_suite_in(&suite, dir.path()).unwrap()
}

fn comparison(out: &SuiteOutcome, b: &str, metric: Metric) -> f64 {
    out.summary
        .comparisons
        .iter()
        .find(|c| c.b == b && c.metric == metric)
        .unwrap_or_else(|| panic!("no {metric:?} comparison against {b}"))
        .value
}

fn close(actual: f64, expected: f64, what: &str) {
    assert!(
        (actual - expected).abs() < 1e-9,
        "{what}: {actual} != {expected}"
    );
}

#[test]
fn gate_noise_family_comparisons() {
    let out = run("table1.json");
    close(
        comparison(&out, "noiseless", Metric::DeltaFidelity),
        0.15964390988928817,
        "Δ_id",
    );
    close(
        comparison(&out, "pauli_x", Metric::DeltaFidelity),
        0.002693294105177794,
        "Δ_x",
    );
    close(
        comparison(&out, "pauli_y", Metric::DeltaFidelity),
        0.013858586720803796,
        "Δ_y",
    );
    close(
        comparison(&out, "pauli_z", Metric::DeltaFidelity),
        0.01037812805929498,
        "Δ_z",
    );
    close(
        comparison(&out, "noiseless", Metric::DeltaHitting),
        0.009424777960769355,
        "ΔT_id",
    );
    let peak = out.run("noiseless").unwrap().summary.deepest_peak_fidelity;
    close(peak, 0.9998017788697485, "noiseless peak at N = 30");
}

#[test]
fn biased_pauli_comparisons() {
    let out = run("table2.json");
    close(
        comparison(&out, "biased_xyy", Metric::DeltaFidelity),
        0.0010929477209133027,
        "Δ_xyy",
    );
    close(
        comparison(&out, "biased_yzz", Metric::DeltaFidelity),
        0.005439493565029234,
        "Δ_yzz",
    );
    close(
        comparison(&out, "biased_zxx", Metric::DeltaFidelity),
        0.004219396501034889,
        "Δ_zxx",
    );
    for b in ["biased_xyy", "biased_yzz", "biased_zxx"] {
        assert!(comparison(&out, b, Metric::DeltaHitting) <= 0.0021);
    }
}

#[test]
fn hardware_noise_fits() {
    let out = run("table5.json");
    let expected = [
        (
            "exp1_noiseless",
            0.4857338415530421,
            0.9999895182792812,
            0.0044223958123610135,
            0.9998017788697485,
        ),
        (
            "exp2_depolarizing_decoherence",
            0.12683230669841203,
            0.8804435772972964,
            0.013001360366394682,
            0.14935647705305619,
        ),
        (
            "exp3_positive_crosstalk",
            0.12958805780213234,
            0.8773783594645519,
            0.005969026041820608,
            0.1490036039633681,
        ),
        (
            "exp4_negative_crosstalk",
            0.12339234572820415,
            0.8813147715118498,
            0.020372020053663047,
            0.14751808320595153,
        ),
    ];
    for (label, alpha, c1, c2, peak) in expected {
        let run = out.run(label).unwrap();
        let fit = run.mitigated.as_ref().unwrap().fit.clone();
        close(fit.alpha, alpha, &format!("{label} α"));
        close(fit.c1, c1, &format!("{label} c1"));
        close(fit.c2, c2, &format!("{label} c2"));
        close(
            run.summary.deepest_peak_fidelity,
            peak,
            &format!("{label} peak"),
        );
    }
    let noisy = out.run("exp2_depolarizing_decoherence").unwrap();
    let m = noisy.mitigated.as_ref().unwrap();
    let rescaled_peak = m.rescaled.record(20).unwrap().peak_fidelity;
    let clean_peak = out
        .run("exp1_noiseless")
        .unwrap()
        .sweep
        .record(20)
        .unwrap()
        .peak_fidelity;
    assert!(
        (rescaled_peak - clean_peak).abs() < 0.05,
        "{rescaled_peak} vs {clean_peak}"
    );
}
