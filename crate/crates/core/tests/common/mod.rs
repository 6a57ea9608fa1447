//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the circuit or Kraus machinery of the crate:
//! both oracles diagonalise a real symmetric generator with nalgebra.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// `exp(-i θ (XX + YY) / 2)` as a row-major 4x4 matrix, qubit 0 most significant.
pub fn xy_evolution(theta: f64) -> Vec<Complex64> {
    let mut g = DMatrix::<f64>::zeros(4, 4);
    // XX + YY = 2 (|01><10| + |10><01|)
    g[(1, 2)] = 2.0;
    g[(2, 1)] = 2.0;
    expm_i(&g, -theta / 2.0)
}

/// `exp(i s G)` for a real symmetric `G`.
pub fn expm_i(g: &DMatrix<f64>, s: f64) -> Vec<Complex64> {
    let n = g.nrows();
    let eig = SymmetricEigen::new(g.clone());
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = (0..n)
                .map(|k| {
                    Complex64::from_polar(1.0, s * eig.eigenvalues[k])
                        * eig.eigenvectors[(r, k)]
                        * eig.eigenvectors[(c, k)]
                })
                .sum();
        }
    }
    out
}

/// Exact end-to-end transfer probability in the one-excitation sector,
/// where the chain reduces to tridiagonal hopping with amplitudes `h_i`.
pub fn transfer_probability(hopping: &[f64], t: f64) -> f64 {
    let n = hopping.len() + 1;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (i, &v) in hopping.iter().enumerate() {
        h[(i, i + 1)] = v;
        h[(i + 1, i)] = v;
    }
    let u = expm_i(&h, -t);
    u[(n - 1) * n].norm_sqr()
}

/// Smallest distance between `a` and `e^{iφ} b` over global phases.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}
