//! Dense complex linear algebra for small registers.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index,
//! so for three qubits `|100>` is index 4. Every matrix is stored row-major.
//! Operators acting on a subset of qubits are never expanded to the full
//! register in the hot path; [`Support`] precomputes the index pattern that
//! lets a `2^k x 2^k` matrix act in place on a `2^n x 2^n` density matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerances used by every contract check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    pub trace: f64,
    pub hermitian: f64,
    pub unitary: f64,
    pub completeness: f64,
    pub psd: f64,
    pub imaginary_residue: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        trace: 1e-10,
        hermitian: 1e-10,
        unitary: 1e-12,
        completeness: 1e-10,
        psd: 1e-8,
        imaginary_residue: 1e-10,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Square `2^arity x 2^arity` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    arity: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn new(arity: usize, data: Vec<C64>) -> Result<Self> {
        let dim = 1usize << arity;
        if data.len() != dim * dim {
            return Err(Error::input(format!(
                "operator on {arity} qubit(s) needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("operator has non-finite entries"));
        }
        Ok(Self { arity, data })
    }

    /// Build from a row-major slice of real entries.
    pub fn from_real(arity: usize, entries: &[f64]) -> Result<Self> {
        Self::new(arity, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(arity: usize) -> Self {
        Self::diagonal(&vec![ONE; 1 << arity])
    }

    pub fn zeros(arity: usize) -> Self {
        let dim = 1usize << arity;
        Self {
            arity,
            data: vec![ZERO; dim * dim],
        }
    }

    /// Diagonal operator; `diag.len()` must be a power of two.
    pub fn diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        assert!(
            dim.is_power_of_two(),
            "diagonal length must be a power of two"
        );
        let mut op = Self::zeros(dim.trailing_zeros() as usize);
        for (i, &d) in diag.iter().enumerate() {
            op.data[i * dim + i] = d;
        }
        op
    }

    pub fn pauli_x() -> Self {
        Self::from_real(1, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::new(1, vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(1, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn matmul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.arity, rhs.arity, "operator arity mismatch");
        let dim = self.dim();
        let mut out = Operator::zeros(self.arity);
        for r in 0..dim {
            for k in 0..dim {
                let a = self.data[r * dim + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..dim {
                    out.data[r * dim + c] += a * rhs.data[k * dim + c];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Operator {
        let dim = self.dim();
        let mut out = Operator::zeros(self.arity);
        for r in 0..dim {
            for c in 0..dim {
                out.data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`; `self` acts on the more significant qubits.
    pub fn kron(&self, rhs: &Operator) -> Operator {
        let (da, db) = (self.dim(), rhs.dim());
        let dim = da * db;
        let mut out = Operator::zeros(self.arity + rhs.arity);
        for ar in 0..da {
            for ac in 0..da {
                let a = self.data[ar * da + ac];
                for br in 0..db {
                    for bc in 0..db {
                        out.data[(ar * db + br) * dim + ac * db + bc] = a * rhs.data[br * db + bc];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            arity: self.arity,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Operator {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.arity, rhs.arity, "operator arity mismatch");
        Operator {
            arity: self.arity,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest elementwise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        assert_eq!(self.arity, rhs.arity, "operator arity mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Operator::identity(self.arity))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Smallest `max |e^{iφ} self - other|` over global phases φ.
    ///
    /// The phase is taken from the overlap `Tr(self† other)`, which is the
    /// optimum for the Frobenius norm and adequate for the max norm when the
    /// two operators agree up to phase.
    pub fn phase_aligned_diff(&self, other: &Operator) -> f64 {
        let overlap: C64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.scale(phase).max_abs_diff(other)
    }
}

/// `max |Σ E†E - I|` for a Kraus set.
pub fn completeness_defect(kraus: &[Operator]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let mut sum = Operator::zeros(first.arity());
    for k in kraus {
        sum = sum.add(&k.adjoint().matmul(k));
    }
    sum.max_abs_diff(&Operator::identity(first.arity()))
}

/// Index pattern of a `k`-qubit operator inside an `n`-qubit register.
#[derive(Debug, Clone)]
pub struct Support {
    /// Global index offset of every local basis state, local index ordered with
    /// the first target as most significant bit.
    offsets: Vec<usize>,
    /// Global indices whose target bits are all zero.
    bases: Vec<usize>,
}

impl Support {
    pub fn new(targets: &[usize], n_qubits: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::input("operator needs at least one target"));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= n_qubits {
                return Err(Error::input(format!(
                    "target qubit {t} out of range for {n_qubits} qubit(s)"
                )));
            }
            if targets[..i].contains(&t) {
                return Err(Error::input(format!("duplicate target qubit {t}")));
            }
        }
        let k = targets.len();
        let bit = |q: usize| 1usize << (n_qubits - 1 - q);
        let offsets = (0..1usize << k)
            .map(|local| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &q)| bit(q))
                    .sum()
            })
            .collect();
        let mask: usize = targets.iter().map(|&q| bit(q)).sum();
        let bases = (0..1usize << n_qubits).filter(|i| i & mask == 0).collect();
        Ok(Self { offsets, bases })
    }

    pub fn arity(&self) -> usize {
        self.offsets.len().trailing_zeros() as usize
    }
}

/// Lift `op` acting on `targets` to the full `n_qubits` register.
pub fn embed(op: &Operator, targets: &[usize], n_qubits: usize) -> Result<Operator> {
    if targets.len() != op.arity() {
        return Err(Error::input(format!(
            "{}-qubit operator given {} target(s)",
            op.arity(),
            targets.len()
        )));
    }
    let support = Support::new(targets, n_qubits)?;
    let mut full = Operator::identity(n_qubits);
    left_mul_local(&mut full.data, 1 << n_qubits, op, &support);
    Ok(full)
}

/// `M <- (op on support) · M` for a row-major `dim x dim` matrix.
fn left_mul_local(m: &mut [C64], dim: usize, op: &Operator, support: &Support) {
    let local = op.dim();
    let mut v = [ZERO; 4];
    let mut w = [ZERO; 4];
    debug_assert!(local <= 4, "kernels handle at most two-qubit operators");
    for &base in &support.bases {
        for col in 0..dim {
            for l in 0..local {
                v[l] = m[(base + support.offsets[l]) * dim + col];
            }
            for r in 0..local {
                let row = &op.data[r * local..(r + 1) * local];
                w[r] = row.iter().zip(&v[..local]).map(|(a, b)| a * b).sum();
            }
            for l in 0..local {
                m[(base + support.offsets[l]) * dim + col] = w[l];
            }
        }
    }
}

/// `M <- M · (op on support)†`.
fn right_mul_adjoint_local(m: &mut [C64], dim: usize, op: &Operator, support: &Support) {
    let local = op.dim();
    let mut v = [ZERO; 4];
    let mut w = [ZERO; 4];
    for row in 0..dim {
        let r = &mut m[row * dim..(row + 1) * dim];
        for &base in &support.bases {
            for l in 0..local {
                v[l] = r[base + support.offsets[l]];
            }
            for j in 0..local {
                let oprow = &op.data[j * local..(j + 1) * local];
                w[j] = oprow
                    .iter()
                    .zip(&v[..local])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
            }
            for l in 0..local {
                r[base + support.offsets[l]] = w[l];
            }
        }
    }
}

/// Density matrix of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Projector `|b><b|` onto a computational basis state given as a string of
    /// `'0'`/`'1'` characters, qubit 0 first.
    pub fn basis_state(n_qubits: usize, bitstring: &str) -> Result<Self> {
        if bitstring.chars().count() != n_qubits {
            return Err(Error::input(format!(
                "bitstring `{bitstring}` does not describe {n_qubits} qubit(s)"
            )));
        }
        let mut index = 0usize;
        for ch in bitstring.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::input(format!("invalid bit character `{other}`"))),
                };
        }
        Ok(Self::basis_index(n_qubits, index))
    }

    pub(crate) fn basis_index(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        data[index * dim + index] = ONE;
        Self { n_qubits, data }
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let op = Operator::identity(n_qubits).scale_real(1.0 / dim as f64);
        Self {
            n_qubits,
            data: op.data,
        }
    }

    /// Wrap an operator as a state; checks hermiticity and unit trace.
    pub fn from_operator(op: Operator) -> Result<Self> {
        let policy = NumericPolicy::DEFAULT;
        if !op.is_hermitian(policy.hermitian) {
            return Err(Error::contract("density matrix must be Hermitian"));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > policy.trace {
            return Err(Error::contract(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits: op.arity,
            data: op.data,
        })
    }

    /// Pure state `|ψ><ψ|` from a normalised amplitude vector.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::input(
                "amplitude vector length must be a power of two",
            ));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NumericPolicy::DEFAULT.trace {
            return Err(Error::input(format!(
                "state vector norm² is {norm}, expected 1"
            )));
        }
        let data = amplitudes
            .iter()
            .flat_map(|a| amplitudes.iter().map(move |b| a * b.conj()))
            .collect();
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            data,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            arity: self.n_qubits,
            data: self.data.clone(),
        }
    }

    /// Diagonal entry `<i|ρ|i>`.
    pub fn population(&self, index: usize) -> f64 {
        self.get(index, index).re
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.data[r * dim + c] - self.data[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    /// True when the smallest eigenvalue exceeds `-tol`.
    ///
    /// Decided by a Cholesky factorisation of `ρ + tol·I`; meant for tests and
    /// debug checks, not for the evolution loop.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let dim = self.dim();
        let mut a = self.data.clone();
        for i in 0..dim {
            a[i * dim + i] += tol;
        }
        let mut l = vec![ZERO; dim * dim];
        for j in 0..dim {
            let mut diag = a[j * dim + j].re;
            for k in 0..j {
                diag -= l[j * dim + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * dim + j] = C64::new(ljj, 0.0);
            for i in j + 1..dim {
                let mut s = a[i * dim + j];
                for k in 0..j {
                    s -= l[i * dim + k] * l[j * dim + k].conj();
                }
                l[i * dim + j] = s / ljj;
            }
        }
        true
    }

    /// `U ρ U†` with `op` acting on `targets`; `op` must be unitary.
    pub fn apply_unitary(&self, op: &Operator, targets: &[usize]) -> Result<Self> {
        let defect = op.unitarity_defect();
        if defect > NumericPolicy::DEFAULT.unitary {
            return Err(Error::contract(format!(
                "operator is not unitary (max |U†U - I| = {defect:e})"
            )));
        }
        let support = self.support_for(op, targets)?;
        let mut out = self.clone();
        out.unitary_in_place(op, &support);
        Ok(out)
    }

    /// `Σ_k E_k ρ E_k†` with every `E_k` acting on `targets`; the set must be complete.
    pub fn apply_kraus(&self, kraus: &[Operator], targets: &[usize]) -> Result<Self> {
        if kraus.iter().any(|k| k.arity() != targets.len()) {
            return Err(Error::input("Kraus operator arity does not match targets"));
        }
        let defect = completeness_defect(kraus);
        if defect > NumericPolicy::DEFAULT.completeness {
            return Err(Error::contract(format!(
                "Kraus set is not trace preserving (max |ΣE†E - I| = {defect:e})"
            )));
        }
        let support = self.support_for(&kraus[0], targets)?;
        let mut out = self.clone();
        let mut scratch = Scratch::default();
        out.kraus_in_place(kraus, &support, &mut scratch);
        Ok(out)
    }

    /// `Tr[obs ρ]` for a Hermitian observable on the whole register.
    pub fn expectation(&self, obs: &Operator) -> Result<f64> {
        let policy = NumericPolicy::DEFAULT;
        if obs.arity() != self.n_qubits {
            return Err(Error::input(format!(
                "observable acts on {} qubit(s), state has {}",
                obs.arity(),
                self.n_qubits
            )));
        }
        if !obs.is_hermitian(policy.hermitian) {
            return Err(Error::contract("observable is not Hermitian"));
        }
        let dim = self.dim();
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += obs.data[i * dim + j] * self.data[j * dim + i];
            }
        }
        if acc.im.abs() > policy.imaginary_residue {
            return Err(Error::contract(format!(
                "expectation has imaginary residue {:e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn support_for(&self, op: &Operator, targets: &[usize]) -> Result<Support> {
        if op.arity() != targets.len() {
            return Err(Error::input(format!(
                "{}-qubit operator given {} target(s)",
                op.arity(),
                targets.len()
            )));
        }
        if op.arity() > 2 {
            return Err(Error::input(
                "local application supports one- and two-qubit operators",
            ));
        }
        Support::new(targets, self.n_qubits)
    }

    pub(crate) fn unitary_in_place(&mut self, op: &Operator, support: &Support) {
        let dim = self.dim();
        left_mul_local(&mut self.data, dim, op, support);
        right_mul_adjoint_local(&mut self.data, dim, op, support);
    }

    pub(crate) fn kraus_in_place(
        &mut self,
        kraus: &[Operator],
        support: &Support,
        scratch: &mut Scratch,
    ) {
        if let [single] = kraus {
            self.unitary_in_place(single, support);
            return;
        }
        let dim = self.dim();
        scratch.acc.clear();
        scratch.acc.resize(self.data.len(), ZERO);
        for e in kraus {
            scratch.term.clear();
            scratch.term.extend_from_slice(&self.data);
            left_mul_local(&mut scratch.term, dim, e, support);
            right_mul_adjoint_local(&mut scratch.term, dim, e, support);
            for (a, t) in scratch.acc.iter_mut().zip(&scratch.term) {
                *a += t;
            }
        }
        std::mem::swap(&mut self.data, &mut scratch.acc);
    }
}

/// Reusable buffers for Kraus accumulation.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    acc: Vec<C64>,
    term: Vec<C64>,
}
