//! Brute-force reference simulator on a truncated photon-number space.
//!
//! Shares nothing with the branch representation except the quadrature
//! convention, so agreement between the two is a meaningful check of
//! [`crate::optics_ops`] and [`crate::homodyne`] at small probe amplitudes.

use num_complex::Complex64;

use crate::branch_state::{BranchState, Polarization};
use crate::error::{invalid, Result};
use crate::special::hermite_functions;
use crate::MAX_QUBITS;

/// Dense state over `{H,V}^n ⊗ span{|0⟩..|n_max⟩}`, indexed as
/// `basis.dense_index() * (n_max + 1) + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    num_qubits: usize,
    n_max: usize,
    vector: Vec<Complex64>,
}

/// Smallest truncation considered safe for a coherent amplitude of modulus
/// `r`: `r² + 6r + 10`. The vacuum is exact at any truncation.
pub fn min_truncation(r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r * r + 6.0 * r + 10.0
    }
}

/// Fock amplitudes `e^{-|α|²/2} α^k / √(k!)` for `k = 0..=n_max`.
pub fn coherent_fock(alpha: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    let need = min_truncation(alpha.norm());
    if !need.is_finite() || (n_max as f64) < need {
        return invalid(format!(
            "truncation n_max = {n_max} too small for |alpha| = {} (need >= {need})",
            alpha.norm()
        ));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for k in 1..=n_max {
        c = c * alpha / (k as f64).sqrt();
        out.push(c);
    }
    Ok(out)
}

impl FockState {
    /// Wraps a dense vector. The vector must be normalized to within 1e-10.
    pub fn from_vector(num_qubits: usize, n_max: usize, vector: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return invalid(format!("unsupported register size {num_qubits}"));
        }
        if vector.len() != (1usize << num_qubits) * (n_max + 1) {
            return invalid(format!(
                "vector length {} does not match {num_qubits} qubits and n_max = {n_max}",
                vector.len()
            ));
        }
        let s = FockState {
            num_qubits,
            n_max,
            vector,
        };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return invalid(format!("Fock state is not normalized (norm² = {n})"));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|c| c.norm_sqr()).sum()
    }

    fn rows(&self) -> impl Iterator<Item = (usize, &[Complex64])> {
        self.vector.chunks(self.n_max + 1).enumerate()
    }

    /// Applies `exp(i θ n̂)` to the probe on every string whose `qubit` letter
    /// is `coupled_letter`.
    pub fn kerr_unitary_apply(
        &self,
        qubit: usize,
        coupled_letter: Polarization,
        theta: f64,
    ) -> Result<Self> {
        if qubit >= self.num_qubits {
            return invalid(format!("qubit index {qubit} out of range"));
        }
        let dim = self.n_max + 1;
        let mut vector = self.vector.clone();
        for (s, row) in vector.chunks_mut(dim).enumerate() {
            // Dense index: qubit 0 is the most significant bit.
            let bit = s >> (self.num_qubits - 1 - qubit) & 1;
            let letter = if bit == 1 { Polarization::V } else { Polarization::H };
            if letter != coupled_letter {
                continue;
            }
            for (k, c) in row.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, theta * k as f64);
            }
        }
        Ok(FockState {
            num_qubits: self.num_qubits,
            n_max: self.n_max,
            vector,
        })
    }

    /// Homodyne density `p(x) = Σ_s |Σ_k c_{s,k} ψ_k(x)|²`.
    pub fn x_density(&self, x: f64) -> f64 {
        let psi = hermite_functions(x, self.n_max);
        self.rows()
            .map(|(_, row)| {
                row.iter()
                    .zip(&psi)
                    .map(|(c, p)| c * p)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }
}

/// Free-function form of [`FockState::x_density`].
pub fn fock_x_density(state: &FockState, x: f64) -> f64 {
    state.x_density(x)
}

/// L2 distance between the Fock expansion of `a` and `b`.
pub fn oracle_distance(a: &BranchState, b: &FockState) -> Result<f64> {
    if a.num_qubits() != b.num_qubits {
        return invalid(format!(
            "register sizes differ ({} vs {})",
            a.num_qubits(),
            b.num_qubits
        ));
    }
    let fa = a.to_fock(b.n_max)?;
    Ok(fa
        .vector
        .iter()
        .zip(&b.vector)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}
