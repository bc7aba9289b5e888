//! Dense reference implementations shared by the integration tests. Nothing in
//! here goes through `BranchState`.

#![allow(dead_code)]

use num_complex::Complex64;
use qnd_core::gates::{cnot_correction, CnotRole, CnotStage, Pauli};
use qnd_core::{Parity, Polarization};

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub const H: [[f64; 2]; 2] = [
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
];
pub const X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
pub const Z: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

fn bit(index: usize, n: usize, q: usize) -> usize {
    index >> (n - 1 - q) & 1
}

/// Applies a 2×2 matrix to qubit `q` of a dense `n`-qubit vector (qubit 0 is
/// the most significant bit).
pub fn apply_1q(v: &[C], n: usize, q: usize, m: [[C; 2]; 2]) -> Vec<C> {
    let mut out = vec![c(0.0); v.len()];
    for (i, amp) in v.iter().enumerate() {
        let b = bit(i, n, q);
        let mask = 1 << (n - 1 - q);
        for (row, m_row) in m.iter().enumerate() {
            let j = (i & !mask) | (row << (n - 1 - q));
            out[j] += m_row[b] * amp;
        }
    }
    out
}

pub fn real(m: [[f64; 2]; 2]) -> [[C; 2]; 2] {
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

/// Projector onto the rectilinear parity subspace of qubits `i`, `j`.
pub fn parity_projector(v: &[C], n: usize, i: usize, j: usize, parity: Parity) -> Vec<C> {
    v.iter()
        .enumerate()
        .map(|(k, amp)| {
            let even = bit(k, n, i) == bit(k, n, j);
            if even == (parity == Parity::Even) {
                *amp
            } else {
                c(0.0)
            }
        })
        .collect()
}

/// `⟨letter|_q v`, returning an `(n-1)`-qubit vector.
pub fn contract_letter(v: &[C], n: usize, q: usize, letter: Polarization) -> Vec<C> {
    let want = if letter == Polarization::V { 1 } else { 0 };
    v.iter()
        .enumerate()
        .filter(|(k, _)| bit(*k, n, q) == want)
        .map(|(_, a)| *a)
        .collect()
}

fn pauli(p: Pauli) -> [[C; 2]; 2] {
    match p {
        Pauli::X => real(X),
        Pauli::Z => real(Z),
    }
}

fn correct(v: Vec<C>, stage: CnotStage) -> Vec<C> {
    // control = 0, target = 1, ancilla = 2
    match cnot_correction(stage) {
        Some((role, p)) => {
            let q = match role {
                CnotRole::Control => 0,
                CnotRole::Target => 1,
                CnotRole::Ancilla => 2,
            };
            apply_1q(&v, 3, q, pauli(p))
        }
        None => v,
    }
}

/// Ideal (projective) CNOT circuit for one record of measurement outcomes,
/// acting on a two-qubit input `(control, target)`. Unnormalized.
pub fn ideal_cnot_circuit(
    input: &[C; 4],
    copy: Parity,
    fuse: Parity,
    readout: Polarization,
) -> Vec<C> {
    // |input⟩ ⊗ (|H⟩ + |V⟩)/√2 on the ancilla (least significant bit).
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v: Vec<C> = input.iter().flat_map(|a| [a * r, a * r]).collect();
    v = parity_projector(&v, 3, 0, 2, copy);
    v = correct(v, CnotStage::Copy(copy));
    v = apply_1q(&apply_1q(&v, 3, 2, real(H)), 3, 1, real(H));
    v = parity_projector(&v, 3, 2, 1, fuse);
    v = apply_1q(&apply_1q(&v, 3, 2, real(H)), 3, 1, real(H));
    v = correct(v, CnotStage::Fuse(fuse));
    v = contract_letter(&v, 3, 2, readout);
    // The readout correction acts on the target after the ancilla is gone.
    match cnot_correction(CnotStage::Readout(readout)) {
        Some((CnotRole::Target, p)) => apply_1q(&v, 2, 1, pauli(p)),
        Some((role, _)) => panic!("unexpected readout correction on {role:?}"),
        None => v,
    }
}

/// 8×8 matrix of the circuit between ancilla preparation and readout (input
/// `(control, target, ancilla)` basis vectors as columns), for one record.
pub fn ideal_circuit_matrix(copy: Parity, fuse: Parity) -> Vec<Vec<C>> {
    (0..8)
        .map(|col| {
            let mut v = vec![c(0.0); 8];
            v[col] = c(1.0);
            v = parity_projector(&v, 3, 0, 2, copy);
            v = correct(v, CnotStage::Copy(copy));
            v = apply_1q(&apply_1q(&v, 3, 2, real(H)), 3, 1, real(H));
            v = parity_projector(&v, 3, 2, 1, fuse);
            v = apply_1q(&apply_1q(&v, 3, 2, real(H)), 3, 1, real(H));
            correct(v, CnotStage::Fuse(fuse))
        })
        .collect()
}

pub const CNOT: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 0.0],
];

pub fn ideal_cnot(input: &[C; 4]) -> [C; 4] {
    let mut out = [c(0.0); 4];
    for (i, row) in CNOT.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            out[i] += input[j] * m;
        }
    }
    out
}

pub fn all_records() -> Vec<(Parity, Parity, Polarization)> {
    let ps = [Parity::Even, Parity::Odd];
    let ls = [Polarization::H, Polarization::V];
    let mut out = Vec::with_capacity(8);
    for a in ps {
        for b in ps {
            for l in ls {
                out.push((a, b, l));
            }
        }
    }
    out
}

/// Largest deviation of the record's 4×4 logical map from `k·CNOT`, with `k`
/// fitted from the first nonzero entry.
pub fn cnot_deviation(copy: Parity, fuse: Parity, readout: Polarization) -> f64 {
    let columns: Vec<Vec<C>> = (0..4)
        .map(|j| {
            let mut e = [c(0.0); 4];
            e[j] = c(1.0);
            ideal_cnot_circuit(&e, copy, fuse, readout)
        })
        .collect();
    let k = columns[0][0];
    assert!(k.norm() > 0.1, "record has vanishing amplitude");
    let mut worst: f64 = 0.0;
    for (j, col) in columns.iter().enumerate() {
        for (i, entry) in col.iter().enumerate() {
            worst = worst.max((entry - k * CNOT[i][j]).norm());
        }
    }
    worst
}

/// Overlap fidelity `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)` of dense vectors.
pub fn dense_fidelity(a: &[C], b: &[C]) -> f64 {
    let ab: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let aa: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let bb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    ab.norm_sqr() / (aa * bb)
}
