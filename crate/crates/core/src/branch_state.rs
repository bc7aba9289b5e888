//! Exact register state: polarization basis strings, each carrying a complex
//! amplitude and the coherent amplitude of the probe beam it is entangled
//! with.
//!
//! Linear optics on the qubits, conditional probe rotations and homodyne
//! conditioning all map branches to branches, so this representation is exact
//! for any probe intensity.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, QndError, Result};
use crate::fock_oracle::{self, FockState};
use crate::MAX_QUBITS;

/// Probe amplitudes closer than this (scaled by `max(1, |α|)`) are the same
/// coherent state for merging purposes.
pub const PROBE_TOLERANCE: f64 = 1e-12;

/// Tolerance for `U·U† = I`.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Tolerance on the norm accepted by operations that require normalized input.
pub const NORM_TOLERANCE: f64 = 1e-10;

// A merged amplitude smaller than this fraction of the magnitudes that were
// summed into it is treated as an exact cancellation and dropped.
const CANCELLATION_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }

    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

impl TryFrom<char> for Polarization {
    type Error = QndError;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'H' | 'h' => Ok(Polarization::H),
            'V' | 'v' => Ok(Polarization::V),
            other => invalid(format!("polarization letter must be H or V, got {other:?}")),
        }
    }
}

/// A computational basis string over `{H, V}`. Qubit `i` is the `i`-th letter
/// from the left; internally bit `i` is set when that letter is `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Basis {
    bits: u32,
    len: u8,
}

impl Basis {
    pub fn new(letters: &[Polarization]) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return invalid(format!(
                "basis length must be in 1..={MAX_QUBITS}, got {}",
                letters.len()
            ));
        }
        let bits = letters
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &l)| acc | ((l.index() as u32) << i));
        Ok(Basis {
            bits,
            len: letters.len() as u8,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, qubit: usize) -> Polarization {
        debug_assert!(qubit < self.len());
        if self.bits >> qubit & 1 == 1 {
            Polarization::V
        } else {
            Polarization::H
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Polarization> + '_ {
        (0..self.len()).map(|q| self.letter(q))
    }

    pub fn with_letter(mut self, qubit: usize, letter: Polarization) -> Self {
        self.bits = (self.bits & !(1 << qubit)) | ((letter.index() as u32) << qubit);
        self
    }

    /// Index of this string in a dense `2^n` register with qubit 0 as the most
    /// significant bit (so `"HV"` is 1 and `"VH"` is 2).
    pub fn dense_index(&self) -> usize {
        self.letters()
            .fold(0usize, |acc, l| (acc << 1) | l.index())
    }

    pub fn from_dense_index(index: usize, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_QUBITS || index >> len != 0 {
            return invalid(format!("dense index {index} does not fit {len} qubits"));
        }
        let letters: Vec<_> = (0..len)
            .map(|q| {
                if index >> (len - 1 - q) & 1 == 1 {
                    Polarization::V
                } else {
                    Polarization::H
                }
            })
            .collect();
        Basis::new(&letters)
    }

    fn appended(&self, letter: Polarization) -> Result<Self> {
        let mut letters: Vec<_> = self.letters().collect();
        letters.push(letter);
        Basis::new(&letters)
    }

    fn removed(&self, qubit: usize) -> Result<Self> {
        let letters: Vec<_> = self
            .letters()
            .enumerate()
            .filter(|&(q, _)| q != qubit)
            .map(|(_, l)| l)
            .collect();
        Basis::new(&letters)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Basis {
    type Err = QndError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(Polarization::try_from)
            .collect::<Result<Vec<_>>>()?;
        Basis::new(&letters)
    }
}

/// One term of a [`BranchState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub basis: Basis,
    pub amplitude: Complex64,
    /// Coherent amplitude of the probe for this basis string.
    pub probe: Complex64,
}

/// A 2×2 unitary acting on one polarization qubit, in the `{H, V}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitUnitary {
    m: [[Complex64; 2]; 2],
}

impl QubitUnitary {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = QubitUnitary { m };
        let p = u.mul(&u.adjoint());
        let err = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| {
                let id = if i == j { 1.0 } else { 0.0 };
                (p.m[i][j] - id).norm()
            })
            .fold(0.0, f64::max);
        if !err.is_finite() || err > UNITARY_TOLERANCE {
            return invalid(format!("matrix is not unitary (|UU† - I| = {err:e})"));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Self::diagonal(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// `diag(d_h, d_v)`; both entries are expected to have unit modulus.
    pub fn diagonal(d_h: Complex64, d_v: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        QubitUnitary {
            m: [[d_h, zero], [zero, d_v]],
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        QubitUnitary {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn mul(&self, rhs: &QubitUnitary) -> Self {
        let (a, b) = (self.m, rhs.m);
        let entry = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        QubitUnitary {
            m: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }
}

/// Pure state of `n` polarization qubits and one coherent probe mode.
///
/// Values are immutable: every operation returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    num_qubits: usize,
    branches: Vec<Branch>,
    probe_reference: Complex64,
}

impl BranchState {
    /// Single branch `|basis⟩ ⊗ |alpha⟩` with unit amplitude.
    pub fn new_register(n: usize, basis: &str, alpha: Complex64) -> Result<Self> {
        let basis: Basis = basis.parse()?;
        if basis.len() != n {
            return invalid(format!(
                "basis string has {} letters but the register has {n} qubits",
                basis.len()
            ));
        }
        if !alpha.is_finite() {
            return invalid("probe amplitude must be finite");
        }
        Ok(BranchState {
            num_qubits: n,
            branches: vec![Branch {
                basis,
                amplitude: Complex64::new(1.0, 0.0),
                probe: alpha,
            }],
            probe_reference: alpha,
        })
    }

    /// Builds a state from explicit branches, merging duplicates. The result is
    /// not renormalized.
    pub fn from_branches(
        num_qubits: usize,
        probe_reference: Complex64,
        branches: impl IntoIterator<Item = Branch>,
    ) -> Result<Self> {
        let branches: Vec<Branch> = branches.into_iter().collect();
        if branches.is_empty() {
            return invalid("a state needs at least one branch");
        }
        let r = probe_reference.norm();
        for b in &branches {
            if b.basis.len() != num_qubits {
                return invalid(format!(
                    "branch {} does not have {num_qubits} letters",
                    b.basis
                ));
            }
            if !b.amplitude.is_finite() || !b.probe.is_finite() {
                return invalid("branch amplitudes must be finite");
            }
            if (b.probe.norm() - r).abs() > PROBE_TOLERANCE * r.max(1.0) {
                return invalid(format!(
                    "probe |{}| differs from the reference modulus {r}",
                    b.probe
                ));
            }
        }
        let state = BranchState {
            num_qubits,
            branches: Vec::new(),
            probe_reference,
        };
        Ok(state.with_branches(branches))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn probe_reference(&self) -> Complex64 {
        self.probe_reference
    }

    pub(crate) fn probe_tolerance(&self) -> f64 {
        PROBE_TOLERANCE * self.probe_reference.norm().max(1.0)
    }

    /// Same register and reference with a new (merged) list of branches.
    pub(crate) fn with_branches(&self, branches: Vec<Branch>) -> Self {
        BranchState {
            num_qubits: self.num_qubits,
            branches: merge_branches(branches, self.probe_tolerance()),
            probe_reference: self.probe_reference,
        }
    }

    pub(crate) fn map_probes(&self, f: impl Fn(&Branch) -> Complex64) -> Self {
        BranchState {
            num_qubits: self.num_qubits,
            branches: self
                .branches
                .iter()
                .map(|b| Branch { probe: f(b), ..*b })
                .collect(),
            probe_reference: self.probe_reference,
        }
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return invalid(format!(
                "qubit index {qubit} out of range for a {}-qubit register",
                self.num_qubits
            ));
        }
        Ok(())
    }

    /// `Σ |amplitude|²`, ignoring probe overlaps.
    pub fn amplitude_norm_sqr(&self) -> f64 {
        self.branches.iter().map(|b| b.amplitude.norm_sqr()).sum()
    }

    /// `⟨ψ|ψ⟩` including the overlap of distinct probes on equal strings.
    pub fn norm_sqr(&self) -> f64 {
        inner_unchecked(self, self).re
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return invalid("cannot normalize a zero state");
        }
        let s = n.sqrt().recip();
        Ok(BranchState {
            num_qubits: self.num_qubits,
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    amplitude: b.amplitude * s,
                    ..*b
                })
                .collect(),
            probe_reference: self.probe_reference,
        })
    }

    /// True when every branch carries the same probe amplitude, i.e. the probe
    /// factors out of the state.
    pub fn probe_disentangled(&self) -> bool {
        let tol = self.probe_tolerance();
        let first = self.branches[0].probe;
        self.branches.iter().all(|b| (b.probe - first).norm() <= tol)
    }

    /// Replaces a disentangled probe with a fresh one at the reference amplitude.
    pub fn refresh_probe(&self) -> Result<Self> {
        if !self.probe_disentangled() {
            return invalid("probe is still entangled with the qubits");
        }
        let alpha = self.probe_reference;
        Ok(self.with_branches(self.branches.iter().map(|b| Branch { probe: alpha, ..*b }).collect()))
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &BranchState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return invalid(format!(
                "register sizes differ ({} vs {})",
                self.num_qubits, other.num_qubits
            ));
        }
        Ok(inner_unchecked(self, other))
    }

    /// Applies `u` to one qubit. Each branch splits in two; probes are
    /// inherited unchanged.
    pub fn apply_single_qubit(&self, qubit: usize, u: &QubitUnitary) -> Result<Self> {
        self.check_qubit(qubit)?;
        let u = QubitUnitary::new(u.m)?.m;
        let mut out = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            let col = b.basis.letter(qubit).index();
            for (row, letter) in [(0, Polarization::H), (1, Polarization::V)] {
                let coeff = u[row][col];
                if coeff != Complex64::new(0.0, 0.0) {
                    out.push(Branch {
                        basis: b.basis.with_letter(qubit, letter),
                        amplitude: coeff * b.amplitude,
                        probe: b.probe,
                    });
                }
            }
        }
        Ok(self.with_branches(out))
    }

    /// Adds a qubit at the end of every basis string.
    pub fn append_qubit(&self, letter: Polarization) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    basis: b.basis.appended(letter)?,
                    ..*b
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BranchState {
            num_qubits: self.num_qubits + 1,
            branches,
            probe_reference: self.probe_reference,
        })
    }

    /// Projects `qubit` onto `letter`, removes it from the register and
    /// renormalizes.
    pub fn project_out(&self, qubit: usize, letter: Polarization) -> Result<Self> {
        self.check_qubit(qubit)?;
        if self.num_qubits == 1 {
            return invalid("cannot remove the only qubit of a register");
        }
        let kept = self
            .branches
            .iter()
            .filter(|b| b.basis.letter(qubit) == letter)
            .map(|b| {
                Ok(Branch {
                    basis: b.basis.removed(qubit)?,
                    ..*b
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if kept.is_empty() {
            return invalid(format!("qubit {qubit} has no {letter} component"));
        }
        BranchState {
            num_qubits: self.num_qubits - 1,
            branches: Vec::new(),
            probe_reference: self.probe_reference,
        }
        .with_branches(kept)
        .normalize()
    }

    /// Expands every coherent probe in the photon-number basis up to `n_max`.
    pub fn to_fock(&self, n_max: usize) -> Result<FockState> {
        let dim = n_max + 1;
        let mut vector = vec![Complex64::new(0.0, 0.0); (1usize << self.num_qubits) * dim];
        for b in &self.branches {
            let probe = fock_oracle::coherent_fock(b.probe, n_max)?;
            let offset = b.basis.dense_index() * dim;
            for (k, c) in probe.iter().enumerate() {
                vector[offset + k] += b.amplitude * c;
            }
        }
        FockState::from_vector(self.num_qubits, n_max, vector)
    }
}

impl fmt::Display for BranchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6})|{}⟩|{:.6}⟩", b.amplitude, b.basis, b.probe)?;
        }
        Ok(())
    }
}

/// `⟨β|γ⟩ = exp(-|β - γ|²/2 + i·Im(β*γ))`.
pub fn coherent_overlap(beta: Complex64, gamma: Complex64) -> Complex64 {
    let d = (beta - gamma).norm_sqr();
    let phase = (beta.conj() * gamma).im;
    Complex64::from_polar((-0.5 * d).exp(), phase)
}

fn inner_unchecked(a: &BranchState, b: &BranchState) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in &a.branches {
        for y in b.branches.iter().filter(|y| y.basis == x.basis) {
            acc += x.amplitude.conj() * y.amplitude * coherent_overlap(x.probe, y.probe);
        }
    }
    acc
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &BranchState, b: &BranchState) -> Result<f64> {
    for s in [a, b] {
        if !s.is_normalized() {
            return invalid(format!("state is not normalized (norm² = {})", s.norm_sqr()));
        }
    }
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

fn merge_branches(branches: Vec<Branch>, probe_tol: f64) -> Vec<Branch> {
    let mut merged: Vec<(Branch, f64)> = Vec::with_capacity(branches.len());
    for b in branches {
        match merged
            .iter_mut()
            .find(|(m, _)| m.basis == b.basis && (m.probe - b.probe).norm() <= probe_tol)
        {
            Some((m, mag)) => {
                m.amplitude += b.amplitude;
                *mag += b.amplitude.norm();
            }
            None => merged.push((b, b.amplitude.norm())),
        }
    }
    merged
        .into_iter()
        .filter(|(b, mag)| b.amplitude.norm() > CANCELLATION_TOLERANCE * mag)
        .map(|(b, _)| b)
        .collect()
}
