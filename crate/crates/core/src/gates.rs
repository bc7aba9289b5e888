//! Near-deterministic gates assembled from cross-Kerr couplings, homodyne
//! detection, linear optics and classical feed-forward.
//!
//! Every composite gate consumes a fresh probe at the register's reference
//! amplitude `α`. The local oscillator is locked to the phase of that
//! reference, so only `|α|` enters the discrimination.
//!
//! Misclassification is tracked exactly: each branch knows which side of the
//! decision threshold its probe mean sits on, so the posterior weight of the
//! wrongly classified branches is reported as [`GateReport::leakage`], and
//! [`ReadoutMode::PostSelected`] conditions a run on every classification
//! being correct.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::branch_state::{Branch, BranchState, Polarization, QubitUnitary};
use crate::error::{invalid, QndError, Result};
use crate::homodyne::{
    classify, condition_on_x, misclassification_probability, phi_correction, x_distribution,
    HomodyneOutcome, Parity,
};
use crate::optics_ops::{cross_kerr, parity_couplings, phase_shifter, probe_phase, waveplate};
use crate::optics_ops::{KerrCoupling, Waveplate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReadoutMode {
    /// Outcomes drawn from the full homodyne distribution.
    #[default]
    Homodyne,
    /// Outcomes drawn conditioned on every classification being correct;
    /// wrongly classified branches are removed.
    PostSelected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    pub fn unitary(self) -> QubitUnitary {
        match self {
            Pauli::X => waveplate(Waveplate::PauliX),
            Pauli::Z => waveplate(Waveplate::PauliZ),
        }
    }
}

/// Feed-forward operation applied after a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Correction {
    Phase { qubit: usize, phi: f64 },
    Pauli { qubit: usize, pauli: Pauli },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementBasis {
    Rectilinear,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QndOutcome {
    H,
    V,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOutcome {
    Parity(Parity),
    Qnd(QndOutcome),
    Cnot {
        control_ancilla: Parity,
        ancilla_target: Parity,
        ancilla: Polarization,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub outcome: GateOutcome,
    pub x_records: Vec<HomodyneOutcome>,
    /// Misclassification probability of one homodyne step at the gate's `(α, θ)`.
    pub analytic_error: f64,
    pub corrections: Vec<Correction>,
    /// Posterior weight of wrongly classified branches, summed over steps.
    pub leakage: f64,
}

impl GateReport {
    fn new(outcome: GateOutcome, alpha: f64, theta: f64) -> Self {
        GateReport {
            outcome,
            x_records: Vec::new(),
            analytic_error: misclassification_probability(alpha, theta),
            corrections: Vec::new(),
            leakage: 0.0,
        }
    }

    fn absorb(&mut self, other: GateReport) {
        self.x_records.extend(other.x_records);
        self.corrections.extend(other.corrections);
        self.leakage += other.leakage;
    }
}

/// Heralded single-photon source with per-attempt success probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    p: f64,
}

impl SourceModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("success probability must lie in [0, 1], got {p}"));
        }
        Ok(SourceModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl Default for SourceModel {
    /// `p = 1/e`: the best single-photon heralding rate of a photon-number
    /// measurement on a coherent pulse, `|β|² e^{-|β|²}` at `|β|² = 1`.
    fn default() -> Self {
        SourceModel {
            p: (-1.0f64).exp(),
        }
    }
}

/// One heralded generation attempt.
pub fn herald_single_photon<R: Rng + ?Sized>(source: &SourceModel, rng: &mut R) -> bool {
    rng.random_bool(source.p)
}

fn check_gate_params(state: &BranchState, theta: f64) -> Result<f64> {
    let alpha = state.probe_reference().norm();
    if !theta.is_finite() || !alpha.is_finite() {
        return invalid("alpha and theta must be finite");
    }
    if alpha <= 0.0 || theta <= 0.0 || mean_is_degenerate(alpha, theta) {
        return Err(QndError::NoDistinguishability { alpha, theta });
    }
    if theta >= std::f64::consts::PI {
        return invalid(format!("theta must be below pi, got {theta}"));
    }
    if !state.is_normalized() {
        return invalid(format!(
            "state is not normalized (norm² = {})",
            state.norm_sqr()
        ));
    }
    Ok(alpha)
}

fn mean_is_degenerate(alpha: f64, theta: f64) -> bool {
    crate::homodyne::mean_separation(alpha, theta) == 0.0
}

/// Fresh probe with a real amplitude `α = |reference|`.
fn fresh_real_probe(state: &BranchState) -> Result<BranchState> {
    let refreshed = state.refresh_probe()?;
    Ok(probe_phase(&refreshed, -state.probe_reference().arg()))
}

struct Readout {
    state: BranchState,
    x: f64,
    classification: Parity,
    leakage: f64,
}

/// Homodyne readout of a probe that has already interacted with the register.
fn read_probe<R: Rng + ?Sized>(
    coupled: &BranchState,
    alpha: f64,
    theta: f64,
    mode: ReadoutMode,
    rng: &mut R,
) -> Result<Readout> {
    let dist = x_distribution(coupled)?;
    let x = match mode {
        ReadoutMode::Homodyne => dist.sample(rng),
        ReadoutMode::PostSelected => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut comp = *dist.components().last().expect("mixture is never empty");
            for c in dist.components() {
                acc += c.weight;
                if u < acc {
                    comp = *c;
                    break;
                }
            }
            let wanted = classify(comp.mean, alpha, theta)?;
            loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = comp.mean + z;
                if classify(x, alpha, theta)? == wanted {
                    break x;
                }
            }
        }
    };
    let classification = classify(x, alpha, theta)?;
    let consistent: Vec<bool> = coupled
        .branches()
        .iter()
        .map(|b| classify(2.0 * b.probe.re, alpha, theta).map(|p| p == classification))
        .collect::<Result<_>>()?;

    let (conditioned, weights) = condition_on_x(coupled, x)?;
    let leakage: f64 = weights
        .iter()
        .zip(&consistent)
        .filter(|(_, ok)| !**ok)
        .map(|(w, _)| w)
        .sum();

    let state = match mode {
        ReadoutMode::Homodyne => conditioned,
        ReadoutMode::PostSelected => {
            let kept: Vec<Branch> = coupled
                .branches()
                .iter()
                .zip(&consistent)
                .filter(|(_, ok)| **ok)
                .map(|(b, _)| *b)
                .collect();
            let pre = coupled.with_branches(kept).normalize()?;
            condition_on_x(&pre, x)?.0
        }
    };
    Ok(Readout {
        state,
        x,
        classification,
        leakage,
    })
}

fn check_pair(state: &BranchState, a: usize, b: usize) -> Result<()> {
    state.check_qubit(a)?;
    state.check_qubit(b)?;
    if a == b {
        return invalid("the two qubits of a two-qubit gate must differ");
    }
    Ok(())
}

/// Two-qubit parity gate with homodyne readout drawn from the full outcome
/// distribution.
pub fn parity_gate<R: Rng + ?Sized>(
    state: &BranchState,
    q1: usize,
    q2: usize,
    theta: f64,
    rng: &mut R,
) -> Result<(BranchState, GateReport)> {
    parity_gate_with(state, q1, q2, theta, ReadoutMode::Homodyne, rng)
}

/// Parity gate: `q1` couples `(H, +θ)` and `q2` couples `(H, -θ)` to a fresh
/// probe, the probe's X quadrature is measured and classified, and on the odd
/// outcome the phase `φ(x)` is removed by a phase shifter on `q1`.
pub fn parity_gate_with<R: Rng + ?Sized>(
    state: &BranchState,
    q1: usize,
    q2: usize,
    theta: f64,
    mode: ReadoutMode,
    rng: &mut R,
) -> Result<(BranchState, GateReport)> {
    check_pair(state, q1, q2)?;
    let alpha = check_gate_params(state, theta)?;
    let [k1, k2] = parity_couplings(q1, q2, theta)?;
    let probe = fresh_real_probe(state)?;
    let coupled = cross_kerr(&cross_kerr(&probe, &k1)?, &k2)?;

    let readout = read_probe(&coupled, alpha, theta, mode, rng)?;
    let mut report = GateReport::new(GateOutcome::Parity(readout.classification), alpha, theta);
    report.leakage = readout.leakage;

    let mut out = readout.state;
    let mut phi_applied = 0.0;
    if readout.classification == Parity::Odd {
        phi_applied = phi_correction(readout.x, alpha, theta);
        out = out.apply_single_qubit(q1, &phase_shifter(phi_applied))?;
        report.corrections.push(Correction::Phase {
            qubit: q1,
            phi: phi_applied,
        });
    }
    report.x_records.push(HomodyneOutcome {
        x: readout.x,
        classification: readout.classification,
        phi_applied,
    });
    Ok((out, report))
}

pub fn qnd_measure_polarization<R: Rng + ?Sized>(
    state: &BranchState,
    qubit: usize,
    basis: MeasurementBasis,
    theta: f64,
    rng: &mut R,
) -> Result<(QndOutcome, BranchState, GateReport)> {
    qnd_measure_polarization_with(state, qubit, basis, theta, ReadoutMode::Homodyne, rng)
}

/// Non-destructive polarization measurement: the `V` component of `qubit`
/// shifts a fresh probe by `θ`, and the homodyne classification reads the
/// letter. The diagonal basis is measured between two Hadamard waveplates.
/// The outcome-dependent phase on the `V` branch is fed forward so the
/// measurement leaves no spurious relative phase.
pub fn qnd_measure_polarization_with<R: Rng + ?Sized>(
    state: &BranchState,
    qubit: usize,
    basis: MeasurementBasis,
    theta: f64,
    mode: ReadoutMode,
    rng: &mut R,
) -> Result<(QndOutcome, BranchState, GateReport)> {
    state.check_qubit(qubit)?;
    let alpha = check_gate_params(state, theta)?;
    let h = waveplate(Waveplate::Hadamard);
    let rotated = match basis {
        MeasurementBasis::Rectilinear => state.clone(),
        MeasurementBasis::Diagonal => state.apply_single_qubit(qubit, &h)?,
    };

    let probe = fresh_real_probe(&rotated)?;
    let coupling = KerrCoupling::new(qubit, Polarization::V, theta)?;
    let coupled = cross_kerr(&probe, &coupling)?;
    let readout = read_probe(&coupled, alpha, theta, mode, rng)?;

    let phi = phi_correction(readout.x, alpha, theta);
    let fix = QubitUnitary::diagonal(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -phi));
    let mut out = readout.state.apply_single_qubit(qubit, &fix)?;
    if basis == MeasurementBasis::Diagonal {
        out = out.apply_single_qubit(qubit, &h)?;
    }

    let outcome = match (basis, readout.classification) {
        (MeasurementBasis::Rectilinear, Parity::Even) => QndOutcome::H,
        (MeasurementBasis::Rectilinear, Parity::Odd) => QndOutcome::V,
        (MeasurementBasis::Diagonal, Parity::Even) => QndOutcome::Plus,
        (MeasurementBasis::Diagonal, Parity::Odd) => QndOutcome::Minus,
    };
    let mut report = GateReport::new(GateOutcome::Qnd(outcome), alpha, theta);
    report.leakage = readout.leakage;
    report.corrections.push(Correction::Phase { qubit, phi });
    report.x_records.push(HomodyneOutcome {
        x: readout.x,
        classification: readout.classification,
        phi_applied: phi,
    });
    Ok((outcome, out, report))
}

/// Qubit roles inside the CNOT circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CnotRole {
    Control,
    Target,
    Ancilla,
}

/// Measurement stages of the CNOT circuit, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CnotStage {
    /// Rectilinear parity of control and ancilla.
    Copy(Parity),
    /// Diagonal parity of ancilla and target.
    Fuse(Parity),
    /// Rectilinear readout of the ancilla.
    Readout(Polarization),
}

/// Pauli feed-forward for each CNOT measurement record.
pub fn cnot_correction(stage: CnotStage) -> Option<(CnotRole, Pauli)> {
    match stage {
        CnotStage::Copy(Parity::Odd) => Some((CnotRole::Ancilla, Pauli::X)),
        CnotStage::Fuse(Parity::Odd) => Some((CnotRole::Control, Pauli::Z)),
        CnotStage::Readout(Polarization::V) => Some((CnotRole::Target, Pauli::X)),
        _ => None,
    }
}

pub fn cnot<R: Rng + ?Sized>(
    state: &BranchState,
    control: usize,
    target: usize,
    theta: f64,
    rng: &mut R,
) -> Result<(BranchState, GateReport)> {
    cnot_with(state, control, target, theta, ReadoutMode::Homodyne, rng)
}

/// CNOT (`V` control flips the target) from two parity gates, an ancilla
/// prepared in `(|H⟩ + |V⟩)/√2` and a QND detector:
///
/// 1. rectilinear parity gate on control and ancilla copies the control's
///    letter onto the ancilla;
/// 2. a parity gate between Hadamard waveplates measures the diagonal parity
///    of ancilla and target;
/// 3. the ancilla is read out rectilinearly and discarded.
///
/// Pauli corrections follow [`cnot_correction`].
pub fn cnot_with<R: Rng + ?Sized>(
    state: &BranchState,
    control: usize,
    target: usize,
    theta: f64,
    mode: ReadoutMode,
    rng: &mut R,
) -> Result<(BranchState, GateReport)> {
    check_pair(state, control, target)?;
    let alpha = check_gate_params(state, theta)?;
    let h = waveplate(Waveplate::Hadamard);
    let ancilla = state.num_qubits();
    let qubit_of = |role| match role {
        CnotRole::Control => control,
        CnotRole::Target => target,
        CnotRole::Ancilla => ancilla,
    };
    let mut corrections = Vec::new();
    let mut apply = |s: BranchState, stage| -> Result<BranchState> {
        match cnot_correction(stage) {
            Some((role, pauli)) => {
                let qubit = qubit_of(role);
                corrections.push(Correction::Pauli { qubit, pauli });
                s.apply_single_qubit(qubit, &pauli.unitary())
            }
            None => Ok(s),
        }
    };

    let s = state
        .append_qubit(Polarization::H)?
        .apply_single_qubit(ancilla, &h)?;

    let (s, copy) = parity_gate_with(&s, control, ancilla, theta, mode, rng)?;
    let copy_parity = parity_of(&copy);
    let s = apply(s, CnotStage::Copy(copy_parity))?;

    let s = s
        .apply_single_qubit(ancilla, &h)?
        .apply_single_qubit(target, &h)?;
    let (s, fuse) = parity_gate_with(&s, ancilla, target, theta, mode, rng)?;
    let s = s
        .apply_single_qubit(ancilla, &h)?
        .apply_single_qubit(target, &h)?;
    let fuse_parity = parity_of(&fuse);
    let s = apply(s, CnotStage::Fuse(fuse_parity))?;

    let (readout, s, qnd) =
        qnd_measure_polarization_with(&s, ancilla, MeasurementBasis::Rectilinear, theta, mode, rng)?;
    let letter = match readout {
        QndOutcome::V => Polarization::V,
        _ => Polarization::H,
    };
    let s = apply(s, CnotStage::Readout(letter))?;
    let out = s.project_out(ancilla, letter)?;

    let mut report = GateReport::new(
        GateOutcome::Cnot {
            control_ancilla: copy_parity,
            ancilla_target: fuse_parity,
            ancilla: letter,
        },
        alpha,
        theta,
    );
    // Keep measurement-side feed-forward in circuit order, Pauli fixes after
    // their stage.
    let mut paulis = corrections.into_iter();
    report.absorb(copy);
    if copy_parity == Parity::Odd {
        report.corrections.extend(paulis.next());
    }
    report.absorb(fuse);
    if fuse_parity == Parity::Odd {
        report.corrections.extend(paulis.next());
    }
    report.absorb(qnd);
    report.corrections.extend(paulis);
    Ok((out, report))
}

fn parity_of(report: &GateReport) -> Parity {
    match report.outcome {
        GateOutcome::Parity(p) => p,
        _ => unreachable!("parity gate reports a parity outcome"),
    }
}
