//! Physical primitives acting on a [`BranchState`]: the conditional
//! cross-Kerr rotation of the probe, unconditional probe phase shifts and the
//! named single-qubit waveplates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::branch_state::{BranchState, Polarization, QubitUnitary};
use crate::error::{invalid, Result};

/// Cross-Kerr interaction between one polarization qubit and the probe: the
/// probe picks up `e^{iθ}` on strings where `qubit` reads `coupled_letter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrCoupling {
    qubit: usize,
    coupled_letter: Polarization,
    theta: f64,
}

impl KerrCoupling {
    /// `theta` must be finite with `|theta| < π`.
    pub fn new(qubit: usize, coupled_letter: Polarization, theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() >= PI {
            return invalid(format!(
                "cross-Kerr phase must satisfy |theta| < pi, got {theta}"
            ));
        }
        Ok(KerrCoupling {
            qubit,
            coupled_letter,
            theta,
        })
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn coupled_letter(&self) -> Polarization {
        self.coupled_letter
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// The two couplings of the parity gate: `q1` carries `(H, +θ)` and `q2`
/// carries `(H, -θ)`, so `|HV⟩ → +θ`, `|VH⟩ → -θ` and `|HH⟩`, `|VV⟩` see no net
/// shift.
pub fn parity_couplings(q1: usize, q2: usize, theta: f64) -> Result<[KerrCoupling; 2]> {
    Ok([
        KerrCoupling::new(q1, Polarization::H, theta)?,
        KerrCoupling::new(q2, Polarization::H, -theta)?,
    ])
}

pub fn cross_kerr(state: &BranchState, coupling: &KerrCoupling) -> Result<BranchState> {
    state.check_qubit(coupling.qubit)?;
    let rot = Complex64::from_polar(1.0, coupling.theta);
    Ok(state.map_probes(|b| {
        if b.basis.letter(coupling.qubit) == coupling.coupled_letter {
            b.probe * rot
        } else {
            b.probe
        }
    }))
}

/// Rotates the probe by `e^{iφ}` on every branch.
pub fn probe_phase(state: &BranchState, phi: f64) -> BranchState {
    let rot = Complex64::from_polar(1.0, phi);
    state.map_probes(|b| b.probe * rot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveplate {
    Hadamard,
    PauliX,
    PauliZ,
    /// Real rotation `cos(a)·I - i·sin(a)·Y` in the `{H, V}` basis.
    Rotation(f64),
}

pub fn waveplate(kind: Waveplate) -> QubitUnitary {
    let r = |x: f64| Complex64::new(x, 0.0);
    let m = match kind {
        Waveplate::Hadamard => [
            [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
            [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
        ],
        Waveplate::PauliX => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
        Waveplate::PauliZ => [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
        Waveplate::Rotation(a) => {
            let (s, c) = a.sin_cos();
            [[r(c), r(-s)], [r(s), r(c)]]
        }
    };
    QubitUnitary::new(m).expect("waveplates are unitary")
}

/// Passive phase shifter `diag(e^{-iφ}, e^{iφ})`, used to remove a
/// measurement-dependent relative phase by feed-forward.
pub fn phase_shifter(phi: f64) -> QubitUnitary {
    QubitUnitary::diagonal(Complex64::from_polar(1.0, -phi), Complex64::from_polar(1.0, phi))
}
