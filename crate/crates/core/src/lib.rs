//! Simulation of optical quantum computation driven by weak cross-Kerr
//! nonlinearities, coherent probe beams and homodyne detection.
//!
//! Every reachable state in these circuits is a superposition of
//! polarization basis strings, each entangled with a single coherent probe
//! amplitude. [`BranchState`] stores exactly that, which keeps the simulation
//! exact at arbitrarily intense probes. A truncated photon-number simulator
//! ([`fock_oracle`]) is kept alongside as an independent check at small
//! amplitudes.
//!
//! Quadrature convention used throughout: `X = a + a†`, so the vacuum has unit
//! variance and a coherent state `|β⟩` yields a Gaussian of mean `2·Re β`.
//!
//! ```
//! use num_complex::Complex64;
//! use qnd_core::{gates, optics_ops::{waveplate, Waveplate}, BranchState, Parity};
//! use rand::SeedableRng;
//!
//! let h = waveplate(Waveplate::Hadamard);
//! let state = BranchState::new_register(2, "HH", Complex64::new(1000.0, 0.0))?
//!     .apply_single_qubit(0, &h)?
//!     .apply_single_qubit(1, &h)?;
//! let mut rng = rand::rngs::StdRng::seed_from_u64(7);
//! let (out, report) = gates::parity_gate(&state, 0, 1, 0.1, &mut rng)?;
//! assert!(report.analytic_error < 1e-6);
//! assert_eq!(out.num_qubits(), 2);
//! # let _ = Parity::Even;
//! # Ok::<(), qnd_core::QndError>(())
//! ```

pub mod analysis;
pub mod branch_state;
mod error;
pub mod fock_oracle;
pub mod gates;
pub mod homodyne;
pub mod optics_ops;
pub mod special;

pub use analysis::{BudgetReport, SweepRow, SweepTable};
pub use branch_state::{Basis, Branch, BranchState, Polarization, QubitUnitary};
pub use error::{QndError, Result};
pub use fock_oracle::FockState;
pub use gates::{Correction, GateOutcome, GateReport, Pauli, ReadoutMode, SourceModel};
pub use homodyne::{GaussianMixture, HomodyneOutcome, MixtureComponent, Parity};
pub use optics_ops::{KerrCoupling, Waveplate};

/// Maximum number of qubits a register can hold (basis strings are bitmasks).
pub const MAX_QUBITS: usize = 32;
