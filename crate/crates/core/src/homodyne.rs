//! X-quadrature (homodyne) measurement of the probe.
//!
//! Convention: `X = a + a†`. A coherent probe `|β⟩` produces a unit-variance
//! Gaussian outcome centred on `2·Re β`, and the quadrature wavefunction is
//!
//! ```text
//! ⟨x|β⟩ = (2π)^(-1/4) exp(-(x - 2β_r)²/4 + i β_i x - i β_i β_r)
//! ```
//!
//! The imaginary part of the probe amplitude is what produces the
//! outcome-dependent phase `φ(x)` on the odd parity branches.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::branch_state::{Branch, BranchState};
use crate::error::{invalid, QndError, Result};
use crate::special::{erfc, wrap_phase};

/// Homodyne outcomes with likelihood density below this are rejected.
pub const DEGENERATE_DENSITY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneOutcome {
    pub x: f64,
    pub classification: Parity,
    /// Phase removed by feed-forward, in `(-π, π]`.
    pub phi_applied: f64,
}

/// Unit-variance Gaussian component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    components: Vec<MixtureComponent>,
}

impl GaussianMixture {
    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn density(&self, x: f64) -> f64 {
        let norm = (2.0 * PI).sqrt().recip();
        self.components
            .iter()
            .map(|c| c.weight * norm * (-0.5 * (x - c.mean).powi(2)).exp())
            .sum()
    }

    /// Draws a component by weight, then its Gaussian offset.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.components.last().expect("mixture is never empty");
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.mean + z
    }
}

fn require_normalized(state: &BranchState) -> Result<()> {
    if !state.is_normalized() {
        return invalid(format!(
            "state is not normalized (norm² = {})",
            state.norm_sqr()
        ));
    }
    Ok(())
}

/// Outcome distribution of an X measurement on the probe.
///
/// Requires each basis string to carry a single probe amplitude; otherwise the
/// branches interfere in `x` and the outcome law is not a Gaussian mixture.
pub fn x_distribution(state: &BranchState) -> Result<GaussianMixture> {
    require_normalized(state)?;
    let branches = state.branches();
    for (i, a) in branches.iter().enumerate() {
        if branches[i + 1..].iter().any(|b| b.basis == a.basis) {
            return invalid(format!(
                "basis {} carries several probe amplitudes; outcomes interfere",
                a.basis
            ));
        }
    }
    let tol = state.probe_tolerance();
    let mut components: Vec<MixtureComponent> = Vec::new();
    for b in branches {
        let mean = 2.0 * b.probe.re;
        let weight = b.amplitude.norm_sqr();
        match components.iter_mut().find(|c| (c.mean - mean).abs() <= 2.0 * tol) {
            Some(c) => c.weight += weight,
            None => components.push(MixtureComponent { weight, mean }),
        }
    }
    let total: f64 = components.iter().map(|c| c.weight).sum();
    for c in &mut components {
        c.weight /= total;
    }
    Ok(GaussianMixture { components })
}

/// Draws a homodyne outcome for `state`.
pub fn sample_x<R: Rng + ?Sized>(state: &BranchState, rng: &mut R) -> Result<f64> {
    Ok(x_distribution(state)?.sample(rng))
}

/// `ln |⟨x|β⟩|` and `arg ⟨x|β⟩`.
fn quadrature_overlap(x: f64, beta: Complex64) -> (f64, f64) {
    let ln_mag = -0.25 * (x - 2.0 * beta.re).powi(2) - 0.25 * (2.0 * PI).ln();
    let phase = beta.im * x - beta.im * beta.re;
    (ln_mag, phase)
}

/// Conditions the register on the homodyne outcome `x`.
///
/// Each branch amplitude is multiplied by `⟨x|probe⟩`, the probe mode is
/// consumed and replaced by a fresh one at the reference amplitude, and the
/// result is renormalized. Also returns the posterior weight of every input
/// branch, in input order.
pub fn condition_on_x(state: &BranchState, x: f64) -> Result<(BranchState, Vec<f64>)> {
    require_normalized(state)?;
    if !x.is_finite() {
        return invalid("homodyne outcome must be finite");
    }
    let logs: Vec<(f64, f64)> = state
        .branches()
        .iter()
        .map(|b| {
            let (ln_mag, phase) = quadrature_overlap(x, b.probe);
            (b.amplitude.norm().ln() + ln_mag, phase)
        })
        .collect();
    let max = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(QndError::DegenerateOutcome { x });
    }

    let reference = state.probe_reference();
    let conditioned: Vec<Branch> = state
        .branches()
        .iter()
        .zip(&logs)
        .map(|(b, &(ln_w, phase))| {
            let rel = (ln_w - max).exp();
            let unit = if b.amplitude.norm() > 0.0 {
                b.amplitude / b.amplitude.norm()
            } else {
                Complex64::new(0.0, 0.0)
            };
            Branch {
                basis: b.basis,
                amplitude: unit * Complex64::from_polar(rel, phase),
                probe: reference,
            }
        })
        .collect();
    let raw_weights: Vec<f64> = conditioned.iter().map(|b| b.amplitude.norm_sqr()).collect();
    let out = state.with_branches(conditioned);

    // Unscaled density: e^{2·max} · ‖scaled conditioned state‖².
    let scaled_norm = out.norm_sqr();
    if scaled_norm.is_nan() || scaled_norm <= 0.0 || 2.0 * max + scaled_norm.ln() < DEGENERATE_DENSITY.ln() {
        return Err(QndError::DegenerateOutcome { x });
    }
    let total: f64 = raw_weights.iter().sum();
    let weights = raw_weights.iter().map(|w| w / total).collect();
    Ok((out.normalize()?, weights))
}

fn check_discrimination(alpha: f64, theta: f64) -> Result<()> {
    if !alpha.is_finite() || !theta.is_finite() {
        return invalid("alpha and theta must be finite");
    }
    if alpha <= 0.0 || theta <= 0.0 {
        return Err(QndError::NoDistinguishability { alpha, theta });
    }
    if theta >= PI {
        return invalid(format!("theta must be below pi, got {theta}"));
    }
    Ok(())
}

/// Separation `x_d = 2α(1 - cos θ)` between the unshifted and shifted
/// homodyne means, evaluated as `4α sin²(θ/2)` to keep precision at small θ.
pub fn mean_separation(alpha: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    4.0 * alpha * s * s
}

/// Decision threshold `α(1 + cos θ)`, midway between `2α` and `2α cos θ`.
pub fn threshold(alpha: f64, theta: f64) -> f64 {
    2.0 * alpha - 0.5 * mean_separation(alpha, theta)
}

/// Even when `x` is at or above the threshold, Odd below it.
pub fn classify(x: f64, alpha: f64, theta: f64) -> Result<Parity> {
    check_discrimination(alpha, theta)?;
    Ok(if x >= threshold(alpha, theta) {
        Parity::Even
    } else {
        Parity::Odd
    })
}

/// Probability that the midpoint rule confuses the unshifted probe with the
/// phase-shifted one: `½ erfc(x_d / (2√2))`.
pub fn misclassification_probability(alpha: f64, theta: f64) -> f64 {
    let xd = mean_separation(alpha, theta);
    if xd.is_nan() || xd <= 0.0 {
        return 0.5;
    }
    0.5 * erfc(xd / (2.0 * SQRT_2))
}

/// Feed-forward phase `φ(x) = α sin θ · (x - α cos θ)`, wrapped to `(-π, π]`.
///
/// The odd outcome leaves `e^{iφ}|HV⟩ + e^{-iφ}|VH⟩`; removing `φ` from the
/// `HV` branch and `-φ` from `VH` restores `|HV⟩ + |VH⟩`.
pub fn phi_correction(x: f64, alpha: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    wrap_phase(alpha * s * (x - alpha * c))
}
