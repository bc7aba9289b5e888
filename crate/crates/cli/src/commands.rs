use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use qnd_core::analysis::{find_min_c, photon_budget, sweep_error};
use qnd_core::branch_state::fidelity;
use qnd_core::gates::{cnot_with, parity_gate, ReadoutMode};
use qnd_core::homodyne::misclassification_probability;
use qnd_core::{Branch, BranchState, BudgetReport, GateOutcome, Parity, SweepTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, Spacing};
use crate::error::{CliError, Result};
use crate::report::{CnotRow, ParityDemoRow};

const LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

pub const DEFAULT_CNOT_INPUTS: [&str; 5] = ["HH", "HV", "VH", "VV", "+H"];

fn register(alpha: f64, amplitudes: &[Complex64; 4]) -> Result<BranchState> {
    let a = Complex64::new(alpha, 0.0);
    let branches = LABELS
        .iter()
        .zip(amplitudes)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(l, c)| Branch {
            basis: l.parse().expect("fixed label"),
            amplitude: *c,
            probe: a,
        });
    Ok(BranchState::from_branches(2, a, branches)?.normalize()?)
}

fn rng(config: &RunConfig, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.run_seed(index))
}

pub fn parity_demo(config: &RunConfig) -> Result<Vec<ParityDemoRow>> {
    config.validate()?;
    let one = Complex64::new(0.5, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let input = register(config.alpha, &[one; 4])?;
    let even = register(config.alpha, &[one, zero, zero, one])?;
    let odd = register(config.alpha, &[zero, one, one, zero])?;
    let runs: Vec<(Parity, f64)> = (0..config.runs)
        .into_par_iter()
        .map(|i| {
            let (out, report) = parity_gate(&input, 0, 1, config.theta, &mut rng(config, i))?;
            let parity = match report.outcome {
                GateOutcome::Parity(p) => p,
                other => return Err(CliError::Runtime(format!("unexpected outcome {other:?}"))),
            };
            let target = if parity == Parity::Even { &even } else { &odd };
            Ok((parity, fidelity(&out, target)?))
        })
        .collect::<Result<_>>()?;

    let p_err = misclassification_probability(config.alpha, config.theta);
    Ok([Parity::Even, Parity::Odd]
        .into_iter()
        .map(|parity| {
            let fids: Vec<f64> = runs.iter().filter(|r| r.0 == parity).map(|r| r.1).collect();
            let count = fids.len() as u64;
            ParityDemoRow {
                outcome: if parity == Parity::Even { "even" } else { "odd" }.into(),
                count,
                frequency: count as f64 / config.runs as f64,
                mean_fidelity: (count > 0).then(|| fids.iter().sum::<f64>() / count as f64),
                alpha: config.alpha,
                theta: config.theta,
                p_err,
            }
        })
        .collect())
}

/// Two-character product input over `H`, `V`, `+`, `-`, as dense amplitudes
/// over `HH, HV, VH, VV`.
pub fn parse_input(label: &str) -> Result<[Complex64; 4]> {
    let single = |ch: char| -> Option<[f64; 2]> {
        match ch {
            'H' => Some([1.0, 0.0]),
            'V' => Some([0.0, 1.0]),
            '+' => Some([FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            '-' => Some([FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
            _ => None,
        }
    };
    let chars: Vec<char> = label.chars().collect();
    let bad = || CliError::Usage(format!("malformed input label {label:?}; use two of H, V, +, -"));
    let [a, b] = chars.as_slice() else {
        return Err(bad());
    };
    let (a, b) = (single(*a).ok_or_else(bad)?, single(*b).ok_or_else(bad)?);
    Ok([
        Complex64::new(a[0] * b[0], 0.0),
        Complex64::new(a[0] * b[1], 0.0),
        Complex64::new(a[1] * b[0], 0.0),
        Complex64::new(a[1] * b[1], 0.0),
    ])
}

fn ideal_cnot(v: &[Complex64; 4]) -> [Complex64; 4] {
    [v[0], v[1], v[3], v[2]]
}

pub fn cnot_table(config: &RunConfig, inputs: &[String]) -> Result<Vec<CnotRow>> {
    config.validate()?;
    let parsed: Vec<[Complex64; 4]> = inputs.iter().map(|l| parse_input(l)).collect::<Result<_>>()?;
    let p_err = misclassification_probability(config.alpha, config.theta);
    parsed
        .iter()
        .zip(inputs)
        .enumerate()
        .map(|(k, (amps, label))| {
            let input = register(config.alpha, amps)?;
            let target = register(config.alpha, &ideal_cnot(amps))?;
            let offset = k as u64 * config.runs;
            let fids: Vec<(f64, f64)> = (0..config.runs)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng(config, offset + i);
                    let (out, _) = cnot_with(&input, 0, 1, config.theta, ReadoutMode::Homodyne, &mut r)?;
                    let (post, _) =
                        cnot_with(&input, 0, 1, config.theta, ReadoutMode::PostSelected, &mut r)?;
                    Ok((fidelity(&out, &target)?, fidelity(&post, &target)?))
                })
                .collect::<Result<_>>()?;
            Ok(CnotRow {
                input: label.clone(),
                runs: config.runs,
                mean_fidelity: fids.iter().map(|f| f.0).sum::<f64>() / config.runs as f64,
                min_fidelity: fids.iter().map(|f| f.0).fold(f64::INFINITY, f64::min),
                post_selected_fidelity: fids.iter().map(|f| f.1).fold(f64::INFINITY, f64::min),
                fidelity_bound: 1.0 - 30.0 * p_err,
                p_err,
            })
        })
        .collect()
}

pub fn sweep(config: &RunConfig) -> Result<SweepTable> {
    let alphas = config.alpha_grid.points(Spacing::Geometric)?;
    let thetas = config.theta_grid.points(Spacing::Linear)?;
    Ok(sweep_error(&alphas, &thetas)?)
}

/// Budget at a fixed overhead `c`, or at the smallest `c` meeting `target`.
pub fn budget(n: u64, c: Option<u64>, p: f64, target: Option<f64>) -> Result<BudgetReport> {
    let c = match (c, target) {
        (Some(c), None) => c,
        (None, Some(t)) => find_min_c(n, p, t)?,
        _ => return Err(CliError::Usage("give exactly one of --c and --target".into())),
    };
    Ok(photon_budget(n, c, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_labels() {
        let bell_in = parse_input("+H").unwrap();
        assert!((bell_in[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((bell_in[2].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(parse_input("VH").unwrap()[2].re, 1.0);
        for bad in ["", "H", "HVH", "HX", "hh"] {
            assert!(matches!(parse_input(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn budget_needs_exactly_one_of_c_and_target() {
        assert!(budget(10, None, 0.5, None).is_err());
        assert!(budget(10, Some(2), 0.5, Some(1e-3)).is_err());
        assert_eq!(budget(10, None, 1.0 / std::f64::consts::E, Some(1e-4)).unwrap().c, 7);
        assert_eq!(budget(10, Some(7), 1.0, None).unwrap().failure_probability, 0.0);
    }

    #[test]
    fn parity_demo_is_deterministic() {
        let config = RunConfig {
            runs: 200,
            seed: 42,
            ..RunConfig::default()
        };
        let a = parity_demo(&config).unwrap();
        assert_eq!(a, parity_demo(&config).unwrap());
        assert_eq!(a[0].count + a[1].count, 200);
        let bound = 1.0 - 10.0 * a[0].p_err;
        assert!(a.iter().all(|r| r.mean_fidelity.unwrap() >= bound));
    }
}
