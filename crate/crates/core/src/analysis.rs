//! Error-rate sweeps, the probe-amplitude solver and the heralded
//! single-photon budget.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, QndError, Result};
use crate::homodyne::{mean_separation, misclassification_probability};
use crate::special::{ln_binomial_pmf, log_sum_exp};

/// Largest overhead factor `find_min_c` will consider.
pub const MAX_OVERHEAD: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub theta: f64,
    pub x_d: f64,
    pub p_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub alpha_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// Sorted by `(theta, alpha)` ascending.
    pub rows: Vec<SweepRow>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return invalid(format!("alpha must be finite and >= 0, got {alpha}"));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta.is_finite() && (0.0..std::f64::consts::PI).contains(&theta)) {
        return invalid(format!("theta must lie in [0, pi), got {theta}"));
    }
    Ok(())
}

/// Misclassification probability over the grid product.
pub fn sweep_error(alpha_grid: &[f64], theta_grid: &[f64]) -> Result<SweepTable> {
    if alpha_grid.is_empty() || theta_grid.is_empty() {
        return invalid("sweep grids must be non-empty");
    }
    alpha_grid.iter().try_for_each(|&a| check_alpha(a))?;
    theta_grid.iter().try_for_each(|&t| check_theta(t))?;

    let mut alphas = alpha_grid.to_vec();
    let mut thetas = theta_grid.to_vec();
    alphas.sort_by(f64::total_cmp);
    thetas.sort_by(f64::total_cmp);
    let rows = thetas
        .iter()
        .flat_map(|&theta| {
            alphas.iter().map(move |&alpha| SweepRow {
                alpha,
                theta,
                x_d: mean_separation(alpha, theta),
                p_err: misclassification_probability(alpha, theta),
            })
        })
        .collect();
    Ok(SweepTable {
        alpha_grid: alpha_grid.to_vec(),
        theta_grid: theta_grid.to_vec(),
        rows,
    })
}

/// Smallest `α` with `P_err(α, θ) <= target_error`, by bisection.
///
/// The bracket is returned from the feasible side, so the result always meets
/// the target; the relative bracket width at exit is below 1e-12.
pub fn required_alpha(theta: f64, target_error: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return invalid(format!("theta must lie in (0, pi), got {theta}"));
    }
    if !(target_error > 0.0 && target_error < 0.5) {
        return invalid(format!(
            "target error must lie in (0, 0.5), got {target_error}"
        ));
    }
    let meets = |a: f64| misclassification_probability(a, theta) <= target_error;
    let mut hi = 1.0 / mean_separation(1.0, theta);
    while !meets(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return invalid("target error is below the representable range");
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// Photons required.
    pub n: u64,
    /// Overhead factor; `c·n` generation attempts are made.
    pub c: u64,
    /// Per-attempt heralding probability.
    pub p: f64,
    pub trials: u64,
    /// `P(Binomial(c·n, p) < n)`.
    pub failure_probability: f64,
}

fn check_budget(n: u64, c: u64, p: f64) -> Result<u64> {
    if n == 0 {
        return invalid("at least one photon must be requested");
    }
    if c == 0 {
        return invalid("overhead factor c must be >= 1");
    }
    if !(p > 0.0 && p <= 1.0) {
        return invalid(format!("success probability must lie in (0, 1], got {p}"));
    }
    n.checked_mul(c)
        .ok_or_else(|| QndError::InvalidInput("c·n overflows".into()))
}

/// Terms more than this many nats below the largest one are dropped.
const TAIL_CUTOFF: f64 = 60.0;

/// `ln Σ_{k=lo}^{hi} P(X = k)`, summed outward from the in-range peak of the
/// (log-concave) pmf until terms drop below the cutoff.
fn ln_pmf_range(lo: u64, hi: u64, trials: u64, p: f64) -> f64 {
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    let mode = (((trials as f64 + 1.0) * p).floor() as u64).min(trials);
    let start = mode.clamp(lo, hi);
    let peak = ln_binomial_pmf(start, trials, p);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let mut terms = vec![peak];
    for k in (lo..start).rev() {
        let t = ln_binomial_pmf(k, trials, p);
        if t < peak - TAIL_CUTOFF {
            break;
        }
        terms.push(t);
    }
    for k in start + 1..=hi {
        let t = ln_binomial_pmf(k, trials, p);
        if t < peak - TAIL_CUTOFF {
            break;
        }
        terms.push(t);
    }
    log_sum_exp(&terms)
}

/// `(ln P(X < n), ln P(X >= n))` for `X ~ Binomial(trials, p)`.
pub fn ln_binomial_tails(n: u64, trials: u64, p: f64) -> (f64, f64) {
    let lower = match n.min(trials + 1) {
        0 => f64::NEG_INFINITY,
        m => ln_pmf_range(0, m - 1, trials, p),
    };
    (lower, ln_pmf_range(n, trials, trials, p))
}

/// Probability that `c·n` heralded attempts yield fewer than `n` photons.
pub fn photon_budget(n: u64, c: u64, p: f64) -> Result<BudgetReport> {
    let trials = check_budget(n, c, p)?;
    let (ln_fail, _) = ln_binomial_tails(n, trials, p);
    Ok(BudgetReport {
        n,
        c,
        p,
        trials,
        failure_probability: ln_fail.exp().clamp(0.0, 1.0),
    })
}

/// Smallest integer `c` with `photon_budget(n, c, p)` failure `<= target`.
///
/// Failure is non-increasing in `c`, so galloping then bisecting finds the
/// same `c` as a linear scan from 1.
pub fn find_min_c(n: u64, p: f64, target_failure: f64) -> Result<u64> {
    if !(target_failure > 0.0 && target_failure < 1.0) {
        return invalid(format!(
            "target failure must lie in (0, 1), got {target_failure}"
        ));
    }
    let ok = |c: u64| -> Result<bool> {
        Ok(photon_budget(n, c, p)?.failure_probability <= target_failure)
    };
    if ok(1)? {
        return Ok(1);
    }
    let mut lo = 1;
    let mut hi = 2;
    while !ok(hi)? {
        lo = hi;
        if hi == MAX_OVERHEAD {
            return Err(QndError::Unreachable {
                target: target_failure,
                p,
                max_c: MAX_OVERHEAD,
            });
        }
        hi = (hi * 2).min(MAX_OVERHEAD);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Fraction of `runs` simulated budgets that end with fewer than `n` photons.
pub fn mc_budget<R: Rng + ?Sized>(n: u64, c: u64, p: f64, runs: u64, rng: &mut R) -> Result<f64> {
    if runs == 0 {
        return invalid("runs must be >= 1");
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("success probability must lie in [0, 1], got {p}"));
    }
    let trials = n
        .checked_mul(c)
        .ok_or_else(|| QndError::InvalidInput("c·n overflows".into()))?;
    let successes = Binomial::new(trials, p)
        .map_err(|e| QndError::InvalidInput(format!("binomial sampler: {e}")))?;
    let failures = (0..runs).filter(|_| successes.sample(rng) < n).count();
    Ok(failures as f64 / runs as f64)
}
