//! Special functions shared by the simulator and the analysis code.

use std::f64::consts::PI;

/// Complementary error function (musl's implementation via `libm`).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Quadrature wavefunctions `ψ_k(x)` for `k = 0..=k_max` under `X = a + a†`:
///
/// `ψ_k(x) = (2π)^(-1/4) (2^k k!)^(-1/2) H_k(x/√2) e^(-x²/4)`,
///
/// evaluated with the normalized three-term recurrence
/// `ψ_{k+1} = (x ψ_k - √k ψ_{k-1}) / √(k+1)`.
pub fn hermite_functions(x: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let psi0 = (2.0 * PI).powf(-0.25) * (-0.25 * x * x).exp();
    out.push(psi0);
    if k_max == 0 {
        return out;
    }
    out.push(x * psi0);
    for k in 1..k_max {
        let next = (x * out[k] - (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// Error term of Stirling's formula,
/// `ln n! - (n + 1/2) ln n + n - ln √(2π)`.
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n == 0 {
        return 0.0;
    }
    let x = n as f64;
    if n <= 15 {
        let ln_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
        return ln_fact - (x + 0.5) * x.ln() + x - 0.5 * (2.0 * PI).ln();
    }
    let nn = x * x;
    if n > 500 {
        (S0 - S1 / nn) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / x
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation near
/// `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln P(Binomial(n, p) = k)` by the saddle-point expansion, accurate to a few
/// ulps even for large `n`.
pub fn ln_binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    debug_assert!(k <= n && (0.0..=1.0).contains(&p));
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        return if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
    }
    if k == n {
        return if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
    }
    let kf = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `ln Σ exp(terms)` with the exponentials accumulated pairwise.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let scaled: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
    max + pairwise_sum(&scaled).ln()
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
        let n = ((hi - lo) / step).round() as usize;
        let h = (hi - lo) / n as f64;
        let inner: f64 = (1..n).map(|i| f(lo + i as f64 * h)).sum();
        h * (inner + 0.5 * (f(lo) + f(hi)))
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        // Trapezoid rule is spectrally accurate for these rapidly decaying
        // integrands.
        let lo = -30.0;
        let hi = 30.0;
        let step = 0.01;
        let n = ((hi - lo) / step) as usize;
        let table: Vec<Vec<f64>> = (0..=n)
            .map(|i| hermite_functions(lo + i as f64 * step, 60))
            .collect();
        let mut worst: f64 = 0.0;
        for j in 0..=60 {
            for k in j..=60 {
                let inner: f64 = table[1..n].iter().map(|row| row[j] * row[k]).sum::<f64>()
                    + 0.5 * (table[0][j] * table[0][k] + table[n][j] * table[n][k]);
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((inner * step - target).abs());
            }
        }
        assert!(worst < 1e-8, "worst orthonormality error {worst:e}");
    }

    #[test]
    fn vacuum_wavefunction_is_unit_variance_gaussian() {
        let psi = hermite_functions(0.0, 0)[0];
        assert!((psi * psi - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let var = trapezoid(|x| x * x * hermite_functions(x, 0)[0].powi(2), -20.0, 20.0, 0.01);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ln_pmf_matches_direct_product_for_small_n() {
        // Direct evaluation n!/(k!(n-k)!) p^k q^(n-k) in exact-ish f64.
        for &(n, p) in &[(10u64, 0.3f64), (20, 1.0 / std::f64::consts::E), (7, 0.95)] {
            for k in 0..=n {
                let mut binom = 1.0f64;
                for i in 0..k {
                    binom = binom * (n - i) as f64 / (i + 1) as f64;
                }
                let direct = binom * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
                let got = ln_binomial_pmf(k, n, p).exp();
                assert!(
                    ((got - direct) / direct).abs() < 1e-13,
                    "n={n} k={k}: {got:e} vs {direct:e}"
                );
            }
        }
    }

    #[test]
    fn ln_pmf_normalizes_for_large_n() {
        let n = 3000;
        let p = 1.0 / std::f64::consts::E;
        let terms: Vec<f64> = (0..=n).map(|k| ln_binomial_pmf(k, n, p)).collect();
        assert!(log_sum_exp(&terms).abs() < 1e-13);
    }

    #[test]
    fn pmf_edge_probabilities() {
        assert_eq!(ln_binomial_pmf(0, 5, 0.0), 0.0);
        assert_eq!(ln_binomial_pmf(1, 5, 0.0), f64::NEG_INFINITY);
        assert_eq!(ln_binomial_pmf(5, 5, 1.0), 0.0);
        assert_eq!(ln_binomial_pmf(4, 5, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_phase(0.0), 0.0);
    }
}
