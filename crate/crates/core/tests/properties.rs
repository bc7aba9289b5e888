//! Invariants checked over randomly generated inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use qnd_core::analysis::{mc_budget, photon_budget, required_alpha};
use qnd_core::fock_oracle::{oracle_distance, FockState};
use qnd_core::homodyne::{condition_on_x, mean_separation, misclassification_probability, phi_correction};
use qnd_core::optics_ops::{cross_kerr, phase_shifter, probe_phase, waveplate};
use qnd_core::{BranchState, KerrCoupling, Polarization, QubitUnitary, Waveplate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
enum Op {
    Plate(usize, Waveplate),
    Kerr(usize, Polarization, f64),
    Phase(f64),
}

fn plate() -> impl Strategy<Value = Waveplate> {
    prop_oneof![
        Just(Waveplate::Hadamard),
        Just(Waveplate::PauliX),
        Just(Waveplate::PauliZ),
        (-3.0f64..3.0).prop_map(Waveplate::Rotation),
    ]
}

fn op(n: usize) -> impl Strategy<Value = Op> {
    let letter = prop_oneof![Just(Polarization::H), Just(Polarization::V)];
    prop_oneof![
        (0..n, plate()).prop_map(|(q, w)| Op::Plate(q, w)),
        (0..n, letter, -3.0f64..3.0).prop_map(|(q, l, t)| Op::Kerr(q, l, t)),
        (-3.0f64..3.0).prop_map(Op::Phase),
    ]
}

fn apply(s: &BranchState, op: &Op) -> BranchState {
    match *op {
        Op::Plate(q, w) => s.apply_single_qubit(q, &waveplate(w)).unwrap(),
        Op::Kerr(q, l, t) => cross_kerr(s, &KerrCoupling::new(q, l, t).unwrap()).unwrap(),
        Op::Phase(p) => probe_phase(s, p),
    }
}

fn letters(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('H'), Just('V')], n).prop_map(|v| v.into_iter().collect())
}

// Dense Fock-space versions of the non-Kerr primitives.

fn fock_plate(f: &FockState, q: usize, u: &QubitUnitary) -> FockState {
    let (n, dim) = (f.num_qubits(), f.n_max() + 1);
    let m = u.matrix();
    let mask = 1 << (n - 1 - q);
    let v = f.vector();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for s in 0..(1usize << n) {
        let b = (s & mask != 0) as usize;
        for (row, m_row) in m.iter().enumerate() {
            let t = if row == 1 { s | mask } else { s & !mask };
            for k in 0..dim {
                out[t * dim + k] += m_row[b] * v[s * dim + k];
            }
        }
    }
    FockState::from_vector(n, f.n_max(), out).unwrap()
}

fn fock_phase(f: &FockState, phi: f64) -> FockState {
    let dim = f.n_max() + 1;
    let out = f
        .vector()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, phi * (i % dim) as f64))
        .collect();
    FockState::from_vector(f.num_qubits(), f.n_max(), out).unwrap()
}

fn fock_apply(f: &FockState, op: &Op) -> FockState {
    match *op {
        Op::Plate(q, w) => fock_plate(f, q, &waveplate(w)),
        Op::Kerr(q, l, t) => f.kerr_unitary_apply(q, l, t).unwrap(),
        Op::Phase(p) => fock_phase(f, p),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unitary_words_conserve_norm(
        basis in letters(3),
        re in -1000.0f64..1000.0,
        im in -1000.0f64..1000.0,
        word in proptest::collection::vec(op(3), 10),
    ) {
        let mut s = BranchState::new_register(3, &basis, Complex64::new(re, im)).unwrap();
        let r = s.probe_reference().norm();
        for o in &word {
            s = apply(&s, o);
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "norm² {}", s.norm_sqr());
            for b in s.branches() {
                prop_assert!((b.probe.norm() - r).abs() <= 1e-12 * r.max(1.0));
            }
        }
    }

    #[test]
    fn probe_operations_preserve_branch_structure(
        basis in letters(2),
        alpha in 0.0f64..50.0,
        pre in proptest::collection::vec(op(2), 4),
        q in 0usize..2,
        theta in -3.0f64..3.0,
        phi in -3.0f64..3.0,
    ) {
        let mut s = BranchState::new_register(2, &basis, Complex64::new(alpha, 0.0)).unwrap();
        for o in &pre {
            s = apply(&s, o);
        }
        let kerr = cross_kerr(&s, &KerrCoupling::new(q, Polarization::V, theta).unwrap()).unwrap();
        let shifted = probe_phase(&s, phi);
        for t in [&kerr, &shifted] {
            prop_assert!(t.branches().len() <= s.branches().len());
            let amps = |x: &BranchState| x.branches().iter().map(|b| (b.basis, b.amplitude)).collect::<Vec<_>>();
            if t.branches().len() == s.branches().len() {
                prop_assert_eq!(amps(t), amps(&s));
            }
        }
        // Unless two probes collide, nothing merges.
        if alpha > 1.0 && theta.abs() > 1e-6 {
            prop_assert_eq!(shifted.branches().len(), s.branches().len());
        }
    }

    #[test]
    fn branch_and_fock_pictures_agree(
        basis in letters(2),
        re in -4.0f64..4.0,
        im in -4.0f64..4.0,
        word in proptest::collection::vec(op(2), 1..8),
    ) {
        prop_assume!(Complex64::new(re, im).norm() <= 4.0);
        let mut s = BranchState::new_register(2, &basis, Complex64::new(re, im)).unwrap();
        let mut f = s.to_fock(64).unwrap();
        for o in &word {
            s = apply(&s, o);
            f = fock_apply(&f, o);
        }
        let d = oracle_distance(&s, &f).unwrap();
        prop_assert!(d < 1e-9, "distance {d:e}");
    }

    #[test]
    fn feed_forward_removes_odd_phase(
        alpha in 0.5f64..100.0,
        theta in 0.01f64..1.5,
        offset in -3.0f64..3.0,
    ) {
        let s = odd_state(alpha, theta);
        let x = 2.0 * alpha * theta.cos() + offset;
        let (post, _) = condition_on_x(&s, x).unwrap();
        let fixed = post.apply_single_qubit(0, &phase_shifter(phi_correction(x, alpha, theta))).unwrap();
        prop_assert!(relative_phase(&fixed).abs() < 1e-10);
    }

    #[test]
    fn error_model_is_monotone(
        alpha in 0.1f64..1e4,
        theta in 0.001f64..1.0,
        scale in 1.0f64..10.0,
    ) {
        let p = misclassification_probability(alpha, theta);
        prop_assert!((0.0..=0.5).contains(&p));
        prop_assert!(misclassification_probability(alpha * scale, theta) <= p);
        prop_assert!(mean_separation(alpha, theta) >= 0.0);
    }

    #[test]
    fn required_alpha_meets_target(theta in 0.01f64..1.0, exp in 2.0f64..12.0) {
        let target = 10f64.powf(-exp);
        let a = required_alpha(theta, target).unwrap();
        let p = misclassification_probability(a, theta);
        prop_assert!(p <= target);
        prop_assert!(((p - target) / target).abs() < 1e-4);
    }
}

/// `(|HV⟩ + |VH⟩)/√2` with the probe already coupled through the parity pair.
pub fn odd_state(alpha: f64, theta: f64) -> BranchState {
    let a = Complex64::new(alpha, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let b = |l: &str, t: f64| qnd_core::Branch {
        basis: l.parse().unwrap(),
        amplitude: Complex64::new(r, 0.0),
        probe: a * Complex64::from_polar(1.0, t),
    };
    BranchState::from_branches(2, a, [b("HV", theta), b("VH", -theta)]).unwrap()
}

/// `arg(c_HV) - arg(c_VH)` wrapped to `(-π, π]`.
pub fn relative_phase(s: &BranchState) -> f64 {
    let get = |l: &str| {
        s.branches()
            .iter()
            .find(|b| b.basis.to_string() == l)
            .map(|b| b.amplitude)
            .unwrap()
    };
    (get("HV") * get("VH").conj()).arg()
}

#[test]
fn analytic_budget_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(n, c, p) in &[(10u64, 4u64, 0.4f64), (50, 3, 0.4), (20, 5, 1.0 / std::f64::consts::E), (5, 2, 0.6)] {
        let exact = photon_budget(n, c, p).unwrap().failure_probability;
        let runs = 20_000;
        let mc = mc_budget(n, c, p, runs, &mut rng).unwrap();
        let sigma = (exact * (1.0 - exact) / runs as f64).sqrt().max(1.0 / runs as f64);
        assert!((mc - exact).abs() <= 3.0 * sigma, "({n},{c},{p}): mc {mc} vs {exact}");
    }
}
