//! Cross-route property tests: ladder-algebra reduced states against
//! partial traces of the full Dicke expansion, saturation against the
//! maximally-mixed condition, and distribution-level invariants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use su2fisher::cfi::outcome_distribution;
use su2fisher::fock::{
    check_saturation, dicke_expand, make_state, rho1, rho2, FockState, StateFamily,
};
use su2fisher::su2::{haar_random, matrix_to_euler, EulerAngles, MeasurementBasis};

/// Reduced state of the first `keep` particles from the 2^N expansion.
/// Bit i of a basis index is the spin of particle i (0 = up), so the
/// reduced index packs the kept bits with particle 0 most significant.
fn partial_trace(full: &[Complex64], n: u32, keep: u32) -> DMatrix<Complex64> {
    let kept_dim = 1usize << keep;
    let rest_bits = (n - keep) as usize;
    let rest_dim = 1usize << rest_bits;
    let mut out = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        for c in 0..kept_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..rest_dim {
                // particle i = bit i; kept particle 0 is the high bit of
                // the reduced index
                let mut ridx = 0usize;
                let mut cidx = 0usize;
                for p in 0..keep as usize {
                    let rbit = (r >> (keep as usize - 1 - p)) & 1;
                    let cbit = (c >> (keep as usize - 1 - p)) & 1;
                    ridx |= rbit << p;
                    cidx |= cbit << p;
                }
                ridx |= s << keep;
                cidx |= s << keep;
                acc += full[ridx] * full[cidx].conj();
            }
            out[(r, c)] = acc;
        }
    }
    out
}

fn family_list(max_n: u32) -> Vec<StateFamily> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(StateFamily::Noon { n });
        for m in 0..=n {
            out.push(StateFamily::Fock { m, n });
        }
        if n % 2 == 0 {
            out.push(StateFamily::HollandBurnett { n });
            out.push(StateFamily::YurkeEven { n });
        } else {
            out.push(StateFamily::YurkeOdd { n });
        }
    }
    out
}

fn random_states(seed: u64, count: usize, max_n: u32) -> Vec<FockState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            su2fisher::qfi::random_state(n, &mut rng)
        })
        .collect()
}

#[test]
fn rho1_matches_dicke_partial_trace() {
    let mut states: Vec<FockState> = family_list(6)
        .iter()
        .map(|f| make_state(f).unwrap())
        .collect();
    states.extend(random_states(101, 40, 6));
    for s in &states {
        let full = dicke_expand(s).unwrap();
        let oracle = partial_trace(&full, s.n(), 1);
        let direct = rho1(s);
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (oracle[(i, j)] - direct.matrix()[(i, j)]).norm() < 1e-10,
                    "n={} ({i},{j}): {} vs {}",
                    s.n(),
                    oracle[(i, j)],
                    direct.matrix()[(i, j)]
                );
            }
        }
    }
}

#[test]
fn rho2_matches_dicke_partial_trace() {
    let mut states: Vec<FockState> = family_list(6)
        .iter()
        .filter(|f| f.n() >= 2)
        .map(|f| make_state(f).unwrap())
        .collect();
    states.extend(random_states(103, 40, 6).into_iter().filter(|s| s.n() >= 2));
    for s in &states {
        let full = dicke_expand(s).unwrap();
        let oracle = partial_trace(&full, s.n(), 2);
        let direct = rho2(s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (oracle[(i, j)] - direct.matrix()[(i, j)]).norm() < 1e-10,
                    "n={} ({i},{j}): {} vs {}",
                    s.n(),
                    oracle[(i, j)],
                    direct.matrix()[(i, j)]
                );
            }
        }
    }
}

#[test]
fn saturation_iff_maximally_mixed_rho1() {
    for s in random_states(107, 200, 6) {
        let r = rho1(&s);
        let mut gap: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                gap = gap.max((r.matrix()[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        let sat = check_saturation(&s).saturates;
        assert_eq!(sat, gap <= 1e-10, "gap {gap:.3e} vs saturates {sat}");
    }
    // families where the answer is known
    let hb = make_state(&StateFamily::HollandBurnett { n: 4 }).unwrap();
    assert!(check_saturation(&hb).saturates);
    let yurke = make_state(&StateFamily::YurkeOdd { n: 5 }).unwrap();
    assert!(!check_saturation(&yurke).saturates);
}

#[test]
fn reduced_states_are_physical() {
    for s in random_states(109, 100, 8) {
        let r1 = rho1(&s);
        assert!(r1.eigenvalues().iter().all(|l| *l > -1e-10));
        if s.n() >= 2 {
            let r2 = rho2(&s).unwrap();
            assert!(r2.eigenvalues().iter().all(|l| *l > -1e-10));
            let tr: Complex64 = r2.matrix().trace();
            assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every outcome distribution is a probability distribution, in every
    /// basis, for arbitrary states and Haar-random unitaries.
    #[test]
    fn outcome_distributions_normalized(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=6u32);
        let s = su2fisher::qfi::random_state(n, &mut rng);
        let e = matrix_to_euler(&haar_random(&mut rng)).unwrap();
        for basis in MeasurementBasis::ALL {
            let d = outcome_distribution(&s, &e, basis);
            prop_assert!((d.total() - 1.0).abs() < 1e-10);
            prop_assert!(d.probs().iter().all(|p| *p >= 0.0));
        }
    }

    /// Euler round trip reproduces the matrix exactly and the angles on
    /// the unique-decomposition domain.
    #[test]
    fn euler_roundtrip(psi1 in -3.1f64..3.1, psi2 in 0.01f64..3.13, psi3 in -3.1f64..3.1) {
        prop_assume!(psi2.sin().abs() > 1e-6);
        let e = EulerAngles::new(psi1, psi2, psi3);
        let m = su2fisher::su2::euler_to_matrix(&e);
        let back = matrix_to_euler(&m).unwrap();
        prop_assert!((back.psi1 - psi1).abs() < 1e-10);
        prop_assert!((back.psi2 - psi2).abs() < 1e-10);
        prop_assert!((back.psi3 - psi3).abs() < 1e-10);
    }

    /// Custom state specs always produce normalized states.
    #[test]
    fn custom_states_normalized(parts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..10)) {
        let norm_sq: f64 = parts.iter().map(|(re, im)| re * re + im * im).sum();
        prop_assume!(norm_sq > 1e-6);
        let amps: Vec<Complex64> = parts.iter().map(|(re, im)| Complex64::new(*re, *im)).collect();
        let s = make_state(&StateFamily::Custom { amps }).unwrap();
        let total: f64 = s.amps().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
