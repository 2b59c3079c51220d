mod common;

use ipdecay::channels::{apply_both, apply_local_pair_raw, compose, KrausChannel};
use ipdecay::linalg::eigh;
use ipdecay::linalg::ComplexMatrix;
use ipdecay::sampling::random_state;
use ipdecay::states::{validate, DensityMatrix};
use proptest::prelude::*;

fn channels(gamma: f64, q: f64) -> Vec<KrausChannel> {
    vec![
        KrausChannel::dephasing(gamma).unwrap(),
        KrausChannel::gad(gamma, q).unwrap(),
        KrausChannel::depolarizing(gamma).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), gamma in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        let rho = random_state(&mut common::rng(seed)).unwrap();
        for ch in channels(gamma, q) {
            prop_assert!(ch.completeness_defect() <= 1e-12);
            let out = apply_local_pair_raw(rho.matrix(), &ch, &ch).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(out.hermiticity_defect() < 1e-14);
            let lowest = eigh(&out.hermitian_part(), 1e-9).unwrap().eigenvalues[3];
            prop_assert!(lowest >= -1e-10, "{lowest}");
        }
    }

    #[test]
    fn dephasing_composes_multiplicatively(seed in any::<u64>(), g1 in 0.0..=1.0f64, g2 in 0.0..=1.0f64) {
        let rho = random_state(&mut common::rng(seed)).unwrap();
        let twice = compose(&rho, &KrausChannel::dephasing(g1).unwrap(), &KrausChannel::dephasing(g2).unwrap()).unwrap();
        let once = apply_both(&rho, &KrausChannel::dephasing(1.0 - (1.0 - g1) * (1.0 - g2)).unwrap()).unwrap();
        prop_assert!(twice.matrix().max_abs_diff(once.matrix()) < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_depolarizing_fixed_point(gamma in 0.0..=1.0f64) {
        let mixed = DensityMatrix::maximally_mixed();
        let out = apply_both(&mixed, &KrausChannel::depolarizing(gamma).unwrap()).unwrap();
        prop_assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn full_zero_temperature_damping_reaches_ground_state(seed in any::<u64>()) {
        let rho = random_state(&mut common::rng(seed)).unwrap();
        let out = apply_both(&rho, &KrausChannel::gad(1.0, 1.0).unwrap()).unwrap();
        let ground = ComplexMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]);
        prop_assert!(out.matrix().max_abs_diff(&ground) < 1e-10);
        // coherences with |00> shrink like sqrt(1 - γ)
        let near = apply_both(&rho, &KrausChannel::gad(1.0 - 1e-12, 1.0).unwrap()).unwrap();
        prop_assert!(near.matrix().max_abs_diff(&ground) < 2e-6);
    }
}

#[test]
fn finite_temperature_fixed_point() {
    // diag(q, 1 - q) on each qubit is stationary
    let q: f64 = 2.0 / 3.0;
    let fixed = validate(ComplexMatrix::diagonal(&[
        q * q,
        q * (1.0 - q),
        (1.0 - q) * q,
        (1.0 - q) * (1.0 - q),
    ]))
    .unwrap();
    for gamma in [0.1, 0.5, 0.9] {
        let out = apply_both(&fixed, &KrausChannel::gad(gamma, q).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(fixed.matrix()) < 1e-15);
    }
}
