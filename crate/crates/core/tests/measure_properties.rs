mod common;

use common::{random_unitary, rng};
use ipdecay::dynamics::{evolve, unit_grid, Scenario};
use ipdecay::linalg::{eigh, kron, matmul, paulis, ComplexMatrix, SpectralDecomposition};
use ipdecay::measures::{
    build_m_matrix, concurrence_general, concurrence_x, interferometric_power, ip_sphere_oracle,
    m_matrix_from_spectrum, qfi_directional,
};
use ipdecay::sampling::{
    apply_local_unitary, random_direction, random_pure, random_state, random_su2, x_projection,
};
use ipdecay::states::{make_schmidt_pure, validate, DensityMatrix};
use proptest::prelude::*;

/// Wootters λ_i as square roots of the spectrum of sqrt(ρ) ρ~ sqrt(ρ),
/// with ρ~ = (σy⊗σy) ρ* (σy⊗σy).
fn concurrence_via_sqrt(rho: &DensityMatrix) -> f64 {
    let s = eigh(rho.matrix(), 1e-10).unwrap();
    let root = ComplexMatrix::from_fn(4, 4, |r, c| {
        (0..4)
            .map(|k| {
                let v = s.eigenvectors[(r, k)] * s.eigenvectors[(c, k)].conj();
                v * s.eigenvalues[k].max(0.0).sqrt()
            })
            .sum()
    });
    let yy = kron(&paulis()[1], &paulis()[1]);
    let tilde = matmul(&matmul(&yy, &rho.matrix().conj()).unwrap(), &yy).unwrap();
    let h = matmul(&matmul(&root, &tilde).unwrap(), &root)
        .unwrap()
        .hermitian_part();
    let l: Vec<f64> = eigh(&h, 1e-10)
        .unwrap()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn swap(rho: &DensityMatrix) -> DensityMatrix {
    let perm = [0, 2, 1, 3];
    validate(ComplexMatrix::from_fn(4, 4, |r, c| {
        rho.get(perm[r], perm[c])
    }))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn measures_are_bounded(seed in any::<u64>()) {
        let rho = random_state(&mut rng(seed)).unwrap();
        let c = concurrence_general(&rho).unwrap().value;
        let ip = interferometric_power(&rho).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-9).contains(&c));
        prop_assert!((0.0..=1.0 + 1e-9).contains(&ip));
    }

    #[test]
    fn concurrence_matches_square_root_route(seed in any::<u64>()) {
        let rho = random_state(&mut rng(seed)).unwrap();
        let c = concurrence_general(&rho).unwrap().value;
        prop_assert!((c - concurrence_via_sqrt(&rho)).abs() < 1e-7, "{c}");
    }

    #[test]
    fn ip_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random_state(&mut g).unwrap();
        let (ua, ub) = (random_su2(&mut g), random_su2(&mut g));
        let moved = apply_local_unitary(&rho, &ua, &ub).unwrap();
        let d = interferometric_power(&moved).unwrap().value - interferometric_power(&rho).unwrap().value;
        prop_assert!(d.abs() < 1e-8);
    }

    #[test]
    fn x_formula_agrees_on_x_states(seed in any::<u64>()) {
        let x = x_projection(&random_state(&mut rng(seed)).unwrap()).unwrap();
        let d = concurrence_x(&x).unwrap().value - concurrence_general(&x).unwrap().value;
        prop_assert!(d.abs() < 1e-9);
    }

    #[test]
    fn quadratic_form_is_directional_qfi(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random_state(&mut g).unwrap();
        let m = build_m_matrix(&rho).unwrap();
        prop_assert!(m.symmetry_defect() == 0.0);
        for _ in 0..20 {
            let n = random_direction(&mut g);
            prop_assert!((m.quadratic_form(n) - qfi_directional(&rho, n).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn sphere_oracle_bounds_ip_from_above(seed in any::<u64>()) {
        let rho = random_state(&mut rng(seed)).unwrap();
        let ip = interferometric_power(&rho).unwrap().raw;
        prop_assert!(ip_sphere_oracle(&rho, 400).unwrap() >= ip - 1e-12);
    }

    #[test]
    fn degenerate_eigenbasis_choice_is_irrelevant(seed in any::<u64>(), q in 0.0..0.3f64) {
        // spectrum (1 - 3q, q, q, q) with a random eigenbasis
        let mut g = rng(seed);
        let u = random_unitary(&mut g, 4);
        let spectrum = SpectralDecomposition { eigenvalues: vec![1.0 - 3.0 * q, q, q, q], eigenvectors: u.clone() };
        let rho = validate(spectrum.reconstruct()).unwrap();
        let v = random_unitary(&mut g, 3);
        let rotated = ComplexMatrix::from_fn(4, 4, |r, c| {
            if c == 0 { u[(r, 0)] } else { (1..4).map(|k| u[(r, k)] * v[(k - 1, c - 1)]).sum() }
        });
        let other = SpectralDecomposition { eigenvalues: spectrum.eigenvalues.clone(), eigenvectors: rotated };
        prop_assert!(other.reconstruct().max_abs_diff(rho.matrix()) < 1e-12);
        let d = m_matrix_from_spectrum(&spectrum).max_abs_diff(&m_matrix_from_spectrum(&other));
        prop_assert!(d < 1e-9, "{d}");
        let from_state = build_m_matrix(&rho).unwrap();
        prop_assert!(from_state.max_abs_diff(&m_matrix_from_spectrum(&spectrum)) < 1e-9);
    }

    #[test]
    fn pure_state_closed_forms(seed in any::<u64>()) {
        let psi = random_pure(&mut rng(seed));
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let c = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
        prop_assert!((concurrence_general(&rho).unwrap().value - c).abs() < 1e-9);
        // IP of a pure state is 1 - |r_A|^2 with r_A the reduced Bloch vector
        let r: Vec<f64> = paulis().iter().map(|s| {
            let op = kron(s, &ComplexMatrix::identity(2));
            matmul(&op, rho.matrix()).unwrap().trace().re
        }).collect();
        let expected = 1.0 - r.iter().map(|x| x * x).sum::<f64>();
        let ip = interferometric_power(&rho).unwrap().value;
        prop_assert!((ip - expected).abs() < 1e-9, "{ip} vs {expected}");
        prop_assert!((interferometric_power(&swap(&rho)).unwrap().value - ip).abs() < 1e-9);
    }
}

#[test]
fn schmidt_ip_profile() {
    for alpha in unit_grid(41) {
        let ip = interferometric_power(&make_schmidt_pure(alpha).unwrap())
            .unwrap()
            .value;
        let mirror = interferometric_power(&make_schmidt_pure(1.0 - alpha).unwrap())
            .unwrap()
            .value;
        assert!(
            (ip - 4.0 * alpha * (1.0 - alpha)).abs() < 1e-12,
            "{alpha}: {ip}"
        );
        assert!((ip - mirror).abs() < 1e-12);
    }
    assert!(
        (interferometric_power(&make_schmidt_pure(0.5).unwrap())
            .unwrap()
            .value
            - 1.0)
            .abs()
            < 1e-14
    );
}

#[test]
fn x_formula_agrees_on_scenario_states() {
    for sc in Scenario::ALL {
        for &a in &unit_grid(11) {
            for &g in &unit_grid(11) {
                let rho = evolve(sc, a, g).unwrap();
                let d =
                    concurrence_x(&rho).unwrap().value - concurrence_general(&rho).unwrap().value;
                assert!(d.abs() < 1e-9, "{sc} {a} {g}: {d}");
            }
        }
    }
}

#[test]
fn m_is_diagonal_for_x_states() {
    let rho = evolve(Scenario::GadQ1, 0.3, 0.4).unwrap();
    let m = build_m_matrix(&rho).unwrap();
    assert!(m.branch_values.is_some());
    assert_eq!(m.m[0][1], 0.0);
    assert_eq!(m.m[1][2], 0.0);
}
