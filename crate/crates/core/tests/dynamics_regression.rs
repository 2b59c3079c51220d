use ipdecay::cli::records_csv;
use ipdecay::dynamics::{
    evaluate, evolve, find_death, find_ip_sudden_change, ip_monotonicity, sweep, DeathPoint,
    Measure, Scenario, ASYMPTOTIC_GUARD,
};
use ipdecay::measures::{concurrence_general, interferometric_power, qfi_directional};
use ipdecay::states::validate;

/// `QFI_x - QFI_z` of the evolved state; its sign tells which axis minimises.
fn axis_gap(sc: Scenario, alpha: f64, gamma: f64) -> f64 {
    let rho = evolve(sc, alpha, gamma).unwrap();
    qfi_directional(&rho, [1.0, 0.0, 0.0]).unwrap()
        - qfi_directional(&rho, [0.0, 0.0, 1.0]).unwrap()
}

fn bisect_gap(sc: Scenario, alpha: f64, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = axis_gap(sc, alpha, lo).signum();
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if axis_gap(sc, alpha, mid).signum() == s_lo {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

// Frozen switch points. The amplitude-damping values are roots of M11 = M33
// from the closed-form entries, found with 40-digit arithmetic.
const SWITCHES: &[(Scenario, f64, &[f64])] = &[
    (Scenario::GadQ1, 0.5, &[0.352201128739]),
    (Scenario::GadQ1, 0.7, &[0.0807623054962, 0.517354741128]),
    (Scenario::GadQ1, 0.9, &[0.264475665173, 0.571322183469]),
    (Scenario::GadQ2of3, 0.5, &[0.72377968441]),
    (Scenario::GadQ2of3, 0.7, &[0.123292103417, 0.790156286957]),
    (Scenario::GadQ2of3, 0.9, &[0.470231644251, 0.805940614839]),
    (Scenario::DephasingPlusGad, 0.7, &[0.141443, 0.375531]),
    (Scenario::DephasingPlusGad, 0.9, &[0.335945, 0.507331]),
    (Scenario::GadQ1, 0.3, &[]),
    (Scenario::Depolarizing, 0.5, &[]),
    (Scenario::DephasingWerner, 0.5, &[]),
];

#[test]
fn ip_branch_switch_snapshots() {
    for &(sc, alpha, expected) in SWITCHES {
        let found = find_ip_sudden_change(sc, alpha, 2_000).unwrap();
        assert_eq!(found.len(), expected.len(), "{sc} {alpha}: {found:?}");
        for (&f, &e) in found.iter().zip(expected) {
            assert!((f - e).abs() < 2e-6, "{sc} {alpha}: {f} vs {e}");
            // independent bracket from the directional Fisher information
            let root = bisect_gap(sc, alpha, f - 1e-3, f + 1e-3);
            assert!((f - root).abs() < 2e-6, "{sc} {alpha}: {f} vs {root}");
        }
    }
}

#[test]
fn ip_is_continuous_across_a_switch() {
    let g = SWITCHES[0].2[0];
    let below = evaluate(Scenario::GadQ1, 0.5, g - 1e-5).unwrap();
    let above = evaluate(Scenario::GadQ1, 0.5, g + 1e-5).unwrap();
    assert_ne!(below.ip_branch, above.ip_branch);
    assert!((below.ip - above.ip).abs() < 1e-4);
}

#[test]
fn dephasing_werner_boundary() {
    for alpha in [0.34, 0.4, 0.6, 0.8, 0.99] {
        let r = find_death(
            Scenario::DephasingWerner,
            alpha,
            Measure::Concurrence,
            1e-10,
            10_000,
        )
        .unwrap();
        let exact = 1.5 - 1.0 / (2.0 * alpha);
        assert!(
            (r.gamma_star.gamma().unwrap() - exact).abs() < 1e-6,
            "{alpha}"
        );
        let ip = find_death(
            Scenario::DephasingWerner,
            alpha,
            Measure::InterferometricPower,
            1e-10,
            10_000,
        )
        .unwrap();
        assert_eq!(ip.gamma_star, DeathPoint::Asymptotic);
    }
}

#[test]
fn zero_temperature_damping_boundary() {
    // Λ1 = (1-γ)[sqrt(α(1-α)) - αγ] vanishes at γ* = sqrt((1-α)/α)
    for alpha in [0.55, 0.7, 0.9] {
        let r = find_death(Scenario::GadQ1, alpha, Measure::Concurrence, 1e-10, 10_000).unwrap();
        let exact = ((1.0 - alpha) / alpha).sqrt();
        assert!(
            (r.gamma_star.gamma().unwrap() - exact).abs() < 1e-6,
            "{alpha}"
        );
    }
    for alpha in [0.1, 0.3, 0.45, 0.5] {
        let r = find_death(Scenario::GadQ1, alpha, Measure::Concurrence, 1e-10, 10_000).unwrap();
        assert_eq!(r.gamma_star, DeathPoint::Asymptotic, "{alpha}");
    }
}

#[test]
fn death_reports_respect_their_invariant() {
    for sc in Scenario::ALL {
        for alpha in [0.2, 0.6] {
            let r = find_death(sc, alpha, Measure::Concurrence, 1e-10, 1_000).unwrap();
            if let DeathPoint::Finite(g) = r.gamma_star {
                for k in 0..50 {
                    let gamma = g + (ASYMPTOTIC_GUARD - g) * k as f64 / 49.0;
                    let c = concurrence_general(&evolve(sc, alpha, gamma).unwrap()).unwrap();
                    assert!(c.value < 1e-10, "{sc} {alpha} {gamma}");
                }
            }
        }
    }
}

#[test]
fn sweep_is_wired_to_the_measures() {
    for sc in Scenario::ALL {
        for rec in sweep(sc, 6, 6).unwrap() {
            let rho = evolve(sc, rec.alpha, rec.gamma).unwrap();
            let again = validate(rho.matrix().clone()).unwrap();
            assert!(again.matrix().max_abs_diff(rho.matrix()) < 1e-15);
            assert_eq!(rec.concurrence, concurrence_general(&rho).unwrap().value);
            let ip = interferometric_power(&rho).unwrap();
            assert_eq!((rec.ip, rec.ip_branch), (ip.value, ip.branch));
            assert!((0.0..=1.0 + 1e-9).contains(&rec.concurrence));
            assert!((0.0..=1.0 + 1e-9).contains(&rec.ip));
        }
    }
}

#[test]
fn ip_monotonicity_is_scenario_dependent() {
    for sc in [Scenario::DephasingWerner, Scenario::Depolarizing] {
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!(
                ip_monotonicity(sc, alpha, 201).unwrap().is_monotone(),
                "{sc} {alpha}"
            );
        }
    }
    // the IP of amplitude-damped strongly unbalanced states rises for a while
    for sc in [
        Scenario::GadQ1,
        Scenario::GadQ2of3,
        Scenario::DephasingPlusGad,
    ] {
        let rep = ip_monotonicity(sc, 0.9, 201).unwrap();
        assert!(!rep.is_monotone(), "{sc}");
        assert!(rep.worst_increase > 1e-4, "{sc}: {}", rep.worst_increase);
    }
}

#[test]
fn csv_snapshots_are_byte_stable() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots");
    for sc in Scenario::ALL {
        let path = dir.join(format!("{}-5x5.csv", sc.name().replace('+', "_")));
        let frozen = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            records_csv(&sweep(sc, 5, 5).unwrap()),
            frozen,
            "{}",
            path.display()
        );
    }
}
