use dimer_core::model::{
    build_effective_hamiltonian, build_hamiltonian, gamma_cross, omega_dipole, AtomPairConfig,
    Couplings, Geometry,
};
use dimer_core::spectral::{dressed_eigensystem, pure_concurrence, triplet_cubic_roots};
use dimer_core::C64;
use proptest::prelude::*;

/// Six-term Maclaurin series of the cross decay rate.
fn gamma_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0; // (2n+1)!
    for n in 1..=6 {
        let m = 2 * n;
        fact *= (m * (m + 1)) as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * m as f64 / fact * x.powi(m - 2);
    }
    -3.0 * sum
}

/// Six-term Laurent series of the dipole shift, for μ̂·r̂ = m.
fn omega_series(x: f64, m: f64) -> f64 {
    let a = 1.0 - 3.0 * m * m;
    let mut near = 0.0;
    let mut far = 0.0;
    let mut fact = 1.0; // (2n)!
    for n in 0..6 {
        if n > 0 {
            fact *= ((2 * n - 1) * 2 * n) as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        near += sign * (1.0 - 2.0 * n as f64) / fact * x.powi(2 * n - 3);
        far += sign / fact * x.powi(2 * n - 1);
    }
    0.75 * (a * near - (1.0 - m * m) * far)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn small_distance_series_agree(x in 1e-5f64..1e-3, m in 0.0f64..=1.0) {
        let g = gamma_cross(x).unwrap();
        prop_assert!(((g - gamma_series(x)) / gamma_series(x)).abs() < 1e-10, "gamma x={x}: {g} vs {}", gamma_series(x));
        let o = omega_dipole(x, m).unwrap();
        let s = omega_series(x, m);
        prop_assert!(((o - s) / s).abs() < 1e-10, "x={x} m={m}: {o} vs {s}");
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian(d in -5.0f64..5.0, e in 0.0f64..5.0, o in -10.0f64..10.0) {
        let h = build_hamiltonian(&AtomPairConfig::direct(d, e).unwrap(), o);
        prop_assert_eq!(h.hermiticity_error(), 0.0);
    }

    #[test]
    fn effective_singlet_decouples(
        d in -5.0f64..5.0, e in 0.0f64..5.0, o in -10.0f64..10.0, g in -1.0f64..1.0,
    ) {
        let cfg = AtomPairConfig::direct(d, e).unwrap();
        let h = build_effective_hamiltonian(&cfg, &Couplings::direct(o, g).unwrap());
        for k in 0..3 {
            prop_assert_eq!(h[(k, 3)], C64::new(0.0, 0.0));
            prop_assert_eq!(h[(3, k)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn cubic_roots_satisfy_vieta(d in -5.0f64..5.0, o in -10.0f64..10.0, e in 0.0f64..5.0) {
        let [a, b, c] = triplet_cubic_roots(d, o, e);
        prop_assert!((a + b + c - o).abs() < 1e-9);
        prop_assert!((a * b + b * c + c * a + d * d + 4.0 * e * e).abs() < 1e-9);
        prop_assert!((a * b * c + d * d * o).abs() < 1e-9);
    }

    #[test]
    fn pure_concurrence_local_phase_invariant(
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        phases in prop::collection::vec(0.0f64..6.3, 4),
    ) {
        let raw: Vec<C64> = amps.iter().map(|&(r, i)| C64::new(r, i)).collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let psi: [C64; 4] = std::array::from_fn(|k| raw[k] / norm);
        let ph = |t: f64| C64::from_polar(1.0, t);
        // index k = 2α + β with α, β ∈ {e, g}
        let rotated: [C64; 4] = std::array::from_fn(|k| {
            psi[k] * ph(phases[k / 2]) * ph(phases[2 + k % 2])
        });
        let c0 = pure_concurrence(&psi).unwrap();
        let c1 = pure_concurrence(&rotated).unwrap();
        prop_assert!((c0 - c1).abs() < 1e-12);
    }
}

#[test]
fn cross_rate_bounded_on_grid() {
    let mut x: f64 = 1e-4;
    while x <= 100.0 {
        assert!(gamma_cross(x).unwrap().abs() <= 1.0, "x={x}");
        x += 1e-3;
    }
}

#[test]
fn lower_dressed_state_loses_entanglement_with_drive() {
    let mut prev = f64::INFINITY;
    let mut e = 0.01;
    while e <= 10.0 + 1e-12 {
        let [_, _, minus] = dressed_eigensystem(1.0, e).unwrap();
        let c = pure_concurrence(&minus.to_computational()).unwrap();
        assert!(c <= prev + 1e-15, "E={e}");
        prev = c;
        e += 0.01;
    }
}

#[test]
fn geometry_rejects_bad_input() {
    assert!(Geometry::new(0.0, 0.0).is_err());
    assert!(Geometry::new(1.0, 1.5).is_err());
    assert!(AtomPairConfig::direct(0.0, -1.0).is_err());
    assert!(Couplings::direct(1.0, 1.2).is_err());
    assert!(Couplings::direct(f64::NAN, 0.5).is_err());
}
