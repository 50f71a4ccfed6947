use dimer_core::dynamics::{
    build_liouvillian_with, propagate_with, solve_steady_state, steady_state_numeric, DecayScale,
    DensityMatrix,
};
use dimer_core::entanglement::wootters_concurrence;
use dimer_core::model::{singlet_amplitudes, AtomPairConfig, Couplings, Geometry};
use dimer_core::{BasisTag, ComplexMatrix, C64};
use proptest::prelude::*;

fn assert_valid_state(rho: &DensityMatrix) -> Result<(), TestCaseError> {
    let m = rho.matrix();
    prop_assert!(m.hermiticity_error() <= 1e-10);
    prop_assert!((m.trace() - C64::new(1.0, 0.0)).norm() <= 1e-10);
    prop_assert!(*rho.eigenvalues().last().unwrap() >= -1e-9);
    Ok(())
}

fn scale() -> impl Strategy<Value = DecayScale> {
    prop_oneof![Just(DecayScale::Unit), Just(DecayScale::Half)]
}

fn random_state(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        let a = ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1));
        let m = &a * &a.dagger();
        let t = m.trace();
        m.scale(t.inv()).hermitize()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_steady_states_are_valid(
        k0r in 0.05f64..3.0, mu in 0.0f64..=1.0, drive in 0.0f64..5.0, delta in -2.0f64..2.0,
        scale in scale(),
    ) {
        let cfg = AtomPairConfig::new(delta, drive, Some(Geometry::new(k0r, mu).unwrap())).unwrap();
        let c = cfg.couplings().unwrap();
        let l = build_liouvillian_with(&cfg, &c, scale);
        let rho = steady_state_numeric(&l).unwrap();
        assert_valid_state(&rho)?;
        prop_assert!(l.apply(rho.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn direct_steady_states_are_valid(
        omega in -20.0f64..20.0, g12 in -0.99f64..0.99, drive in 0.0f64..10.0,
        delta in -3.0f64..3.0, scale in scale(),
    ) {
        let cfg = AtomPairConfig::direct(delta, drive).unwrap();
        let ss = solve_steady_state(&cfg, &Couplings::direct(omega, g12).unwrap(), scale).unwrap();
        assert_valid_state(&ss.state)?;
    }

    #[test]
    fn superoperator_preserves_trace(
        omega in -20.0f64..20.0, g12 in -1.0f64..1.0, drive in 0.0f64..10.0,
        delta in -3.0f64..3.0, scale in scale(),
    ) {
        let cfg = AtomPairConfig::direct(delta, drive).unwrap();
        let l = build_liouvillian_with(&cfg, &Couplings::direct(omega, g12).unwrap(), scale);
        let tr = ComplexMatrix::identity(4).vectorize().dagger();
        prop_assert!((&tr * l.matrix()).max_abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn singlet_population_is_conserved_when_decoupled(
        rho0 in random_state(4), omega in 0.0f64..5.0, drive in 0.0f64..2.0,
        delta in -1.0f64..1.0, scale in scale(),
    ) {
        let cfg = AtomPairConfig::direct(delta, drive).unwrap();
        let l = build_liouvillian_with(&cfg, &Couplings::lamb_dicke(omega), scale);
        let rho0 = DensityMatrix::new(rho0, BasisTag::Computational).unwrap();
        let w0 = rho0.singlet_weight();
        let mut worst: f64 = 0.0;
        propagate_with(&l, &rho0, 50.0, 0.01, |_, rho| {
            worst = worst.max((rho.singlet_weight() - w0).abs());
        })
        .unwrap();
        prop_assert!(worst < 1e-8, "drift {worst}");
    }
}

#[test]
fn singlet_pure_state_stays_put() {
    let cfg = AtomPairConfig::direct(0.4, 1.5).unwrap();
    let l = build_liouvillian_with(&cfg, &Couplings::lamb_dicke(3.0), DecayScale::Unit);
    let a = DensityMatrix::pure(&singlet_amplitudes(), BasisTag::Computational).unwrap();
    let last = propagate_with(&l, &a, 10.0, 0.01, |_, _| {}).unwrap();
    assert!(last.matrix().max_abs_diff(a.matrix()) < 1e-12);
}

#[test]
fn detuning_has_weak_influence_on_concurrence() {
    let drive = 5.0;
    let omega = 9.21 * drive * drive;
    let concurrence = |delta: f64| {
        let cfg = AtomPairConfig::direct(delta, drive).unwrap();
        let ss = solve_steady_state(&cfg, &Couplings::lamb_dicke(omega), DecayScale::default())
            .unwrap();
        wootters_concurrence(&ss.state).unwrap().concurrence
    };
    let values: Vec<f64> = (0..=20).map(|k| concurrence(-1.0 + 0.1 * k as f64)).collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo < 0.05, "concurrence spans [{lo:.4}, {hi:.4}] over Δ ∈ [-1, 1]");
}
