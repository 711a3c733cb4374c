mod common;

use proptest::prelude::*;
use teleport_core::densmat::hermitian_eigen;
use teleport_core::spin_models::{
    block_spectrum, build_hamiltonian, critical_point, from_xxz_field, thermal_state, thermal_state_beta,
    thermal_state_dense, CriticalModel, XXZFieldParams,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn block_and_dense_thermal_states_agree(
        p in common::params_strategy(3.0, 3.0),
        kt in 0.05..50.0f64,
    ) {
        let a = thermal_state(&p, kt).unwrap();
        let b = thermal_state_dense(&p, kt).unwrap();
        prop_assert!(a.rho.mat().max_abs_diff(b.rho.mat()) < 1e-10);
        prop_assert!((a.log_partition() - b.log_partition()).abs() < 1e-9 * a.log_partition().abs().max(1.0));
    }

    #[test]
    fn block_spectrum_matches_dense_eigenvalues(p in common::params_strategy(3.0, 3.0)) {
        let dense = hermitian_eigen(&build_hamiltonian(&p)).unwrap().values;
        let blocks: Vec<f64> = block_spectrum(&p).sorted().iter().map(|e| e.energy).collect();
        for (x, y) in dense.iter().zip(&blocks) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn gibbs_weights_follow_energies(p in common::params_strategy(3.0, 3.0), beta in 0.0..20.0f64) {
        let st = thermal_state_beta(&p, beta).unwrap();
        prop_assert!((st.rho.mat().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(st.rho.min_eigenvalue().unwrap() >= -1e-12);
        let spec = block_spectrum(&p).sorted();
        let g = st.rho.overlap(&spec[0].ket());
        for e in &spec[1..] {
            let w = st.rho.overlap(&e.ket());
            prop_assert!((w - g * (-beta * (e.energy - spec[0].energy)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn low_temperature_is_finite(p in common::params_strategy(3.0, 3.0)) {
        let st = thermal_state(&p, 1e-3).unwrap();
        prop_assert!(st.rho.validate().is_ok());
    }
}

#[test]
fn infinite_temperature_is_maximally_mixed() {
    let p = teleport_core::spin_models::HeisenbergParams::new(2.0, -1.0, 0.5, 3.0, -2.0).unwrap();
    let st = thermal_state(&p, 1e6).unwrap();
    for i in 0..4 {
        for k in 0..4 {
            let want = if i == k { 0.25 } else { 0.0 };
            assert!((st.rho.mat()[(i, k)].re - want).abs() < 1e-5);
        }
    }
    assert!(thermal_state(&p, 0.0).is_err());
    assert!(thermal_state(&p, -1.0).is_err());
}

#[test]
fn xxx_crossing_at_h_over_8() {
    // |00⟩ has energy 2J − h, the singlet −6J: they cross at J = h/8.
    for h in [4.0, 8.0, 12.0] {
        let jc = critical_point(CriticalModel::XxxField { field_h: h }).unwrap();
        assert!((jc - h / 8.0).abs() < 1e-9, "h={h}: {jc}");
    }
}

#[test]
fn xxz_crossing_at_zero_anisotropy() {
    // J = 1, h = 4: |00⟩ at 2Δ − 4, the odd-block ground at −2Δ − 4.
    let dc = critical_point(CriticalModel::XxzField {
        exchange_j: 1.0,
        field_h: 4.0,
    })
    .unwrap();
    assert!(dc.abs() < 1e-9);
    // The ground state switches sector across the crossing.
    let below = block_spectrum(&from_xxz_field(XXZFieldParams::new(1.0, -0.1, 4.0).unwrap())).ground();
    let above = block_spectrum(&from_xxz_field(XXZFieldParams::new(1.0, 0.1, 4.0).unwrap())).ground();
    assert_ne!(below.sector, above.sector);
}
