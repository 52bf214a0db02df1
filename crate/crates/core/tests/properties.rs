use nalgebra::DMatrix;
use proptest::prelude::*;

use rabi_polaron::exact_diag::{build_parity_chain, dense_oracle, ground_eigenpair, solve_chain, solve_ground, Parity};
use rabi_polaron::gaussian::{
    fock_amplitudes, h_matrix_element, overlap, quadrature_matrix_element, GaussianComponent, GaussianState, Kernel,
};
use rabi_polaron::model::derive_scales;
use rabi_polaron::variational::{energy, mirrored_energy, trial_state, Branch, VariationalParams};
use rabi_polaron::ModelParams;

fn pair(c1: f64, c2: f64, xi: f64) -> (GaussianState, GaussianState) {
    (GaussianState::single(xi, c1).unwrap(), GaussianState::single(xi, c2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_match_quadrature(
        xi in 0.05f64..3.0, c1 in -10.0f64..10.0, c2 in -10.0f64..10.0, well in -10.0f64..10.0,
    ) {
        let (a, b) = pair(c1, c2, xi);
        let both = GaussianState::new(xi, vec![
            GaussianComponent { weight: 1.0, center: c1 },
            GaussianComponent { weight: 1.0, center: c2 },
        ]).unwrap();
        let mut spec = both.quadrature_spec();
        let reach = spec.hi.max(well.abs() + 8.0 / xi.sqrt());
        spec.lo = -reach;
        spec.hi = reach;
        let o = quadrature_matrix_element(&a, &b, Kernel::Overlap, &spec).unwrap();
        prop_assert!((o - overlap(c1, c2, xi).unwrap()).abs() < 1e-10);
        let h = quadrature_matrix_element(&a, &b, Kernel::Kinetic, &spec).unwrap()
            + quadrature_matrix_element(&a, &b, Kernel::Potential { well_center: well }, &spec).unwrap();
        let closed = h_matrix_element(c1, c2, xi, well).unwrap();
        prop_assert!((h - closed).abs() < 1e-9 * closed.abs().max(1.0), "{} vs {}", h, closed);
    }

    #[test]
    fn gram_matrix_is_positive_semidefinite(
        xi in 0.05f64..3.0, centers in prop::collection::vec(-6.0f64..6.0, 2..7),
    ) {
        let n = centers.len();
        let g = DMatrix::from_fn(n, n, |i, j| overlap(centers[i], centers[j], xi).unwrap());
        let min = g.symmetric_eigenvalues().min();
        prop_assert!(min > -1e-12, "{}", min);
    }

    #[test]
    fn normalisation_is_exact(
        a in 1e-3f64..=1.0, xi in 0.05f64..3.0, za in -2.0f64..2.0, zb in -2.0f64..2.0, gp in 0.0f64..20.0,
    ) {
        let vp = VariationalParams::new(a, xi, za, zb, gp).unwrap();
        prop_assert!(vp.normalization_residual().abs() < 1e-12);
        prop_assert!(vp.beta >= 0.0);
    }

    #[test]
    fn variational_energy_bounds_exact(
        r in 0.5f64..200.0, k in 0.0f64..2.5, a in 0.05f64..=1.0, xi in 0.2f64..2.0, za in -1.5f64..1.5, zb in -1.5f64..1.5,
    ) {
        let m = ModelParams::from_ratio(r, k).unwrap();
        let vp = VariationalParams::new(a, xi, za, zb, m.g_prime).unwrap();
        let ed = solve_ground(&m, 1e-10).unwrap();
        let e = energy(&vp, &m);
        prop_assert!(e >= ed.energy - 1e-9 * ed.energy.abs().max(1.0));
        prop_assert!((e - mirrored_energy(&vp, &m)).abs() < 1e-9 * e.abs().max(1.0));
    }

    #[test]
    fn cat_components_have_definite_parity(
        a in 0.05f64..=1.0, xi in 0.3f64..2.0, za in 0.01f64..1.5, zb in 0.01f64..1.5, gp in 0.5f64..6.0,
    ) {
        let vp = VariationalParams::new(a, xi, za, zb, gp).unwrap();
        let even = trial_state(&vp, Branch::Even);
        let n_max = even.suggested_n_max();
        let e = fock_amplitudes(&even, n_max);
        let o = fock_amplitudes(&trial_state(&vp, Branch::Odd), n_max);
        let leak_e: f64 = e.amplitudes.iter().skip(1).step_by(2).map(|v| v * v).sum();
        let leak_o: f64 = o.amplitudes.iter().step_by(2).map(|v| v * v).sum();
        prop_assert!(leak_e <= 1e-10 && leak_o <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chain_and_dense_agree(delta in 0.1f64..50.0, g in 0.0f64..10.0) {
        let m = derive_scales(delta, g).unwrap();
        let dense = dense_oracle(&m, 120).unwrap();
        let mut chain = [Parity::Even, Parity::Odd]
            .map(|p| ground_eigenpair(&build_parity_chain(&m, p, 120).unwrap(), 1e-12).unwrap().energy);
        chain.sort_by(f64::total_cmp);
        let scale = dense[0].abs().max(1.0);
        prop_assert!((chain[0] - dense[0]).abs() < 1e-10 * scale);
        prop_assert!((chain[1] - dense[1]).abs() < 1e-10 * scale);
    }

    #[test]
    fn truncation_never_raises_energy(delta in 0.1f64..50.0, g in 0.0f64..4.0, n in 8usize..60) {
        let m = derive_scales(delta, g).unwrap();
        let small = solve_chain(&m, Parity::Even, n).unwrap().energy;
        let large = solve_chain(&m, Parity::Even, n + 7).unwrap().energy;
        prop_assert!(large <= small + 1e-11 * small.abs().max(1.0));
    }

    #[test]
    fn exact_populations_sum_to_one(r in 0.5f64..500.0, k in 0.0f64..2.5) {
        let ed = solve_ground(&ModelParams::from_ratio(r, k).unwrap(), 1e-10).unwrap();
        let o = &ed.observables;
        prop_assert!((o.p_up + o.p_down - 1.0).abs() < 1e-12);
        prop_assert!((o.fock.total() - 1.0).abs() < 1e-10);
        prop_assert!(o.entropy >= 0.0 && o.entropy <= std::f64::consts::LN_2);
        prop_assert!(ed.tail_mass < 1e-8);
    }
}
