mod support;

use blochldp::deviations::{empirical_rate, rate_tolerance};
use blochldp::lindblad::{
    absorbing_state, gks_to_yz, superop_from_gks, superop_from_yz, Generator,
};
use blochldp::mat2::{
    eig_hermitian2, expm4, min_choi_eigenvalue, pauli_compose, pauli_decompose, BlochState,
};
use blochldp::semigroup::{evolve_bloch_gks, evolve_exact, geometric_grid, subordination_check};
use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pauli_round_trip(u in bloch_vector(), tr in 0.1..3.0f64) {
        let b = BlochState::new(tr, [tr * u[0], tr * u[1], tr * u[2]]);
        let back = pauli_decompose(&pauli_compose(&b)).unwrap();
        prop_assert!((back.trace - b.trace).abs() < 1e-14);
        for i in 0..3 {
            prop_assert!((back.u[i] - b.u[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_reconstruction(rho in density()) {
        let (hi, lo) = eig_hermitian2(&rho).unwrap();
        prop_assert!(hi.eigenvalue >= lo.eigenvalue);
        let rebuilt = hi.eigenvalue * hi.projection + lo.eigenvalue * lo.projection;
        prop_assert!(rebuilt.max_abs_diff(&rho) < 1e-14);
        prop_assert!((hi.projection * lo.projection).max_abs() < 1e-14);
    }

    #[test]
    fn exponential_semigroup(p in gks_params(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let s = superop_from_gks(&p).unwrap();
        let joint = expm4(&s, t1 + t2).unwrap();
        let split = expm4(&s, t1).unwrap() * expm4(&s, t2).unwrap();
        prop_assert!(joint.max_abs_diff(&split) < 1e-10);
    }

    #[test]
    fn evolution_is_completely_positive(p in gks_params(), t in 0.0..10.0f64) {
        let s = expm4(&superop_from_gks(&p).unwrap(), t).unwrap();
        prop_assert!(min_choi_eigenvalue(&s) >= -1e-10);
        prop_assert!(s.trace_preservation_defect() < 1e-12);
    }

    #[test]
    fn generator_annihilates_trace(p in gks_params()) {
        prop_assert!(superop_from_gks(&p).unwrap().trace_annihilation_defect() < 1e-14);
    }

    #[test]
    fn absorbing_state_is_stationary(p in gks_params()) {
        let s = superop_from_gks(&p).unwrap();
        prop_assert!(s.apply(&absorbing_state(&p)).max_abs() < 1e-10);
    }

    #[test]
    fn bloch_route_matches_exponential(p in gks_params(), rho in density(), t in 0.0..15.0f64) {
        let s = superop_from_gks(&p).unwrap();
        let exact = evolve_exact(&s, &rho, t).unwrap();
        let bloch = evolve_bloch_gks(&p, &rho, t).unwrap();
        prop_assert!(exact.max_abs_diff(&bloch) < 1e-9, "case {}", p.case().label());
    }

    #[test]
    fn trace_distance_to_absorbing_state_contracts(
        p in gks_params(),
        rho in density(),
        t in 0.0..5.0f64,
        dt in 0.0..2.0f64,
    ) {
        let inf = pauli_decompose(&absorbing_state(&p)).unwrap().u;
        let dist = |t: f64| {
            let u = pauli_decompose(&evolve_bloch_gks(&p, &rho, t).unwrap()).unwrap().u;
            (0..3).map(|i| (u[i] - inf[i]).powi(2)).sum::<f64>().sqrt()
        };
        prop_assert!(dist(t + dt) <= dist(t) + 1e-12);
        let u = pauli_decompose(&evolve_bloch_gks(&p, &rho, t).unwrap()).unwrap();
        prop_assert!(u.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn forms_agree(p in pure_absorbing_params()) {
        let yz = gks_to_yz(&p).unwrap();
        let a = superop_from_gks(&p).unwrap();
        let b = superop_from_yz(&yz).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-13);
    }

    #[test]
    fn subordination_holds(p in pure_absorbing_params(), rho in density(), t in 0.0..20.0f64) {
        let yz = gks_to_yz(&p).unwrap();
        let r = subordination_check(&yz, &rho, t).unwrap();
        prop_assert!(r.min_eig_difference >= -1e-10);
    }

    #[test]
    fn evolved_state_is_faithful(p in pure_absorbing_params(), u in bloch_vector(), t in 0.01..20.0f64) {
        prop_assume!(u[2] > -0.99);
        let rho = pauli_compose(&BlochState::state(u));
        let evolved = evolve_exact(&superop_from_gks(&p).unwrap(), &rho, t).unwrap();
        prop_assert!(eig_hermitian2(&evolved).unwrap().1.eigenvalue > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn empirical_rate_matches_gap(p in pure_absorbing_params(), u in bloch_vector()) {
        prop_assume!(u[2] >= -0.5);
        let rho = pauli_compose(&BlochState::state(u));
        let t_max = 50.0 / p.eta;
        let grid = geometric_grid(0.1 / p.eta, t_max, 40);
        let r = empirical_rate(&Generator::Gks(p), &rho, &grid).unwrap();
        prop_assert!(r.abs_error <= rate_tolerance(t_max) * p.eta.max(1.0), "{}", r.abs_error);
    }
}

#[test]
fn forms_agree_on_parameter_grid() {
    for xi in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for eta in [0.5, 1.0, 2.0] {
            let p = blochldp::GKSParams::new(xi, eta, 0.0, blochldp::mat2::c(0.0, 0.0)).unwrap();
            let a = superop_from_gks(&p).unwrap();
            let b = superop_from_yz(&gks_to_yz(&p).unwrap()).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-13, "xi = {xi}, eta = {eta}");
        }
    }
}
