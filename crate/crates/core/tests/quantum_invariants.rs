use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use lambda_qpt::fock::dimension;
use lambda_qpt::quantum::{
    build_hamiltonian, eigensolve_dense, eigensolve_lowest, fidelity, ground_observables, zero_degeneracy,
    zero_degeneracy_formula, GroundSolver, LanczosOptions,
};
use lambda_qpt::{FockBasis, ModelParams};

fn spectrum(n: u32, delta: f64, z: f64, phi: f64) -> Vec<f64> {
    let p = ModelParams::new(n, delta, z, 1.0, phi).unwrap();
    let h = build_hamiltonian(&p, &FockBasis::new(n).unwrap()).unwrap();
    eigensolve_dense(&h).unwrap().energies
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_round_trip(half in 0u32..120, pick in 0.0f64..1.0) {
        let n = 2 * half;
        let basis = FockBasis::new(n).unwrap();
        prop_assert_eq!(basis.len(), dimension(n));
        let i = ((basis.len() as f64 * pick) as usize).min(basis.len() - 1);
        let s = basis.state(i).unwrap();
        prop_assert_eq!(s.atom_number(), n as u64);
        prop_assert_eq!(basis.index_of(&s).unwrap(), i);
    }

    #[test]
    fn hamiltonian_is_hermitian(half in 1u32..10, delta in -1.0f64..1.0, z in 0.0f64..4.0, phi in 0.0f64..6.28) {
        let n = 2 * half;
        let p = ModelParams::new(n, delta, z, 1.0, phi).unwrap();
        let h = build_hamiltonian(&p, &FockBasis::new(n).unwrap()).unwrap().to_dense();
        prop_assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn resonant_spectrum_is_symmetric(half in 1u32..=20, z in 0.05f64..4.0) {
        let e = spectrum(2 * half, 0.0, z, 0.0);
        for (lo, hi) in e.iter().zip(e.iter().rev()) {
            prop_assert!((lo + hi).abs() < 1e-9, "{} vs {}", lo, hi);
        }
    }

    #[test]
    fn spectrum_is_phase_independent(half in 1u32..=10, delta in -0.5f64..0.5, z in 0.0f64..3.0, phi in 0.0f64..6.28) {
        let a = spectrum(2 * half, delta, z, 0.0);
        let b = spectrum(2 * half, delta, z, phi);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn gap_is_positive(half in 1u32..=40, delta in 0.0f64..0.5, z in 0.0f64..4.0) {
        let g = ground_observables(&ModelParams::new(2 * half, delta, z, 1.0, 0.0).unwrap()).unwrap();
        prop_assert!(g.gap > 0.0);
        prop_assert!((0.0..=1.0).contains(&g.atomic_fraction));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(half in 2u32..=12, z in 0.5f64..3.0, alpha in 0.0f64..0.5) {
        let n = 2 * half;
        let v0 = ground_observables(&ModelParams::new(n, 0.0, z, 1.0, 0.0).unwrap()).unwrap().ground_vector;
        let v1 = ground_observables(&ModelParams::new(n, alpha, z, 1.0, 0.0).unwrap()).unwrap().ground_vector;
        let f = fidelity(&v0, &v1).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&v1, &v0).unwrap()).abs() < 1e-15);
        let rotated = &v1 * Complex64::from_polar(1.0, 0.7);
        prop_assert!((f - fidelity(&v0, &rotated).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn two_atom_spectrum_matches_closed_form() {
    for i in 0..50 {
        let z = 0.1 * i as f64;
        let e = spectrum(2, 0.0, z, 0.0);
        let r = (z * z + 1.0f64).sqrt();
        assert_abs_diff_eq!(e[0], -r, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[2], r, epsilon = 1e-12);
    }
}

#[test]
fn zero_level_degeneracy_for_all_small_n() {
    for n in (2..=40).step_by(2) {
        assert_eq!(zero_degeneracy(n, 1.0, 1.0).unwrap(), zero_degeneracy_formula(n), "N = {n}");
        assert_eq!(zero_degeneracy(n, 0.7, 1.3).unwrap(), zero_degeneracy_formula(n), "N = {n}");
    }
}

#[test]
fn lanczos_matches_dense_near_transition() {
    for &(delta, z) in &[(0.0, 1.95), (0.0, 2.05), (0.3, 2.2)] {
        let p = ModelParams::new(100, delta, z, 1.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, &FockBasis::new(100).unwrap()).unwrap();
        let dense = eigensolve_dense(&h).unwrap();
        let lanczos = eigensolve_lowest(&h, 2).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(dense.energies[k], lanczos.energies[k], epsilon = 1e-8);
        }
        let overlap = fidelity(&dense.vector(0).unwrap(), &lanczos.vector(0).unwrap()).unwrap();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-8);
    }
}

#[test]
fn complex_lanczos_matches_dense() {
    let p = ModelParams::new(40, 0.2, 1.7, 1.0, 1.1).unwrap();
    let h = build_hamiltonian(&p, &FockBasis::new(40).unwrap()).unwrap();
    assert!(!h.is_real());
    let dense = eigensolve_dense(&h).unwrap();
    let lanczos = eigensolve_lowest(&h, 3).unwrap();
    for k in 0..3 {
        assert_abs_diff_eq!(dense.energies[k], lanczos.energies[k], epsilon = 1e-8);
    }
}

#[test]
fn warm_start_reproduces_cold_results() {
    let mut warm = GroundSolver::new(300).unwrap().with_warm_start(true);
    let mut cold = GroundSolver::new(300).unwrap().with_options(LanczosOptions { seed: 11, ..Default::default() });
    for i in 0..6 {
        let p = ModelParams::new(300, 0.0, 1.85 + 0.03 * i as f64, 1.0, 0.0).unwrap();
        let (a, b) = (warm.solve(&p).unwrap(), cold.solve(&p).unwrap());
        assert_abs_diff_eq!(a.e0, b.e0, epsilon = 1e-8);
        assert_abs_diff_eq!(a.gap, b.gap, epsilon = 1e-8);
    }
}

#[test]
fn atomic_fraction_approaches_mean_field() {
    let mut previous = f64::INFINITY;
    for n in [20, 50, 100, 200] {
        let g = ground_observables(&ModelParams::new(n, 0.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
        let dev = (g.atomic_fraction - 0.5).abs();
        assert!(dev < previous);
        previous = dev;
    }
    let deep = ground_observables(&ModelParams::new(100, 0.0, 6.0, 1.0, 0.0).unwrap()).unwrap();
    assert!(deep.atomic_fraction < 0.02);
}
