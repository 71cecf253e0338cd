use lambda_qpt::analysis::{fidelity_sweep, gap_minima, pseudo_critical_point};
use lambda_qpt::meanfield::uniform_grid;

#[test]
fn pseudo_critical_points_approach_transition() {
    let minima = gap_minima(&[50, 100, 200, 400, 800], 0.0, 1.0, (1.5, 2.1), 2.1).unwrap();
    for w in minima.windows(2) {
        assert!(w[1].z_n >= w[0].z_n, "{:?}", w);
        assert!(w[1].gap_min <= w[0].gap_min, "{:?}", w);
    }
    assert!(minima.iter().all(|m| m.z_n < 2.0));
}

#[test]
fn detuning_offsets_pseudo_critical_point() {
    for n in [60, 120] {
        let plain = pseudo_critical_point(n, 0.0, 1.0, (1.4, 2.2)).unwrap();
        let shifted = pseudo_critical_point(n, 0.2, 1.0, (1.6, 2.4)).unwrap();
        assert!(shifted.z_n > plain.z_n);
        assert!(shifted.z_n < 2.2);
    }
}

#[test]
fn fidelity_dip_deepens_with_detuning() {
    let grid = uniform_grid(1.0, 3.0, 201);
    let mut last = 1.0;
    for alpha in [0.1, 0.2, 0.3, 0.4] {
        let s = fidelity_sweep(60, alpha, &grid, 1.0).unwrap();
        assert_eq!(s.local_minima, 1, "alpha = {alpha}");
        assert!(s.f_min < last);
        last = s.f_min;
    }
}
