mod common;

use std::time::Duration;

use sierpack::{
    chi_rho, is_packing_k_colorable, verify_packing_coloring, ColorConstraints, Decision,
    SolveStatus,
};

#[test]
fn chi_rho_matches_backtracking() {
    for seed in 0..100u64 {
        let n = 2 + (seed % 8) as usize;
        let p = [0.1, 0.25, 0.5][(seed % 3) as usize];
        let g = common::random_connected(n, p, seed);
        let r = chi_rho(&g, Duration::from_secs(30)).unwrap();
        assert_eq!(r.status, SolveStatus::Exact, "seed {seed}");
        assert_eq!(r.upper, common::brute_chi(&g), "seed {seed}");
        let w = r.witness.unwrap();
        assert!(verify_packing_coloring(&g, &w).unwrap().ok());
        assert_eq!(w.max_color(), r.upper);
    }
}

#[test]
fn decision_brackets_optimum() {
    for seed in 200..230u64 {
        let g = common::random_connected(7, 0.3, seed);
        let chi = common::brute_chi(&g);
        let t = Duration::from_secs(30);
        let none = ColorConstraints::none();
        assert_eq!(
            is_packing_k_colorable(&g, chi - 1, &none, t).unwrap(),
            Decision::Unsat
        );
        assert!(matches!(
            is_packing_k_colorable(&g, chi, &none, t).unwrap(),
            Decision::Sat(_)
        ));
    }
}
