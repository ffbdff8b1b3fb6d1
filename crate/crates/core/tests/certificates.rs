use sierpack::{
    build_k4e_eleven_coloring, certify_generalized_tiling, certify_triangle_tiling, data,
    tile_coloring, verify_packing_coloring, BaseGraph, CertMode, CertStatus, CertificateReport,
    Coloring, Family,
};

fn check_sound(
    family: &Family,
    m: usize,
    block: &Coloring,
    report: &CertificateReport,
    upto: usize,
) {
    let top = match report.status {
        CertStatus::Certified => upto,
        CertStatus::Empirical(n) => n,
        CertStatus::Refuted(_) => return,
    };
    for n in m + 1..=top {
        let g = family.graph(n).unwrap();
        let tiled = tile_coloring(family, m, block, n).unwrap();
        assert!(
            verify_packing_coloring(&g, &tiled).unwrap().ok(),
            "dimension {n}"
        );
        assert_eq!(tiled.max_color(), block.max_color());
    }
}

#[test]
fn generalized_blocks_sound() {
    let cases = [
        ("C4", 3, "fig5_s3c4.coloring"),
        ("K13", 2, "fig7_s2k13.coloring"),
        ("K4E", 2, "fig10_s2k4e.coloring"),
        ("K4E", 3, "fig11_s3k4e.coloring"),
    ];
    for (base, m, file) in cases {
        let g = BaseGraph::library(base).unwrap();
        let family = Family::Generalized(g.clone());
        let block = data::coloring(file).unwrap();
        for mode in [CertMode::Refined, CertMode::Conservative] {
            let r = certify_generalized_tiling(&g, m, &block, mode, 2).unwrap();
            check_sound(&family, m, &block, &r, m + 2);
        }
    }
}

#[test]
fn shipped_certificates() {
    let c4 = BaseGraph::library("C4").unwrap();
    let fig5 = data::coloring("fig5_s3c4.coloring").unwrap();
    assert!(
        certify_generalized_tiling(&c4, 3, &fig5, CertMode::Refined, 2)
            .unwrap()
            .is_certified()
    );
    let k13 = BaseGraph::library("K13").unwrap();
    let fig7 = data::coloring("fig7_s2k13.coloring").unwrap();
    assert!(
        certify_generalized_tiling(&k13, 2, &fig7, CertMode::Refined, 2)
            .unwrap()
            .is_certified()
    );
}

#[test]
fn eleven_coloring_sound() {
    let k4e = BaseGraph::library("K4E").unwrap();
    let c = build_k4e_eleven_coloring();
    let r = certify_generalized_tiling(&k4e, 5, &c, CertMode::Refined, 1).unwrap();
    assert!(matches!(
        r.status,
        CertStatus::Certified | CertStatus::Empirical(_)
    ));
    check_sound(&Family::Generalized(k4e), 5, &c, &r, 6);
}

#[test]
fn triangle_blocks() {
    let st1 = data::coloring("fig13_st1.coloring").unwrap();
    let r = certify_triangle_tiling(1, &st1, 2).unwrap();
    check_sound(&Family::Triangle, 1, &st1, &r, 3);
    let st2 = data::coloring("fig14_st2.coloring").unwrap();
    let r = certify_triangle_tiling(2, &st2, 2).unwrap();
    match r.status {
        CertStatus::Refuted(ref x) => {
            assert_eq!(x.dimension, 3);
            assert!(x.distance <= x.color);
        }
        ref s => panic!("{s:?}"),
    }
    assert!(r.to_text().starts_with("status REFUTED"));
}
