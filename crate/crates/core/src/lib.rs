//! Packing colorings of Sierpinski-type graphs.
//!
//! The crate builds generalized Sierpinski graphs `S^n_G` and Sierpinski
//! triangle graphs `ST^n_3`, verifies packing colorings, computes packing
//! chromatic numbers exactly, and checks that a block coloring tiles every
//! higher dimension.

pub mod certify;
pub mod data;
pub mod error;
pub mod graph;
pub mod packing;
pub mod search;
pub mod sierpinski;

pub use certify::{
    build_k4e_eleven_coloring, certify_generalized_tiling, certify_triangle_tiling,
    k4e_eleven_from_tile, tile_coloring, CertMode, CertStatus, CertificateReport,
};
pub use error::{Error, Result};
pub use graph::{verify_subgraph_embedding, DistanceMatrix, EmbeddingMap, EmbeddingReport, Graph};
pub use packing::{
    chi_rho, greedy_packing_coloring, is_packing_k_colorable, verify_packing_coloring,
    ColorConstraints, Coloring, Decision, GreedyOrder, SolveResult, SolveStatus, ViolationReport,
};
pub use search::{penalty, search_certified_coloring, MoveWeights, SearchConfig, SearchOutcome};
pub use sierpinski::{
    block_vertices, extreme_vertices, gen_generalized, gen_sierpinski, gen_triangle,
    gen_triangle_recursive, BaseGraph, Family,
};
