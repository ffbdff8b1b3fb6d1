//! Data files shipped with the crate.

use crate::error::{Error, Result};
use crate::graph::{EmbeddingMap, Graph};
use crate::packing::Coloring;

/// `(file name, contents)` for every shipped data file.
pub const FILES: &[(&str, &str)] = &[
    (
        "fig5_s3c4.coloring",
        include_str!("../../../data/fig5_s3c4.coloring"),
    ),
    (
        "fig7_s2k13.coloring",
        include_str!("../../../data/fig7_s2k13.coloring"),
    ),
    (
        "fig10_s2k4e.coloring",
        include_str!("../../../data/fig10_s2k4e.coloring"),
    ),
    (
        "fig11_s3k4e.coloring",
        include_str!("../../../data/fig11_s3k4e.coloring"),
    ),
    (
        "fig12_s4k4e.coloring",
        include_str!("../../../data/fig12_s4k4e.coloring"),
    ),
    (
        "fig13_st1.coloring",
        include_str!("../../../data/fig13_st1.coloring"),
    ),
    (
        "fig14_st2.coloring",
        include_str!("../../../data/fig14_st2.coloring"),
    ),
    ("h.graph", include_str!("../../../data/h.graph")),
    ("hprime.graph", include_str!("../../../data/hprime.graph")),
    (
        "h_into_s3c4.map",
        include_str!("../../../data/h_into_s3c4.map"),
    ),
    (
        "h_into_s3p4.map",
        include_str!("../../../data/h_into_s3p4.map"),
    ),
    (
        "hprime_into_s2c4.map",
        include_str!("../../../data/hprime_into_s2c4.map"),
    ),
    (
        "s23_into_s2k4e.map",
        include_str!("../../../data/s23_into_s2k4e.map"),
    ),
];

pub fn text(name: &str) -> Result<&'static str> {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::MissingData(name.into()))
}

pub fn coloring(name: &str) -> Result<Coloring> {
    Coloring::parse(text(name)?)
}

pub fn graph(name: &str) -> Result<Graph> {
    Graph::parse(text(name)?)
}

pub fn map(name: &str) -> Result<EmbeddingMap> {
    EmbeddingMap::parse(text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_parses() {
        for (name, _) in FILES {
            let ok = if name.ends_with(".coloring") {
                coloring(name).is_ok()
            } else if name.ends_with(".graph") {
                graph(name).is_ok()
            } else {
                map(name).is_ok()
            };
            assert!(ok, "{name}");
        }
        assert!(matches!(text("nope"), Err(Error::MissingData(_))));
    }

    #[test]
    fn sizes() {
        assert_eq!(coloring("fig5_s3c4.coloring").unwrap().len(), 64);
        assert_eq!(coloring("fig12_s4k4e.coloring").unwrap().len(), 250);
        assert_eq!(coloring("fig14_st2.coloring").unwrap().len(), 15);
        assert_eq!(graph("h.graph").unwrap().vertex_count(), 22);
    }
}
