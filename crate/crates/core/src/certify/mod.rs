//! Certificates that a block coloring tiles into a packing coloring of every
//! higher dimension, and lower-bound sequences for `S^n_k`.

mod bounds;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::data;
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};
use crate::packing::{verify_packing_coloring, Coloring};
use crate::sierpinski::{
    gen_generalized, gen_triangle, repeat_digit, triangle_canonical, word_of, BaseGraph, Family,
};

pub use bounds::{
    lower_bound_closed_form, lower_bound_sequence, monotonicity_check, BoundSequence, Recurrence,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CertMode {
    Conservative,
    #[default]
    Refined,
}

impl fmt::Display for CertMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertMode::Conservative => "conservative",
            CertMode::Refined => "refined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub dimension: usize,
    pub color: u32,
    pub u: String,
    pub v: String,
    pub distance: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertStatus {
    /// Valid for every dimension at least the block dimension.
    Certified,
    Refuted(Refutation),
    /// Structural conditions failed, tilings verified up to this dimension.
    Empirical(usize),
}

/// Smallest slack `distance - color` of each condition for one color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMargins {
    pub color: u32,
    pub conditions: Vec<(&'static str, Option<i64>)>,
}

impl ColorMargins {
    pub fn min_margin(&self) -> Option<i64> {
        self.conditions.iter().filter_map(|&(_, m)| m).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub status: CertStatus,
    pub margins: Vec<ColorMargins>,
    pub mode: String,
    /// Whether the per-color conditions (and their preconditions) all hold.
    pub structural: bool,
}

impl CertificateReport {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    pub fn status_line(&self) -> String {
        match &self.status {
            CertStatus::Certified => "CERTIFIED".to_string(),
            CertStatus::Empirical(n) => format!("EMPIRICAL {n}"),
            CertStatus::Refuted(r) => format!(
                "REFUTED dimension {} color {} {} {} distance {}",
                r.dimension, r.color, r.u, r.v, r.distance
            ),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("status {}\nmode {}\n", self.status_line(), self.mode);
        for m in &self.margins {
            match m.min_margin() {
                Some(x) => {
                    let _ = writeln!(out, "color {} margin {x}", m.color);
                }
                None => {
                    let _ = writeln!(out, "color {} margin none", m.color);
                }
            }
        }
        out
    }
}

/// Lower-bound metric on positions of a block, valid across all tiled dimensions.
///
/// Two distinct positions with color `i` are safe when `min(within, cross) > i`;
/// a position with color `i` is safe against its own copies when `copies > i`.
pub(crate) struct BlockMetric {
    pub graph: Graph,
    pub within: DistanceMatrix,
    cross: Vec<u16>,
    pub copies: Vec<u16>,
    /// Whether the preconditions behind `cross` hold for this block.
    pub sound: bool,
    pub names: [&'static str; 3],
}

impl BlockMetric {
    pub fn len(&self) -> usize {
        self.within.len()
    }

    pub fn cross(&self, a: usize, b: usize) -> u16 {
        self.cross[a * self.len() + b]
    }

    pub fn pair(&self, a: usize, b: usize) -> u16 {
        self.within.get(a, b).min(self.cross(a, b))
    }

    pub fn generalized(g: &BaseGraph, m: usize, mode: CertMode) -> Result<Self> {
        let graph = gen_generalized(m, g)?;
        let within = graph.all_pairs_distances()?;
        let n = graph.vertex_count();
        let k = g.k();
        let ext: Vec<usize> = (0..k)
            .filter(|&x| g.degree(x) > 0)
            .map(|x| graph.index_of(&repeat_digit(x, m)).expect("extreme exists"))
            .collect();
        let mut d_min = u16::MAX;
        let mut d_max = 0;
        for (i, &a) in ext.iter().enumerate() {
            for &b in &ext[i + 1..] {
                d_min = d_min.min(within.get(a, b));
                d_max = d_max.max(within.get(a, b));
            }
        }
        // a detour out of a block and back crosses three links and two other blocks
        let sound = d_max as u32 <= 3 + 2 * d_min as u32;
        let digits: Vec<usize> = (0..k).filter(|&x| g.degree(x) > 0).collect();
        let mut cross = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let value = match mode {
                    CertMode::Conservative => {
                        let da = ext.iter().map(|&e| within.get(a, e)).min().unwrap_or(0);
                        let db = ext.iter().map(|&e| within.get(b, e)).min().unwrap_or(0);
                        da as u32 + 1 + db as u32
                    }
                    CertMode::Refined => {
                        let mut best = u32::MAX;
                        for (xi, &x) in digits.iter().enumerate() {
                            for (yi, &y) in digits.iter().enumerate() {
                                let link = if g.has_edge(x, y) {
                                    1
                                } else {
                                    2 + d_min as u32
                                };
                                let v = within.get(a, ext[xi]) as u32
                                    + link
                                    + within.get(b, ext[yi]) as u32;
                                best = best.min(v);
                            }
                        }
                        best
                    }
                };
                cross[a * n + b] = value.min(u16::MAX as u32) as u16;
            }
        }
        let copies = (0..n).map(|a| cross[a * n + a]).collect();
        Ok(Self {
            graph,
            within,
            cross,
            copies,
            sound,
            names: ["within", "cross", "copies"],
        })
    }

    pub fn triangle(m: usize) -> Result<Self> {
        let graph = gen_triangle(m)?;
        let within = graph.all_pairs_distances()?;
        let n = graph.vertex_count();
        let corners: Vec<usize> = (0..3)
            .map(|i| {
                graph
                    .index_of(&repeat_digit(i, m + 1))
                    .expect("corner exists")
            })
            .collect();
        let side = 1u16 << m;
        let reach: Vec<u16> = (0..n)
            .map(|a| {
                if corners.contains(&a) {
                    side
                } else {
                    corners
                        .iter()
                        .map(|&e| within.get(a, e))
                        .min()
                        .expect("three corners")
                }
            })
            .collect();
        let mut cross = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                cross[a * n + b] = reach[a] + reach[b];
            }
        }
        let copies = (0..n)
            .map(|a| {
                let d: Vec<u16> = corners.iter().map(|&e| within.get(a, e)).collect();
                (d[0] + d[1]).min(d[0] + d[2]).min(d[1] + d[2])
            })
            .collect();
        Ok(Self {
            graph,
            within,
            cross,
            copies,
            sound: true,
            names: ["within", "boundary", "corners"],
        })
    }

    /// Per-color slack of the three conditions under `colors` (0 = uncolored).
    pub fn margins(&self, colors: &[u32]) -> Vec<ColorMargins> {
        let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            if c > 0 {
                classes.entry(c).or_default().push(v);
            }
        }
        classes
            .into_iter()
            .map(|(c, members)| {
                let ci = c as i64;
                let mut within: Option<i64> = None;
                let mut cross: Option<i64> = None;
                for (i, &a) in members.iter().enumerate() {
                    for &b in &members[i + 1..] {
                        let w = self.within.get(a, b) as i64 - ci;
                        let x = self.cross(a, b) as i64 - ci;
                        within = Some(within.map_or(w, |m| m.min(w)));
                        cross = Some(cross.map_or(x, |m| m.min(x)));
                    }
                }
                let copies = members.iter().map(|&a| self.copies[a] as i64 - ci).min();
                ColorMargins {
                    color: c,
                    conditions: vec![
                        (self.names[0], within),
                        (self.names[1], cross),
                        (self.names[2], copies),
                    ],
                }
            })
            .collect()
    }
}

fn validate_block(g: &Graph, block: &Coloring) -> Result<Vec<u32>> {
    let report = verify_packing_coloring(g, block)
        .map_err(|e| Error::InvalidBlockColoring(e.to_string()))?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidBlockColoring(format!(
            "{} and {} share color {} at distance {}",
            v.u, v.v, v.color, v.distance
        )));
    }
    if let Some(u) = report.uncolored.first() {
        return Err(Error::InvalidBlockColoring(format!("{u} is uncolored")));
    }
    block.to_indexed(g)
}

fn corner_colors(m: usize, block: &Coloring) -> Result<u32> {
    let cs: Vec<u32> = (0..3)
        .map(|i| block.get(&repeat_digit(i, m + 1)).unwrap_or(0))
        .collect();
    if cs[0] != cs[1] || cs[1] != cs[2] {
        return Err(Error::CornerColorMismatch(cs));
    }
    Ok(cs[0])
}

/// Copies `block` into every dimension-`m` block of the dimension-`n` graph.
pub fn tile_coloring(family: &Family, m: usize, block: &Coloring, n: usize) -> Result<Coloring> {
    if n < m {
        return Err(Error::DimensionOutOfRange {
            n,
            min: m,
            max: usize::MAX,
        });
    }
    let block_graph = family.graph(m)?;
    if let Family::Triangle = family {
        corner_colors(m, block)?;
    }
    let local = validate_block(&block_graph, block)?;
    let mut out = Coloring::new();
    match family {
        Family::Generalized(g) => {
            let k = g.k();
            let size = k.pow(m as u32);
            let total = k
                .checked_pow(n as u32)
                .filter(|&t| t <= crate::sierpinski::MAX_VERTICES)
                .ok_or(Error::DimensionOutOfRange { n, min: m, max: 12 })?;
            for v in 0..total {
                out.insert(word_of(v, n, k), local[v % size]);
            }
        }
        Family::Triangle => {
            if n > crate::sierpinski::MAX_TRIANGLE_DIM {
                return Err(Error::DimensionOutOfRange {
                    n,
                    min: m,
                    max: crate::sierpinski::MAX_TRIANGLE_DIM,
                });
            }
            for v in 0..3usize.pow(n as u32 + 1) {
                let w = word_of(v, n + 1, 3);
                let key = triangle_canonical(&w);
                let tail = triangle_canonical(&w[n - m..]);
                let c = block.get(&tail).expect("block is total");
                if let Some(prev) = out.get(&key) {
                    debug_assert_eq!(prev, c);
                    continue;
                }
                out.insert(key, c);
            }
        }
    }
    Ok(out)
}

fn finish(
    family: &Family,
    m: usize,
    block: &Coloring,
    depth: usize,
    margins: Vec<ColorMargins>,
    structural: bool,
    mode: String,
) -> Result<CertificateReport> {
    for d in m + 1..=m + depth {
        let g = family.graph(d)?;
        let tiled = tile_coloring(family, m, block, d)?;
        let report = verify_packing_coloring(&g, &tiled)?;
        if let Some(v) = report.violations.first() {
            return Ok(CertificateReport {
                status: CertStatus::Refuted(Refutation {
                    dimension: d,
                    color: v.color,
                    u: v.u.clone(),
                    v: v.v.clone(),
                    distance: v.distance,
                }),
                margins,
                mode,
                structural,
            });
        }
    }
    let status = if structural {
        CertStatus::Certified
    } else {
        CertStatus::Empirical(m + depth)
    };
    Ok(CertificateReport {
        status,
        margins,
        mode,
        structural,
    })
}

fn all_positive(margins: &[ColorMargins]) -> bool {
    margins
        .iter()
        .all(|m| m.conditions.iter().all(|&(_, x)| x.is_none_or(|x| x >= 1)))
}

/// Certificate for a block coloring of `S^m_G` tiled into `S^n_G`, `n >= m`.
pub fn certify_generalized_tiling(
    g: &BaseGraph,
    m: usize,
    block: &Coloring,
    mode: CertMode,
    empirical_depth: usize,
) -> Result<CertificateReport> {
    let metric = BlockMetric::generalized(g, m, mode)?;
    let colors = validate_block(&metric.graph, block)?;
    let margins = metric.margins(&colors);
    let structural = metric.sound && all_positive(&margins);
    let family = Family::Generalized(g.clone());
    finish(
        &family,
        m,
        block,
        empirical_depth,
        margins,
        structural,
        mode.to_string(),
    )
}

/// Certificate for a block coloring of `ST^m_3` tiled into `ST^n_3`, `n >= m`.
pub fn certify_triangle_tiling(
    m: usize,
    block: &Coloring,
    empirical_depth: usize,
) -> Result<CertificateReport> {
    corner_colors(m, block)?;
    let metric = BlockMetric::triangle(m)?;
    let colors = validate_block(&metric.graph, block)?;
    let margins = metric.margins(&colors);
    let structural = all_positive(&margins);
    finish(
        &Family::Triangle,
        m,
        block,
        empirical_depth,
        margins,
        structural,
        "triangle".into(),
    )
}

/// The 11-color packing coloring of `S^5` over `K4E` assembled from the
/// shipped `S^4` tile and the per-copy rules for its six open vertices.
pub fn build_k4e_eleven_coloring() -> Coloring {
    let tile = data::coloring("fig12_s4k4e.coloring").expect("shipped tile parses");
    k4e_eleven_from_tile(&tile)
}

/// Same assembly from an arbitrary `S^4` tile; positions missing from the tile get color 1.
pub fn k4e_eleven_from_tile(tile: &Coloring) -> Coloring {
    let mut out = Coloring::new();
    for a in 0..4u32 {
        let open = |w: &str| -> Option<u32> {
            Some(match w {
                "1131" => {
                    if a == 1 {
                        11
                    } else {
                        9
                    }
                }
                "3111" => {
                    if a == 1 {
                        9
                    } else {
                        10
                    }
                }
                "1111" => {
                    if a == 3 {
                        8
                    } else {
                        6
                    }
                }
                "1313" => {
                    if a == 3 {
                        11
                    } else {
                        8
                    }
                }
                "3311" => {
                    if a == 3 {
                        9
                    } else {
                        6
                    }
                }
                "3131" => match a {
                    1 => 10,
                    3 => 8,
                    _ => 11,
                },
                _ => return None,
            })
        };
        for v in 0..256 {
            let w = word_of(v, 4, 4);
            let c = open(&w).or_else(|| tile.get(&w)).unwrap_or(1);
            out.insert(format!("{a}{w}"), c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sierpinski::gen_triangle;

    fn c4() -> BaseGraph {
        BaseGraph::library("C4").unwrap()
    }

    #[test]
    fn fig5_tiles_to_s4() {
        let block = data::coloring("fig5_s3c4.coloring").unwrap();
        let family = Family::Generalized(c4());
        let tiled = tile_coloring(&family, 3, &block, 4).unwrap();
        let g = family.graph(4).unwrap();
        assert!(verify_packing_coloring(&g, &tiled).unwrap().ok());
        assert_eq!(tiled.max_color(), 5);
    }

    #[test]
    fn triangle_corner_mismatch() {
        let mut block = Coloring::new();
        for (l, c) in [
            ("00", 1),
            ("11", 1),
            ("22", 2),
            ("01", 2),
            ("02", 3),
            ("12", 4),
        ] {
            block.insert(l, c);
        }
        assert!(matches!(
            tile_coloring(&Family::Triangle, 1, &block, 2),
            Err(Error::CornerColorMismatch(_))
        ));
        assert!(matches!(
            certify_triangle_tiling(1, &block, 1),
            Err(Error::CornerColorMismatch(_))
        ));
    }

    #[test]
    fn invalid_block_rejected() {
        let mut block = data::coloring("fig5_s3c4.coloring").unwrap();
        block.insert("000", block.get("001").unwrap());
        assert!(matches!(
            certify_generalized_tiling(&c4(), 3, &block, CertMode::Refined, 1),
            Err(Error::InvalidBlockColoring(_))
        ));
    }

    #[test]
    fn fig5_refined_vs_conservative() {
        let block = data::coloring("fig5_s3c4.coloring").unwrap();
        let r = certify_generalized_tiling(&c4(), 3, &block, CertMode::Refined, 2).unwrap();
        assert_eq!(r.status, CertStatus::Certified, "{}", r.to_text());
        let c = certify_generalized_tiling(&c4(), 3, &block, CertMode::Conservative, 2).unwrap();
        assert_eq!(c.status, CertStatus::Empirical(5), "{}", c.to_text());
    }

    #[test]
    fn fig14_is_not_liftable() {
        let block = data::coloring("fig14_st2.coloring").unwrap();
        let r = certify_triangle_tiling(2, &block, 2).unwrap();
        assert!(!r.structural);
        assert!(matches!(r.status, CertStatus::Refuted(_)));
        let eight = r.margins.iter().find(|m| m.color == 8).unwrap();
        // 012 sits 2 from one corner and 3 from the other two
        assert_eq!(eight.conditions[2], ("corners", Some(5 - 8)));
    }

    #[test]
    fn triangle_metric_is_lower_bound_on_tiles() {
        let m = 2;
        let metric = BlockMetric::triangle(m).unwrap();
        let big = gen_triangle(m + 2).unwrap();
        let dist = big.all_pairs_distances().unwrap();
        let mut reps: Vec<Vec<(String, usize)>> = vec![Vec::new(); big.vertex_count()];
        for v in 0..3usize.pow(m as u32 + 3) {
            let w = word_of(v, m + 3, 3);
            let x = big.index_of(&triangle_canonical(&w)).unwrap();
            let local = metric.graph.index_of(&triangle_canonical(&w[2..])).unwrap();
            reps[x].push((w[..2].to_string(), local));
        }
        for x in 0..big.vertex_count() {
            for y in x + 1..big.vertex_count() {
                let d = dist.get(x, y);
                let shared = reps[x]
                    .iter()
                    .flat_map(|a| reps[y].iter().map(move |b| (a, b)))
                    .find(|(a, b)| a.0 == b.0);
                if let Some((a, b)) = shared {
                    assert_eq!(d, metric.within.get(a.1, b.1));
                    continue;
                }
                for a in &reps[x] {
                    for b in &reps[y] {
                        let bound = if a.1 == b.1 {
                            metric.copies[a.1]
                        } else {
                            metric.pair(a.1, b.1)
                        };
                        assert!(d >= bound, "{x} {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn generalized_metric_is_lower_bound_on_tiles() {
        for name in ["C4", "K13", "K4E", "P4", "PAW"] {
            let g = BaseGraph::library(name).unwrap();
            let m = 2;
            let metric = BlockMetric::generalized(&g, m, CertMode::Refined).unwrap();
            assert!(metric.sound, "{name}");
            let big = gen_generalized(m + 2, &g).unwrap();
            let dist = big.all_pairs_distances().unwrap();
            let size = 16;
            for x in 0..big.vertex_count() {
                for y in 0..big.vertex_count() {
                    let d = dist.get(x, y);
                    let (a, b) = (x % size, y % size);
                    if x / size == y / size {
                        assert_eq!(d, metric.within.get(a, b), "{name}");
                    } else if a == b {
                        assert!(d >= metric.copies[a], "{name}");
                    } else {
                        assert!(d >= metric.pair(a, b), "{name}");
                    }
                }
            }
        }
    }

    #[test]
    fn k4e_eleven_shape() {
        let c = build_k4e_eleven_coloring();
        assert_eq!(c.len(), 1024);
        assert_eq!(c.max_color(), 11);
        assert_eq!(c.get("11131"), Some(11));
        assert_eq!(c.get("03131"), Some(11));
        assert_eq!(c.get("33131"), Some(8));
    }

    #[test]
    fn k4e_eleven_certified() {
        let k4e = BaseGraph::library("K4E").unwrap();
        let c = build_k4e_eleven_coloring();
        let g5 = gen_generalized(5, &k4e).unwrap();
        assert!(verify_packing_coloring(&g5, &c).unwrap().ok());
        let rep = certify_generalized_tiling(&k4e, 5, &c, CertMode::Refined, 1).unwrap();
        assert!(rep.is_certified());
        let rep = certify_generalized_tiling(&k4e, 5, &c, CertMode::Conservative, 1).unwrap();
        assert_eq!(rep.status, CertStatus::Empirical(6));
    }
}
