//! Packing colorings: verification, greedy construction, exact search.

mod mis;
mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{content_lines, BallScratch, EmbeddingMap, Graph};

pub use mis::{clique_number, counting_lower_bound, max_i_packing_size, MIS_LIMIT};
pub use solver::{chi_rho, is_packing_k_colorable, Decision, SolveResult, SolveStatus, MAX_COLORS};

/// Assignment of positive colors to vertex labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coloring {
    map: BTreeMap<String, u32>,
}

impl Coloring {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics on color 0; colors start at 1.
    pub fn insert(&mut self, label: impl Into<String>, color: u32) {
        assert!(color >= 1, "colors start at 1");
        self.map.insert(label.into(), color);
    }

    pub fn get(&self, label: &str) -> Option<u32> {
        self.map.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.map.iter().map(|(l, &c)| (l.as_str(), c))
    }

    pub fn max_color(&self) -> u32 {
        self.map.values().copied().max().unwrap_or(0)
    }

    /// Number of vertices per color, indexed by color.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.max_color() as usize + 1];
        for &c in self.map.values() {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Dense per-vertex colors for `g`, 0 for uncolored vertices.
    pub fn to_indexed(&self, g: &Graph) -> Result<Vec<u32>> {
        let mut out = vec![0; g.vertex_count()];
        for (l, &c) in &self.map {
            out[g.require(l)?] = c;
        }
        Ok(out)
    }

    pub fn from_indexed(g: &Graph, colors: &[u32]) -> Self {
        let map = colors
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (g.label(v).to_string(), c))
            .collect();
        Self { map }
    }

    /// Coloring of the source graph of `m`, read through the map.
    pub fn pull_back(&self, m: &EmbeddingMap) -> Self {
        let map = m
            .pairs
            .iter()
            .filter_map(|(s, t)| self.get(t).map(|c| (s.clone(), c)))
            .collect();
        Self { map }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::new();
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [l, c] => c.parse::<u32>().ok().filter(|&c| c >= 1).map(|c| (l, c)),
                _ => None,
            };
            let (l, c) = parsed.ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `LABEL COLOR` with COLOR >= 1, got `{content}`"),
            })?;
            if out.map.insert(l.to_string(), c).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("label `{l}` colored twice"),
                });
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, c) in &self.map {
            let _ = writeln!(out, "{l} {c}");
        }
        out
    }
}

impl FromIterator<(String, u32)> for Coloring {
    fn from_iter<I: IntoIterator<Item = (String, u32)>>(iter: I) -> Self {
        let mut c = Coloring::new();
        for (l, col) in iter {
            c.insert(l, col);
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub color: u32,
    pub u: String,
    pub v: String,
    pub distance: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub uncolored: Vec<String>,
}

impl ViolationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.uncolored.is_empty()
    }
}

/// Lists every same-colored pair at distance at most its color, and every uncolored vertex.
pub fn verify_packing_coloring(g: &Graph, c: &Coloring) -> Result<ViolationReport> {
    let colors = c.to_indexed(g)?;
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &col) in colors.iter().enumerate() {
        if col > 0 {
            classes.entry(col).or_default().push(v);
        }
    }
    let classes: Vec<(u32, Vec<usize>)> = classes.into_iter().collect();
    let per_class: Vec<Vec<Violation>> = classes
        .par_iter()
        .map(|(col, members)| {
            let mut scratch = BallScratch::new(g.vertex_count());
            let mut found = Vec::new();
            for &u in members {
                for &(w, d) in scratch.ball(g, u, *col) {
                    let w = w as usize;
                    if w > u && colors[w] == *col {
                        found.push(Violation {
                            color: *col,
                            u: g.label(u).to_string(),
                            v: g.label(w).to_string(),
                            distance: d as u32,
                        });
                    }
                }
            }
            found
        })
        .collect();
    let uncolored = colors
        .iter()
        .enumerate()
        .filter(|(_, &col)| col == 0)
        .map(|(v, _)| g.label(v).to_string())
        .collect();
    Ok(ViolationReport {
        violations: per_class.into_iter().flatten().collect(),
        uncolored,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GreedyOrder {
    /// Descending degree; the seed shuffles vertices of equal degree.
    DegreeDesc,
    Label,
    /// Listed labels first, then the rest by label.
    Given(Vec<String>),
}

/// First-fit packing coloring along the requested vertex order.
pub fn greedy_packing_coloring(g: &Graph, order: &GreedyOrder, seed: u64) -> Coloring {
    let n = g.vertex_count();
    let mut seq: Vec<usize> = (0..n).collect();
    seq.sort_by(|&a, &b| g.label(a).cmp(g.label(b)));
    match order {
        GreedyOrder::Label => {}
        GreedyOrder::DegreeDesc => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if seed != 0 {
                seq.shuffle(&mut rng);
            }
            seq.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        }
        GreedyOrder::Given(list) => {
            let mut front: Vec<usize> = Vec::new();
            let mut seen = BTreeSet::new();
            for l in list {
                if let Some(v) = g.index_of(l) {
                    if seen.insert(v) {
                        front.push(v);
                    }
                }
            }
            front.extend(seq.into_iter().filter(|v| !seen.contains(v)));
            seq = front;
        }
    }
    let mut colors = vec![0u32; n];
    let mut top = 0u32;
    let mut scratch = BallScratch::new(n);
    let mut nearest: Vec<u32> = Vec::new();
    for v in seq {
        nearest.clear();
        nearest.resize(top as usize + 2, u32::MAX);
        for &(w, d) in scratch.ball(g, v, top + 1) {
            let c = colors[w as usize] as usize;
            if c > 0 && nearest[c] == u32::MAX {
                nearest[c] = d as u32;
            }
        }
        let c = (1..=top + 1)
            .find(|&c| nearest[c as usize] > c)
            .expect("a fresh color is always free");
        colors[v] = c;
        top = top.max(c);
    }
    Coloring::from_indexed(g, &colors)
}

/// Per-vertex color restrictions for the exact search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorConstraints {
    pub forbidden: BTreeMap<String, BTreeSet<u32>>,
    pub required: BTreeMap<String, u32>,
}

impl ColorConstraints {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn forbid(
        &mut self,
        label: impl Into<String>,
        colors: impl IntoIterator<Item = u32>,
    ) -> &mut Self {
        self.forbidden
            .entry(label.into())
            .or_default()
            .extend(colors);
        self
    }

    pub fn require(&mut self, label: impl Into<String>, color: u32) -> &mut Self {
        self.required.insert(label.into(), color);
        self
    }

    /// Colors named by any constraint.
    pub(crate) fn mentioned(&self) -> BTreeSet<u32> {
        self.forbidden
            .values()
            .flatten()
            .chain(self.required.values())
            .copied()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sierpinski::{gen_triangle, BaseGraph};

    fn k2() -> Graph {
        Graph::new(&["a", "b"], &[("a", "b")]).unwrap()
    }

    #[test]
    fn k2_same_color_violates() {
        let c: Coloring = [("a".to_string(), 1), ("b".to_string(), 1)]
            .into_iter()
            .collect();
        let r = verify_packing_coloring(&k2(), &c).unwrap();
        assert_eq!(
            r.violations,
            vec![Violation {
                color: 1,
                u: "a".into(),
                v: "b".into(),
                distance: 1
            }]
        );
        assert!(!r.ok());
    }

    #[test]
    fn uncolored_and_unknown() {
        let mut c = Coloring::new();
        c.insert("a", 1);
        let r = verify_packing_coloring(&k2(), &c).unwrap();
        assert_eq!(r.uncolored, vec!["b".to_string()]);
        c.insert("zz", 2);
        assert!(matches!(
            verify_packing_coloring(&k2(), &c),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn greedy_triangle_uses_three_colors() {
        let g = Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        for order in [GreedyOrder::Label, GreedyOrder::DegreeDesc] {
            let c = greedy_packing_coloring(&g, &order, 3);
            let used: BTreeSet<u32> = c.iter().map(|(_, c)| c).collect();
            assert_eq!(used, [1, 2, 3].into_iter().collect());
        }
    }

    #[test]
    fn greedy_empty_graph() {
        let g = Graph::new::<&str>(&[], &[]).unwrap();
        assert!(greedy_packing_coloring(&g, &GreedyOrder::Label, 0).is_empty());
    }

    #[test]
    fn greedy_st2_is_valid() {
        let g = gen_triangle(2).unwrap();
        let c = greedy_packing_coloring(&g, &GreedyOrder::DegreeDesc, 1);
        assert!(verify_packing_coloring(&g, &c).unwrap().ok());
        assert!(c.max_color() >= 8);
    }

    #[test]
    fn greedy_given_order() {
        let g = crate::sierpinski::gen_generalized(2, &BaseGraph::library("C4").unwrap()).unwrap();
        let order = GreedyOrder::Given(vec!["11".into(), "33".into()]);
        let c = greedy_packing_coloring(&g, &order, 0);
        assert_eq!(c.get("11"), Some(1));
        assert!(verify_packing_coloring(&g, &c).unwrap().ok());
    }

    #[test]
    fn coloring_text_round_trip() {
        let c = Coloring::parse("# x\nb 2\na 1\n").unwrap();
        assert_eq!(c.to_text(), "a 1\nb 2\n");
        assert!(Coloring::parse("a 0\n").is_err());
        assert!(Coloring::parse("a 1\na 2\n").is_err());
        assert_eq!(c.class_sizes(), vec![0, 1, 1]);
    }
}
