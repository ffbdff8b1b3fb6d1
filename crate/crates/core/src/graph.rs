//! Labeled simple graphs with hop-distance queries.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distance value used for unreachable pairs.
pub const UNREACHABLE: u16 = u16::MAX;

/// Largest graph for which [`Graph::all_pairs_distances`] builds a full matrix.
pub const APSP_LIMIT: usize = 5_000;

/// Simple undirected graph whose vertices carry unique string labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
    index: HashMap<String, u32>,
}

impl Graph {
    /// Builds a graph from labels and label pairs. Repeated edges collapse.
    pub fn new<S: AsRef<str>>(labels: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            let l = l.as_ref();
            if index.insert(l.to_string(), i as u32).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a.to_string()));
            }
            pairs.push((ia, ib));
        }
        let labels = labels.iter().map(|l| l.as_ref().to_string()).collect();
        Ok(Self::from_index_edges(labels, pairs))
    }

    /// Trusted constructor: labels must be unique and edges loop-free.
    pub(crate) fn from_index_edges(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            debug_assert_ne!(a, b);
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        Self { labels, adj, index }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).map(|&i| i as usize)
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges as index pairs `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Hop distances from `source`, omitting vertices farther than `depth_limit`.
    pub fn bfs_distances(
        &self,
        source: &str,
        depth_limit: Option<u32>,
    ) -> Result<BTreeMap<String, u32>> {
        let s = self.require(source)?;
        let radius = depth_limit.map_or(u32::MAX, |d| d);
        Ok(self
            .ball(s, radius)
            .into_iter()
            .map(|(v, d)| (self.labels[v as usize].clone(), d as u32))
            .collect())
    }

    /// Full distance row from `s`; unreachable entries are [`UNREACHABLE`].
    pub fn distance_row(&self, s: usize) -> Vec<u16> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[s] = 0;
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in &self.adj[u as usize] {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within `radius` of `s`, in nondecreasing distance order.
    pub fn ball(&self, s: usize, radius: u32) -> Vec<(u32, u16)> {
        let mut scratch = BallScratch::new(self.vertex_count());
        scratch.ball(self, s, radius).to_vec()
    }

    pub fn all_pairs_distances(&self) -> Result<DistanceMatrix> {
        let n = self.vertex_count();
        if n > APSP_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: APSP_LIMIT,
            });
        }
        let rows: Vec<Vec<u16>> = (0..n)
            .into_par_iter()
            .map(|s| self.distance_row(s))
            .collect();
        Ok(DistanceMatrix {
            n,
            d: rows.concat(),
        })
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.distance_row(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Largest pairwise distance; runs one BFS per vertex without storing the matrix.
    pub fn diameter(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok((0..self.vertex_count())
            .into_par_iter()
            .map(|s| *self.distance_row(s).iter().max().unwrap_or(&0) as u32)
            .max()
            .unwrap_or(0))
    }

    pub fn induced_subgraph<S: AsRef<str>>(&self, keep: &[S]) -> Result<Graph> {
        let mut chosen = BTreeSet::new();
        for l in keep {
            chosen.insert(self.require(l.as_ref())?);
        }
        let order: Vec<usize> = chosen.into_iter().collect();
        let mut remap = HashMap::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            remap.insert(v as u32, i as u32);
        }
        let labels = order.iter().map(|&v| self.labels[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = remap.get(w) {
                    if (i as u32) < j {
                        edges.push((i as u32, j));
                    }
                }
            }
        }
        Ok(Graph::from_index_edges(labels, edges))
    }

    /// Same vertex order, with labels replaced through `f`.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Graph> {
        let labels: Vec<String> = self.labels.iter().map(|l| f(l)).collect();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let edges: Vec<(u32, u32)> = self.edges().map(|(u, v)| (u as u32, v as u32)).collect();
        Ok(Graph::from_index_edges(labels, edges))
    }

    /// Copy with vertices sorted by label, the canonical form used for comparisons.
    pub fn sorted(&self) -> Graph {
        let mut order: Vec<usize> = (0..self.vertex_count()).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut pos = vec![0u32; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i as u32;
        }
        let labels = order.iter().map(|&v| self.labels[v].clone()).collect();
        let edges: Vec<(u32, u32)> = self.edges().map(|(u, v)| (pos[u], pos[v])).collect();
        Graph::from_index_edges(labels, edges)
    }

    pub fn to_text(&self) -> String {
        let g = self.sorted();
        let mut out = String::new();
        for l in &g.labels {
            let _ = writeln!(out, "v {l}");
        }
        let mut edges: Vec<(&str, &str)> = g
            .edges()
            .map(|(u, v)| {
                let (a, b) = (g.label(u), g.label(v));
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        for (a, b) in edges {
            let _ = writeln!(out, "e {a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Graph> {
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                ["v", l] => labels.push(l.to_string()),
                ["e", a, b] => edges.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected `v LABEL` or `e A B`, got `{content}`"),
                    })
                }
            }
        }
        Graph::new(&labels, &edges)
    }
}

/// Reusable buffers for repeated bounded BFS on one graph.
pub struct BallScratch {
    dist: Vec<u16>,
    out: Vec<(u32, u16)>,
}

impl BallScratch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHABLE; n],
            out: Vec::new(),
        }
    }

    /// Vertices within `radius` of `s` in BFS order; valid until the next call.
    pub fn ball(&mut self, g: &Graph, s: usize, radius: u32) -> &[(u32, u16)] {
        for &(v, _) in &self.out {
            self.dist[v as usize] = UNREACHABLE;
        }
        self.out.clear();
        self.dist[s] = 0;
        self.out.push((s as u32, 0));
        let mut head = 0;
        while head < self.out.len() {
            let (u, du) = self.out[head];
            head += 1;
            if du as u32 >= radius {
                continue;
            }
            for &w in g.neighbors(u as usize) {
                if self.dist[w as usize] == UNREACHABLE {
                    self.dist[w as usize] = du + 1;
                    self.out.push((w, du + 1));
                }
            }
        }
        &self.out
    }
}

/// Dense hop-distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u16>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u16] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn max(&self) -> u16 {
        self.d.iter().copied().max().unwrap_or(0)
    }
}

/// Vertex map from a source graph into a target graph, by label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbeddingMap {
    pub pairs: Vec<(String, String)>,
}

impl EmbeddingMap {
    pub fn identity<S: AsRef<str>>(labels: &[S]) -> Self {
        Self {
            pairs: labels
                .iter()
                .map(|l| (l.as_ref().to_string(), l.as_ref().to_string()))
                .collect(),
        }
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(s, _)| s == source)
            .map(|(_, t)| t.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                [a, b] => pairs.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected `SOURCE TARGET`, got `{content}`"),
                    })
                }
            }
        }
        Ok(Self { pairs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingReport {
    Ok,
    NotInjective {
        first: String,
        second: String,
        target: String,
    },
    MissingEdge {
        source: (String, String),
        target: (String, String),
    },
}

impl EmbeddingReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, EmbeddingReport::Ok)
    }
}

/// Checks that `m` sends `h` injectively into `g` and preserves every edge.
pub fn verify_subgraph_embedding(
    h: &Graph,
    g: &Graph,
    m: &EmbeddingMap,
) -> Result<EmbeddingReport> {
    let lookup: HashMap<&str, &str> = m
        .pairs
        .iter()
        .map(|(s, t)| (s.as_str(), t.as_str()))
        .collect();
    let mut image = vec![0usize; h.vertex_count()];
    let mut owner: HashMap<usize, &str> = HashMap::new();
    for (v, slot) in image.iter_mut().enumerate() {
        let src = h.label(v);
        let tgt = *lookup
            .get(src)
            .ok_or_else(|| Error::IncompleteMap(src.to_string()))?;
        let t = g.require(tgt)?;
        if let Some(prev) = owner.insert(t, src) {
            return Ok(EmbeddingReport::NotInjective {
                first: prev.to_string(),
                second: src.to_string(),
                target: tgt.to_string(),
            });
        }
        *slot = t;
    }
    for (u, v) in h.edges() {
        if !g.has_edge(image[u], image[v]) {
            return Ok(EmbeddingReport::MissingEdge {
                source: (h.label(u).to_string(), h.label(v).to_string()),
                target: (g.label(image[u]).to_string(), g.label(image[v]).to_string()),
            });
        }
    }
    Ok(EmbeddingReport::Ok)
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap()
    }

    fn path(n: usize) -> Graph {
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let edges: Vec<(String, String)> = (1..n)
            .map(|i| (labels[i - 1].clone(), labels[i].clone()))
            .collect();
        Graph::new(&labels, &edges).unwrap()
    }

    #[test]
    fn build_triangle() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn build_collapses_duplicates() {
        let g = Graph::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn isolated_vertex() {
        let g = Graph::new::<&str>(&["a"], &[]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            Graph::new(&["a", "b"], &[("a", "c")]),
            Err(Error::UnknownLabel(l)) if l == "c"
        ));
        assert!(matches!(
            Graph::new(&["a", "b"], &[("a", "a")]),
            Err(Error::SelfLoop(_))
        ));
        assert!(matches!(
            Graph::new::<&str>(&["a", "a"], &[]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn bfs_on_triangle_and_path() {
        let d = triangle().bfs_distances("a", None).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!((d["a"], d["b"], d["c"]), (0, 1, 1));

        let g = Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let d = g.bfs_distances("a", Some(1)).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!((d["a"], d["b"]), (0, 1));
        assert!(g.bfs_distances("z", None).is_err());
    }

    #[test]
    fn apsp_triangle() {
        let m = triangle().all_pairs_distances().unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(m.get(u, v), u16::from(u != v));
            }
        }
    }

    #[test]
    fn diameter_of_path_and_disconnected() {
        assert_eq!(path(6).diameter().unwrap(), 5);
        let g = Graph::new::<&str>(&["a", "b"], &[]).unwrap();
        assert!(matches!(g.diameter(), Err(Error::DisconnectedGraph)));
    }

    #[test]
    fn induced_subgraph_cases() {
        let g = triangle();
        let h = g.induced_subgraph(&["a", "b"]).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 1));
        let e = g.induced_subgraph::<&str>(&[]).unwrap();
        assert_eq!(e.vertex_count(), 0);
        assert!(g.induced_subgraph(&["q"]).is_err());
    }

    #[test]
    fn embedding_reports() {
        let p = path(3);
        let t = triangle();
        let mut m = EmbeddingMap {
            pairs: vec![
                ("p0".into(), "a".into()),
                ("p1".into(), "b".into()),
                ("p2".into(), "c".into()),
            ],
        };
        assert!(verify_subgraph_embedding(&p, &t, &m).unwrap().is_ok());
        m.pairs[2].1 = "a".into();
        assert!(matches!(
            verify_subgraph_embedding(&p, &t, &m).unwrap(),
            EmbeddingReport::NotInjective { .. }
        ));
        m.pairs.pop();
        assert!(matches!(
            verify_subgraph_embedding(&p, &t, &m),
            Err(Error::IncompleteMap(_))
        ));
        let rev = EmbeddingMap {
            pairs: vec![
                ("a".into(), "p0".into()),
                ("b".into(), "p1".into()),
                ("c".into(), "p2".into()),
            ],
        };
        assert!(matches!(
            verify_subgraph_embedding(&t, &p, &rev).unwrap(),
            EmbeddingReport::MissingEdge { .. }
        ));
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::new(&["b", "a", "c"], &[("c", "a"), ("a", "b")]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "v a\nv b\nv c\ne a b\ne a c\n");
        assert_eq!(Graph::parse(&text).unwrap(), g.sorted());
        assert!(matches!(
            Graph::parse("v a\nx a b\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn ball_order_is_by_distance() {
        let g = path(7);
        let ball = g.ball(3, 2);
        let ds: Vec<u16> = ball.iter().map(|&(_, d)| d).collect();
        assert_eq!(ds, vec![0, 1, 1, 2, 2]);
    }
}
