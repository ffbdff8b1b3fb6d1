//! Generators for Sierpinski graphs, generalized Sierpinski graphs and
//! Sierpinski triangle graphs.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_GENERALIZED_DIM: usize = 12;
pub const MAX_TRIANGLE_DIM: usize = 9;
pub const MAX_VERTICES: usize = 1 << 24;

/// Seed graph on the digit set `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    k: usize,
    edges: Vec<(u8, u8)>,
    name: String,
}

impl BaseGraph {
    pub fn new(k: usize, edges: &[(u8, u8)]) -> Result<Self> {
        if !(2..=10).contains(&k) {
            return Err(Error::InvalidBase(format!("order {k} outside 2..=10")));
        }
        let mut list = Vec::new();
        for &(a, b) in edges {
            if a as usize >= k || b as usize >= k {
                return Err(Error::InvalidBase(format!("edge {a}{b} leaves 0..{k}")));
            }
            if a == b {
                return Err(Error::InvalidBase(format!("loop at {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let base = Self {
            k,
            edges: list,
            name: String::from("custom"),
        };
        if let Some(x) = (0..k).find(|&x| base.degree(x) == 0) {
            return Err(Error::InvalidBase(format!("digit {x} is isolated")));
        }
        if !base.as_graph().is_connected() {
            return Err(Error::InvalidBase("base graph is disconnected".into()));
        }
        Ok(base)
    }

    fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn complete(k: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..k as u8 {
            for b in a + 1..k as u8 {
                edges.push((a, b));
            }
        }
        Ok(Self::new(k, &edges)?.named(&format!("K{k}")))
    }

    /// Library lookup: `K4`, `C4`, `P4`, `K13`, `K4E`, `PAW`, or `K<k>` for `2 <= k <= 10`.
    pub fn library(name: &str) -> Result<Self> {
        let upper = name.to_ascii_uppercase();
        let base = match upper.as_str() {
            "C4" => Self::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])?,
            "P4" => Self::new(4, &[(0, 1), (1, 2), (2, 3)])?,
            "K13" => Self::new(4, &[(1, 0), (1, 2), (1, 3)])?,
            "K4E" => Self::new(4, &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)])?,
            "PAW" => Self::new(4, &[(0, 1), (1, 2), (1, 3), (2, 3)])?,
            _ => {
                let k = upper
                    .strip_prefix('K')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|k| (2..=10).contains(k))
                    .ok_or_else(|| Error::UnknownName(name.to_string()))?;
                return Self::complete(k);
            }
        };
        Ok(base.named(&upper))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b) as u8, a.max(b) as u8);
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degree(&self, x: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a as usize == x || b as usize == x)
            .count()
    }

    pub fn as_graph(&self) -> Graph {
        let labels = (0..self.k).map(|d| d.to_string()).collect();
        let edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a as u32, b as u32))
            .collect();
        Graph::from_index_edges(labels, edges)
    }
}

impl fmt::Display for BaseGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn digit(d: usize) -> char {
    char::from_digit(d as u32, 10).expect("digit below 10")
}

/// Word of length `len` spelling `value` in base `k`, most significant digit first.
pub fn word_of(mut value: usize, len: usize, k: usize) -> String {
    let mut buf = vec!['0'; len];
    for slot in buf.iter_mut().rev() {
        *slot = digit(value % k);
        value /= k;
    }
    buf.into_iter().collect()
}

pub fn repeat_digit(d: usize, len: usize) -> String {
    std::iter::repeat_n(digit(d), len).collect()
}

fn check_dim(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::DimensionOutOfRange { n, min, max });
    }
    Ok(())
}

fn vertex_total(k: usize, n: usize) -> Result<usize> {
    let total = k
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_VERTICES)
        .ok_or(Error::TooLarge {
            n: usize::MAX,
            limit: MAX_VERTICES,
        })?;
    Ok(total)
}

/// Generalized Sierpinski graph of dimension `n` over `g`.
pub fn gen_generalized(n: usize, g: &BaseGraph) -> Result<Graph> {
    check_dim(n, 1, MAX_GENERALIZED_DIM)?;
    let k = g.k();
    let total = vertex_total(k, n)?;
    let labels: Vec<String> = (0..total).map(|v| word_of(v, n, k)).collect();
    let mut edges = Vec::new();
    for &(x, y) in g.edges() {
        let (x, y) = (x as usize, y as usize);
        for plen in 0..n {
            let r = n - plen - 1;
            let kr = k.pow(r as u32);
            let ones = (kr - 1) / (k - 1);
            for p in 0..k.pow(plen as u32) {
                let base = p * kr * k;
                let u = base + x * kr + y * ones;
                let v = base + y * kr + x * ones;
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok(Graph::from_index_edges(labels, edges))
}

/// Classical Sierpinski graph over the complete graph on `k` digits.
pub fn gen_sierpinski(n: usize, k: usize) -> Result<Graph> {
    if !(2..=10).contains(&k) {
        return Err(Error::InvalidBase(format!("order {k} outside 2..=10")));
    }
    gen_generalized(n, &BaseGraph::complete(k)?)
}

/// The word linked to `w` by the unique linking edge at its trailing run, if any.
fn link_partner(w: &[u8]) -> Option<Vec<u8>> {
    let last = *w.last()?;
    let run = w.iter().rev().take_while(|&&c| c == last).count();
    if run == w.len() {
        return None;
    }
    let a = w[w.len() - run - 1];
    let mut p = w[..w.len() - run - 1].to_vec();
    p.push(last);
    p.extend(std::iter::repeat_n(a, run));
    Some(p)
}

/// Canonical triangle-graph label of a word of `S^{n+1}_3`.
pub fn triangle_canonical(word: &str) -> String {
    match link_partner(word.as_bytes()) {
        Some(p) => {
            let p = String::from_utf8(p).expect("ascii digits");
            if p.as_str() < word {
                p
            } else {
                word.to_string()
            }
        }
        None => word.to_string(),
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }
}

/// Whether the edge `{u, v}` of `S^N_k` is a linking edge `{w i j^r, w j i^r}` with `r >= 1`.
fn is_linking(u: &str, v: &str) -> bool {
    let common = u.bytes().zip(v.bytes()).take_while(|(a, b)| a == b).count();
    u.len() - common >= 2
}

/// Sierpinski triangle graph `ST^n_3`, obtained by contracting the linking
/// edges of `S^{n+1}_3`. Vertex labels are the smallest word of each class.
pub fn gen_triangle(n: usize) -> Result<Graph> {
    check_dim(n, 0, MAX_TRIANGLE_DIM)?;
    let s = gen_sierpinski(n + 1, 3)?;
    let mut uf = UnionFind::new(s.vertex_count());
    for (u, v) in s.edges() {
        if is_linking(s.label(u), s.label(v)) {
            uf.union(u as u32, v as u32);
        }
    }
    // labels are in lexicographic order, so each root is the class minimum
    let mut class_id = HashMap::new();
    let mut labels = Vec::new();
    let mut of = vec![0u32; s.vertex_count()];
    for (v, slot) in of.iter_mut().enumerate() {
        let r = uf.find(v as u32);
        let next = labels.len() as u32;
        let id = *class_id.entry(r).or_insert_with(|| {
            labels.push(s.label(r as usize).to_string());
            next
        });
        *slot = id;
    }
    let edges: Vec<(u32, u32)> = s
        .edges()
        .filter(|&(u, v)| !is_linking(s.label(u), s.label(v)))
        .map(|(u, v)| (of[u], of[v]))
        .collect();
    Ok(Graph::from_index_edges(labels, edges))
}

/// `ST^n_3` by gluing three copies of `ST^{n-1}_3` at pairs of corners.
pub fn gen_triangle_recursive(n: usize) -> Result<Graph> {
    check_dim(n, 0, MAX_TRIANGLE_DIM)?;
    let (labels, edges) = triangle_parts(n);
    Graph::new(&labels, &edges).map(|g| g.sorted())
}

fn triangle_parts(n: usize) -> (Vec<String>, Vec<(String, String)>) {
    if n == 0 {
        let labels = vec!["0".to_string(), "1".to_string(), "2".to_string()];
        let edges = vec![
            ("0".to_string(), "1".to_string()),
            ("0".to_string(), "2".to_string()),
            ("1".to_string(), "2".to_string()),
        ];
        return (labels, edges);
    }
    let (inner_labels, inner_edges) = triangle_parts(n - 1);
    let mut rename: HashMap<String, String> = HashMap::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let a = format!("{}{}", digit(i), repeat_digit(j, n));
                let b = format!("{}{}", digit(j), repeat_digit(i, n));
                let keep = a.clone().min(b);
                rename.insert(a, keep);
            }
        }
    }
    let name = |i: usize, l: &str| {
        let raw = format!("{}{}", digit(i), l);
        rename.get(&raw).cloned().unwrap_or(raw)
    };
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for i in 0..3 {
        for l in &inner_labels {
            labels.push(name(i, l));
        }
        for (a, b) in &inner_edges {
            edges.push((name(i, a), name(i, b)));
        }
    }
    labels.sort();
    labels.dedup();
    (labels, edges)
}

/// A Sierpinski-type family: generalized over a base graph, or the triangle graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Generalized(BaseGraph),
    Triangle,
}

impl Family {
    pub fn graph(&self, n: usize) -> Result<Graph> {
        match self {
            Family::Generalized(g) => gen_generalized(n, g),
            Family::Triangle => gen_triangle(n),
        }
    }

    /// Number of distinct digits in vertex words.
    pub fn arity(&self) -> usize {
        match self {
            Family::Generalized(g) => g.k(),
            Family::Triangle => 3,
        }
    }

    /// Length of vertex words at dimension `n`.
    pub fn word_len(&self, n: usize) -> usize {
        match self {
            Family::Generalized(_) => n,
            Family::Triangle => n + 1,
        }
    }

    pub fn extreme_vertices(&self, n: usize) -> Vec<String> {
        let len = self.word_len(n);
        (0..self.arity()).map(|i| repeat_digit(i, len)).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Generalized(g) => write!(f, "generalized({g})"),
            Family::Triangle => f.write_str("triangle"),
        }
    }
}

/// Extreme vertices `i^n` of `S^n_G`, or the three corners of `ST^n_3`.
pub fn extreme_vertices(family: &Family, n: usize) -> Vec<String> {
    family.extreme_vertices(n)
}

/// All words of length `n` over `0..k` that start with `prefix`.
pub fn block_vertices(prefix: &str, n: usize, k: usize) -> Vec<String> {
    if prefix.len() > n
        || prefix
            .chars()
            .any(|c| c.to_digit(10).is_none_or(|d| d as usize >= k))
    {
        return Vec::new();
    }
    let rest = n - prefix.len();
    (0..k.pow(rest as u32))
        .map(|v| format!("{prefix}{}", word_of(v, rest, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_shapes() {
        let c4 = BaseGraph::library("C4").unwrap();
        assert_eq!(c4.edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(!c4.has_edge(0, 2) && !c4.has_edge(1, 3));
        let k4e = BaseGraph::library("K4E").unwrap();
        assert_eq!(k4e.edges().len(), 5);
        assert!(!k4e.has_edge(0, 2));
        let k13 = BaseGraph::library("K13").unwrap();
        assert_eq!(k13.degree(1), 3);
        let paw = BaseGraph::library("paw").unwrap();
        assert!(paw.has_edge(1, 2) && paw.has_edge(2, 3) && paw.has_edge(1, 3));
        assert_eq!(paw.degree(0), 1);
        assert_eq!(BaseGraph::library("K6").unwrap().edges().len(), 15);
        assert!(matches!(
            BaseGraph::library("Q7"),
            Err(Error::UnknownName(_))
        ));
    }

    #[test]
    fn base_validation() {
        assert!(BaseGraph::new(3, &[(0, 1)]).is_err());
        assert!(BaseGraph::new(4, &[(0, 1), (2, 3)]).is_err());
        assert!(BaseGraph::new(1, &[]).is_err());
    }

    #[test]
    fn words() {
        assert_eq!(word_of(7, 3, 4), "013");
        assert_eq!(repeat_digit(2, 3), "222");
    }

    #[test]
    fn s1_c4_is_c4() {
        let g = gen_generalized(1, &BaseGraph::library("C4").unwrap()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(g.has_edge(0, 3) && !g.has_edge(0, 2));
    }

    #[test]
    fn s2_c4_counts() {
        let g = gen_generalized(2, &BaseGraph::library("C4").unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (16, 20));
    }

    #[test]
    fn s2_k13_linking() {
        let g = gen_generalized(2, &BaseGraph::library("K13").unwrap()).unwrap();
        let (a, b) = (g.index_of("01").unwrap(), g.index_of("10").unwrap());
        assert!(g.has_edge(a, b));
        let (a, b) = (g.index_of("02").unwrap(), g.index_of("20").unwrap());
        assert!(!g.has_edge(a, b));
    }

    #[test]
    fn small_sierpinski() {
        let k4 = gen_sierpinski(1, 4).unwrap();
        assert_eq!(k4.edge_count(), 6);
        let s23 = gen_sierpinski(2, 3).unwrap();
        assert_eq!((s23.vertex_count(), s23.edge_count()), (9, 12));
        assert!(gen_sierpinski(0, 3).is_err());
        assert!(gen_sierpinski(13, 2).is_err());
    }

    #[test]
    fn triangle_small() {
        let t0 = gen_triangle(0).unwrap();
        assert_eq!((t0.vertex_count(), t0.edge_count()), (3, 3));
        let t2 = gen_triangle(2).unwrap();
        assert_eq!(t2.vertex_count(), 15);
        assert!(gen_triangle(10).is_err());
    }

    #[test]
    fn triangle_recursive_matches() {
        for n in 0..=3 {
            assert_eq!(gen_triangle(n).unwrap(), gen_triangle_recursive(n).unwrap());
        }
    }

    #[test]
    fn canonical_label_matches_union_find() {
        let t = gen_triangle(3).unwrap();
        let s = gen_sierpinski(4, 3).unwrap();
        for w in s.labels() {
            assert!(t.index_of(&triangle_canonical(w)).is_some(), "{w}");
        }
        assert_eq!(triangle_canonical("0111"), "0111");
        assert_eq!(triangle_canonical("1000"), "0111");
        assert_eq!(triangle_canonical("2222"), "2222");
    }

    #[test]
    fn extremes_and_blocks() {
        let c4 = Family::Generalized(BaseGraph::library("C4").unwrap());
        assert_eq!(extreme_vertices(&c4, 3), vec!["000", "111", "222", "333"]);
        assert_eq!(extreme_vertices(&Family::Triangle, 0), vec!["0", "1", "2"]);
        assert_eq!(block_vertices("3", 3, 4).len(), 16);
        assert_eq!(block_vertices("03", 3, 4), vec!["030", "031", "032", "033"]);
        assert_eq!(block_vertices("", 2, 3).len(), 9);
        assert!(block_vertices("0000", 3, 4).is_empty());
    }
}
