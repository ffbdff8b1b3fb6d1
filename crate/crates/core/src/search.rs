//! Seeded local search for block colorings that pass the lift certificates.
//!
//! The objective is the sum of integer deficits `max(0, c + 1 - d)` over
//! same-colored position pairs under the block metric, plus the same deficit
//! against each position's own copies. A candidate scoring zero is handed to
//! the certifier; on success the color budget is lowered by one and the
//! search continues.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::certify::{
    certify_generalized_tiling, certify_triangle_tiling, BlockMetric, CertMode, CertStatus,
};
use crate::error::{Error, Result};
use crate::packing::Coloring;
use crate::sierpinski::{repeat_digit, Family, MAX_GENERALIZED_DIM, MAX_TRIANGLE_DIM};

/// Relative frequencies of the two move kinds, and how often a recolor
/// targets a vertex that is currently in conflict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveWeights {
    pub recolor: f64,
    pub swap: f64,
    pub focus: f64,
    /// Probability that a recolor proposes a uniformly random color instead of the cheapest.
    pub noise: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        Self {
            recolor: 0.97,
            swap: 0.03,
            focus: 0.8,
            noise: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub family: Family,
    /// Block dimension.
    pub m: usize,
    pub seed: u64,
    pub max_color: u32,
    /// Moves per restart.
    pub iterations: u64,
    pub restarts: u32,
    pub weights: MoveWeights,
    pub initial_temperature: f64,
    /// Geometric cooling factor applied after every move.
    pub cooling: f64,
    /// Non-improving moves before the temperature is reset.
    pub stagnation: u64,
    /// Dimensions above `m` that the certifier tiles and verifies.
    pub certify_depth: usize,
    /// Wall-clock cap per restart. Results are seed-deterministic only without it.
    pub time_limit: Option<Duration>,
}

impl SearchConfig {
    pub fn new(family: Family, m: usize, max_color: u32) -> Self {
        Self {
            family,
            m,
            seed: 0,
            max_color,
            iterations: 20_000_000,
            restarts: 1,
            weights: MoveWeights::default(),
            initial_temperature: 0.3,
            cooling: 0.99999,
            stagnation: 50_000,
            certify_depth: 2,
            time_limit: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let max = match self.family {
            Family::Triangle => MAX_TRIANGLE_DIM,
            Family::Generalized(_) => MAX_GENERALIZED_DIM,
        };
        if self.m < 1 || self.m > max {
            return Err(Error::DimensionOutOfRange {
                n: self.m,
                min: 1,
                max,
            });
        }
        if self.max_color < 1 {
            return Err(Error::InvalidConfig("max_color must be at least 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        let w = self.weights;
        if !(w.recolor >= 0.0 && w.swap >= 0.0 && w.recolor + w.swap > 0.0) {
            return Err(Error::InvalidConfig(
                "move weights must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Best certified coloring, or the lowest-penalty candidate if none certified.
    pub best: Coloring,
    /// Max color of `best` when it is certified.
    pub certified_bound: Option<u32>,
    pub best_penalty: u64,
    /// Restart that produced `best`.
    pub restart: u32,
    /// `(iteration, penalty)` at each improvement within the winning restart.
    pub history: Vec<(u64, u64)>,
    /// Moves made over all restarts.
    pub iterations: u64,
}

fn deficit(c: u32, d: u16) -> u32 {
    (c + 1).saturating_sub(d as u32)
}

fn metric_for(family: &Family, m: usize) -> Result<BlockMetric> {
    match family {
        Family::Triangle => BlockMetric::triangle(m),
        Family::Generalized(g) => BlockMetric::generalized(g, m, CertMode::Refined),
    }
}

fn pinned_positions(family: &Family, m: usize, metric: &BlockMetric) -> Vec<usize> {
    match family {
        Family::Triangle => (0..3)
            .map(|i| {
                metric
                    .graph
                    .index_of(&repeat_digit(i, m + 1))
                    .expect("corner exists")
            })
            .collect(),
        Family::Generalized(_) => Vec::new(),
    }
}

/// Sum of certificate deficits of `candidate` as a block of `family` at dimension `m`.
///
/// Zero exactly when every structural condition of the certifier holds.
pub fn penalty(family: &Family, m: usize, candidate: &Coloring) -> Result<u64> {
    let metric = metric_for(family, m)?;
    let colors = candidate.to_indexed(&metric.graph)?;
    if let Some(v) = colors.iter().position(|&c| c == 0) {
        return Err(Error::InvalidBlockColoring(format!(
            "{} is uncolored",
            metric.graph.label(v)
        )));
    }
    let n = metric.len();
    let mut total = 0u64;
    for a in 0..n {
        total += deficit(colors[a], metric.copies[a]) as u64;
        for b in a + 1..n {
            if colors[a] == colors[b] {
                total += deficit(colors[a], metric.pair(a, b)) as u64;
            }
        }
    }
    let pinned = pinned_positions(family, m, &metric);
    if let Some(&first) = pinned.first() {
        total += pinned
            .iter()
            .filter(|&&v| colors[v] != colors[first])
            .count() as u64;
    }
    Ok(total)
}

struct Shared<'a> {
    cfg: &'a SearchConfig,
    metric: &'a BlockMetric,
    dist: Vec<u16>,
    /// Largest color each position can take without clashing with its own copies.
    cap: Vec<u32>,
    pinned: Vec<bool>,
}

impl Shared<'_> {
    fn certify(&self, colors: &[u32]) -> Option<Coloring> {
        let block = Coloring::from_indexed(&self.metric.graph, colors);
        let report = match &self.cfg.family {
            Family::Triangle => certify_triangle_tiling(self.cfg.m, &block, self.cfg.certify_depth),
            Family::Generalized(g) => certify_generalized_tiling(
                g,
                self.cfg.m,
                &block,
                CertMode::Refined,
                self.cfg.certify_depth,
            ),
        };
        match report {
            Ok(r) if r.status == CertStatus::Certified => Some(block),
            _ => None,
        }
    }
}

struct State<'a> {
    sh: &'a Shared<'a>,
    n: usize,
    width: usize,
    k: u32,
    color: Vec<u32>,
    /// `conf[v * width + c]`: deficits of `v` against the positions colored `c`.
    conf: Vec<u32>,
    bad: Vec<usize>,
    slot: Vec<usize>,
    penalty: u64,
}

impl<'a> State<'a> {
    fn new(sh: &'a Shared<'a>, k: u32) -> Self {
        let n = sh.metric.len();
        let width = k as usize + 1;
        Self {
            sh,
            n,
            width,
            k,
            color: vec![0; n],
            conf: vec![0; n * width],
            bad: Vec::new(),
            slot: vec![usize::MAX; n],
            penalty: 0,
        }
    }

    fn top(&self, v: usize) -> u32 {
        self.k.min(self.sh.cap[v])
    }

    fn cost(&self, v: usize, c: u32) -> u32 {
        self.conf[v * self.width + c as usize] + deficit(c, self.sh.metric.copies[v])
    }

    fn refresh(&mut self, u: usize) {
        let c = self.color[u];
        let is_bad = c > 0 && self.cost(u, c) > 0;
        let present = self.slot[u] != usize::MAX;
        if is_bad && !present {
            self.slot[u] = self.bad.len();
            self.bad.push(u);
        } else if !is_bad && present {
            let i = self.slot[u];
            self.bad.swap_remove(i);
            if i < self.bad.len() {
                self.slot[self.bad[i]] = i;
            }
            self.slot[u] = usize::MAX;
        }
    }

    fn set(&mut self, v: usize, c: u32) {
        let old = self.color[v];
        if old == c {
            return;
        }
        if old > 0 {
            self.penalty -= self.cost(v, old) as u64;
        }
        if c > 0 {
            self.penalty += self.cost(v, c) as u64;
        }
        self.color[v] = c;
        let row = &self.sh.dist[v * self.n..(v + 1) * self.n];
        for u in 0..self.n {
            let d = row[u];
            let base = u * self.width;
            if old > 0 {
                self.conf[base + old as usize] -= deficit(old, d);
            }
            if c > 0 {
                self.conf[base + c as usize] += deficit(c, d);
            }
        }
        for u in 0..self.n {
            if self.color[u] == old || self.color[u] == c || u == v {
                self.refresh(u);
            }
        }
    }

    fn best_color(&self, v: usize, rng: &mut ChaCha8Rng, exclude: u32) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32)> = None;
        let mut ties = 0u32;
        for c in 1..=self.top(v) {
            if c == exclude {
                continue;
            }
            let x = self.cost(v, c);
            match best {
                Some((_, b)) if x > b => {}
                Some((_, b)) if x == b => {
                    ties += 1;
                    if rng.random_range(0..ties + 1) == 0 {
                        best = Some((c, x));
                    }
                }
                _ => {
                    best = Some((c, x));
                    ties = 0;
                }
            }
        }
        best
    }

    fn greedy(&mut self, rng: &mut ChaCha8Rng) {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.sh.metric.copies[v]));
        for v in order {
            let c = if self.sh.pinned[v] {
                1
            } else {
                let free = (1..=self.top(v)).find(|&c| self.cost(v, c) == 0);
                match free {
                    Some(c) => c,
                    None => self.best_color(v, rng, 0).map_or(1, |(c, _)| c),
                }
            };
            self.set(v, c);
        }
    }

    fn class(&self, c: u32) -> Vec<usize> {
        (0..self.n).filter(|&v| self.color[v] == c).collect()
    }

    fn pair_sum(&self, members: &[usize], c: u32) -> u64 {
        let mut s = 0u64;
        for (i, &a) in members.iter().enumerate() {
            s += deficit(c, self.sh.metric.copies[a]) as u64;
            for &b in &members[i + 1..] {
                s += deficit(c, self.sh.dist[a * self.n + b]) as u64;
            }
        }
        s
    }

    /// Penalty change of exchanging classes `a` and `b`, if allowed.
    fn swap_delta(&self, a: u32, b: u32) -> Option<(i64, Vec<usize>, Vec<usize>)> {
        let ca = self.class(a);
        let cb = self.class(b);
        let fits = |s: &[usize], c: u32| s.iter().all(|&v| !self.sh.pinned[v] && self.top(v) >= c);
        if !fits(&ca, b) || !fits(&cb, a) {
            return None;
        }
        let old = self.pair_sum(&ca, a) + self.pair_sum(&cb, b);
        let new = self.pair_sum(&ca, b) + self.pair_sum(&cb, a);
        Some((new as i64 - old as i64, ca, cb))
    }

    /// Moves every position colored `k` to its cheapest lower color.
    fn lower(&mut self, rng: &mut ChaCha8Rng) {
        let top = self.k;
        self.k -= 1;
        for v in self.class(top) {
            let c = self.best_color(v, rng, 0).map_or(1, |(c, _)| c);
            self.set(v, c);
        }
    }
}

struct RestartResult {
    certified: Option<(u32, Coloring)>,
    best: Coloring,
    best_penalty: u64,
    history: Vec<(u64, u64)>,
    moves: u64,
}

fn accept(delta: i64, temperature: f64, rng: &mut ChaCha8Rng) -> bool {
    delta <= 0 || (temperature > 0.0 && rng.random::<f64>() < (-(delta as f64) / temperature).exp())
}

fn run_restart(sh: &Shared<'_>, restart: u32) -> RestartResult {
    let cfg = sh.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let deadline = cfg.time_limit.and_then(|t| Instant::now().checked_add(t));
    let mut st = State::new(sh, cfg.max_color);
    st.greedy(&mut rng);

    let free: Vec<usize> = (0..st.n).filter(|&v| !sh.pinned[v]).collect();
    let total_weight = cfg.weights.recolor + cfg.weights.swap;
    let mut certified: Option<(u32, Coloring)> = None;
    let mut best_colors = st.color.clone();
    let mut best_penalty = st.penalty;
    let mut level_best = st.penalty;
    let mut history = vec![(0, st.penalty)];
    let mut temperature = cfg.initial_temperature;
    let mut idle = 0u64;
    let mut iter = 0u64;

    while iter < cfg.iterations {
        if st.penalty == 0 {
            match sh.certify(&st.color) {
                Some(block) => {
                    certified = Some((block.max_color(), block));
                    best_penalty = 0;
                    best_colors = st.color.clone();
                    history.push((iter, 0));
                }
                None => break,
            }
            if st.k <= 1 {
                break;
            }
            st.lower(&mut rng);
            level_best = st.penalty;
            idle = 0;
            temperature = cfg.initial_temperature;
            continue;
        }
        if free.is_empty() {
            break;
        }
        iter += 1;
        if iter % 4096 == 0 && deadline.is_some_and(|d| Instant::now() > d) {
            break;
        }
        if rng.random::<f64>() * total_weight < cfg.weights.swap && st.k >= 3 {
            let a = rng.random_range(2..=st.k);
            let b = rng.random_range(2..=st.k);
            if a != b {
                if let Some((delta, ca, cb)) = st.swap_delta(a, b) {
                    if accept(delta, temperature, &mut rng) {
                        for v in ca {
                            st.set(v, b);
                        }
                        for v in cb {
                            st.set(v, a);
                        }
                    }
                }
            }
        } else {
            let v = if !st.bad.is_empty() && rng.random::<f64>() < cfg.weights.focus {
                st.bad[rng.random_range(0..st.bad.len())]
            } else {
                free[rng.random_range(0..free.len())]
            };
            if !sh.pinned[v] {
                let cur = st.color[v];
                let top = st.top(v);
                let pick = if top >= 2 && rng.random::<f64>() < cfg.weights.noise {
                    let mut c = rng.random_range(1..top);
                    if c >= cur {
                        c += 1;
                    }
                    Some((c, st.cost(v, c)))
                } else {
                    st.best_color(v, &mut rng, cur)
                };
                if let Some((c, x)) = pick {
                    let delta = x as i64 - st.cost(v, cur) as i64;
                    if accept(delta, temperature, &mut rng) {
                        st.set(v, c);
                    }
                }
            }
        }
        temperature *= cfg.cooling;
        if st.penalty < level_best {
            level_best = st.penalty;
            idle = 0;
            if certified.is_none() && st.penalty < best_penalty {
                best_penalty = st.penalty;
                best_colors = st.color.clone();
                history.push((iter, st.penalty));
            }
        } else {
            idle += 1;
            if idle >= cfg.stagnation {
                idle = 0;
                temperature = cfg.initial_temperature;
            }
        }
    }

    let best = match &certified {
        Some((_, c)) => c.clone(),
        None => Coloring::from_indexed(&sh.metric.graph, &best_colors),
    };
    RestartResult {
        certified,
        best,
        best_penalty,
        history,
        moves: iter,
    }
}

/// Searches for a block coloring that the certifier accepts, lowering the
/// color budget after each success.
pub fn search_certified_coloring(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let metric = metric_for(&cfg.family, cfg.m)?;
    let n = metric.len();
    let mut dist = vec![u16::MAX; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                dist[a * n + b] = metric.pair(a, b);
            }
        }
    }
    let mut pinned = vec![false; n];
    for v in pinned_positions(&cfg.family, cfg.m, &metric) {
        pinned[v] = true;
    }
    let cap = (0..n)
        .map(|v| {
            if pinned[v] {
                1
            } else {
                (metric.copies[v] as u32).saturating_sub(1).max(1)
            }
        })
        .collect();
    let sh = Shared {
        cfg,
        metric: &metric,
        dist,
        cap,
        pinned,
    };
    let results: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&sh, r))
        .collect();
    let moves = results.iter().map(|r| r.moves).sum();
    let (restart, win) = results
        .into_iter()
        .enumerate()
        .min_by_key(|(i, r)| {
            let bound = r.certified.as_ref().map_or(u32::MAX, |(b, _)| *b);
            (bound, r.best_penalty, *i)
        })
        .expect("at least one restart");
    Ok(SearchOutcome {
        certified_bound: win.certified.as_ref().map(|(b, _)| *b),
        best: win.best,
        best_penalty: win.best_penalty,
        restart: restart as u32,
        history: win.history,
        iterations: moves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::sierpinski::BaseGraph;
    use crate::{tile_coloring, verify_packing_coloring};

    fn k13() -> Family {
        Family::Generalized(BaseGraph::library("K13").unwrap())
    }

    #[test]
    fn certified_blocks_score_zero() {
        let fig7 = data::coloring("fig7_s2k13.coloring").unwrap();
        assert_eq!(penalty(&k13(), 2, &fig7).unwrap(), 0);
        let c4 = Family::Generalized(BaseGraph::library("C4").unwrap());
        let fig5 = data::coloring("fig5_s3c4.coloring").unwrap();
        assert_eq!(penalty(&c4, 3, &fig5).unwrap(), 0);
    }

    #[test]
    fn fig14_scores_positive() {
        let fig14 = data::coloring("fig14_st2.coloring").unwrap();
        assert!(penalty(&Family::Triangle, 2, &fig14).unwrap() > 0);
    }

    #[test]
    fn uncolored_rejected() {
        let mut c = data::coloring("fig7_s2k13.coloring").unwrap();
        c = c
            .iter()
            .filter(|(l, _)| *l != "00")
            .map(|(l, x)| (l.to_string(), x))
            .collect();
        assert!(matches!(
            penalty(&k13(), 2, &c),
            Err(Error::InvalidBlockColoring(_))
        ));
    }

    #[test]
    fn k13_rediscovers_three() {
        let mut cfg = SearchConfig::new(k13(), 2, 3);
        cfg.iterations = 20_000;
        let out = search_certified_coloring(&cfg).unwrap();
        assert_eq!(out.certified_bound, Some(3));
        assert_eq!(out.best_penalty, 0);
        assert_eq!(penalty(&k13(), 2, &out.best).unwrap(), 0);
    }

    #[test]
    fn one_color_fails() {
        let mut cfg = SearchConfig::new(k13(), 2, 1);
        cfg.iterations = 2_000;
        let out = search_certified_coloring(&cfg).unwrap();
        assert_eq!(out.certified_bound, None);
        assert!(out.best_penalty > 0);
    }

    #[test]
    fn deterministic() {
        let mut cfg = SearchConfig::new(Family::Triangle, 2, 12);
        cfg.iterations = 5_000;
        cfg.seed = 7;
        cfg.restarts = 2;
        assert_eq!(
            search_certified_coloring(&cfg).unwrap(),
            search_certified_coloring(&cfg).unwrap()
        );
    }

    #[test]
    fn triangle_result_tiles() {
        let mut cfg = SearchConfig::new(Family::Triangle, 5, 31);
        cfg.iterations = 3_000_000;
        cfg.seed = 2;
        let out = search_certified_coloring(&cfg).unwrap();
        let b = out.certified_bound.expect("certified");
        assert!(b <= 31);
        for n in 6..=7 {
            let tiled = tile_coloring(&Family::Triangle, 5, &out.best, n).unwrap();
            let g = Family::Triangle.graph(n).unwrap();
            assert!(verify_packing_coloring(&g, &tiled).unwrap().ok());
            assert_eq!(tiled.max_color(), b);
        }
    }

    #[test]
    fn bad_config() {
        let mut cfg = SearchConfig::new(Family::Triangle, 0, 5);
        assert!(matches!(
            search_certified_coloring(&cfg),
            Err(Error::DimensionOutOfRange { .. })
        ));
        cfg.m = 2;
        cfg.max_color = 0;
        assert!(matches!(
            search_certified_coloring(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }
}
