use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::mis::{clique_number, counting_lower_bound, packing_capacities, MIS_LIMIT};
use super::{
    greedy_packing_coloring, verify_packing_coloring, ColorConstraints, Coloring, GreedyOrder,
};

/// Largest color count the exact search handles.
pub const MAX_COLORS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Sat(Coloring),
    Unsat,
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Exact,
    Bounds,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub lower: u32,
    pub upper: u32,
    pub witness: Option<Coloring>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

enum Outcome {
    Found,
    Exhausted,
    OutOfTime,
}

struct Solver {
    k: u32,
    /// Per vertex: other vertices within distance `k`, nearest first.
    balls: Vec<Vec<u32>>,
    /// `ends[v][d]`: count of ball entries at distance `<= d`.
    ends: Vec<Vec<u32>>,
    degree: Vec<u32>,
    domain: Vec<u128>,
    color: Vec<u32>,
    trail: Vec<(u32, u32)>,
    used: Vec<u32>,
    caps: Vec<u32>,
    /// Colors that any two vertices are too close for and no constraint names.
    free_colors: u128,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

fn bit(c: u32) -> u128 {
    1u128 << (c - 1)
}

impl Solver {
    fn new(
        g: &Graph,
        k: u32,
        constraints: &ColorConstraints,
        caps: Option<Vec<u32>>,
        deadline: Option<Instant>,
    ) -> Result<Option<Self>> {
        let n = g.vertex_count();
        let full: u128 = if k == 128 {
            u128::MAX
        } else {
            (1u128 << k) - 1
        };
        let mut domain = vec![full; n];
        for (l, &c) in &constraints.required {
            let v = g.require(l)?;
            let banned = constraints.forbidden.get(l).is_some_and(|s| s.contains(&c));
            if c == 0 || c > k || banned {
                return Err(Error::InfeasibleConstraints(l.clone()));
            }
            domain[v] = bit(c);
        }
        for (l, cs) in &constraints.forbidden {
            let v = g.require(l)?;
            for &c in cs {
                if (1..=k).contains(&c) {
                    domain[v] &= !bit(c);
                }
            }
        }
        if domain.iter().any(|&d| d == 0) {
            return Ok(None);
        }
        let mut balls = Vec::with_capacity(n);
        let mut ends = Vec::with_capacity(n);
        let mut scratch = crate::graph::BallScratch::new(n);
        for v in 0..n {
            let ball = scratch.ball(g, v, k);
            let mut e = vec![0u32; k as usize + 1];
            for &(_, d) in &ball[1..] {
                e[d as usize] += 1;
            }
            for d in 1..e.len() {
                e[d] += e[d - 1];
            }
            balls.push(ball[1..].iter().map(|&(w, _)| w).collect());
            ends.push(e);
        }
        let diam = if g.is_connected() {
            g.diameter()?
        } else {
            u32::MAX
        };
        let mentioned = constraints.mentioned();
        let mut free_colors = 0u128;
        for c in 1..=k {
            if c >= diam && !mentioned.contains(&c) {
                free_colors |= bit(c);
            }
        }
        let caps = caps.unwrap_or_else(|| vec![n as u32; k as usize + 1]);
        Ok(Some(Self {
            k,
            balls,
            ends,
            degree: (0..n).map(|v| g.degree(v) as u32).collect(),
            domain,
            color: vec![0; n],
            trail: Vec::new(),
            used: vec![0; k as usize + 1],
            caps,
            free_colors,
            nodes: 0,
            deadline,
            timed_out: false,
        }))
    }

    fn pick_vertex(&self) -> Option<usize> {
        let mut best: Option<(u32, u32, usize)> = None;
        for v in 0..self.color.len() {
            if self.color[v] != 0 {
                continue;
            }
            let size = self.domain[v].count_ones();
            let better = match best {
                None => true,
                Some((bs, bd, _)) => size < bs || (size == bs && self.degree[v] > bd),
            };
            if better {
                best = Some((size, self.degree[v], v));
            }
        }
        best.map(|(_, _, v)| v)
    }

    /// Colors `v` with `c`, pruning `c` from the ball; false on a wipe-out.
    fn assign(&mut self, v: usize, c: u32) -> bool {
        self.color[v] = c;
        self.used[c as usize] += 1;
        let b = bit(c);
        let mut ok = true;
        let reach = self.ends[v][c.min(self.k) as usize] as usize;
        for i in 0..reach {
            let w = self.balls[v][i] as usize;
            if self.color[w] == 0 && self.domain[w] & b != 0 {
                self.domain[w] &= !b;
                self.trail.push((w as u32, c));
                if self.domain[w] == 0 {
                    ok = false;
                }
            }
        }
        ok
    }

    fn undo(&mut self, v: usize, mark: usize) {
        let c = self.color[v];
        self.used[c as usize] -= 1;
        self.color[v] = 0;
        while self.trail.len() > mark {
            let (w, c) = self.trail.pop().expect("trail above mark");
            self.domain[w as usize] |= bit(c);
        }
    }

    fn capacity_ok(&self, open: usize) -> bool {
        let mut reachable = vec![0u32; self.k as usize + 1];
        for v in 0..self.color.len() {
            if self.color[v] == 0 {
                let mut d = self.domain[v];
                while d != 0 {
                    let c = d.trailing_zeros() + 1;
                    d &= d - 1;
                    reachable[c as usize] += 1;
                }
            }
        }
        let mut room = 0usize;
        for c in 1..=self.k as usize {
            room += self.caps[c].saturating_sub(self.used[c]).min(reachable[c]) as usize;
        }
        room >= open
    }

    fn search(&mut self, open: usize) -> Outcome {
        if open == 0 {
            return Outcome::Found;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return Outcome::OutOfTime;
        }
        if !self.capacity_ok(open) {
            return Outcome::Exhausted;
        }
        let v = self.pick_vertex().expect("open vertices remain");
        let mut cands = self.domain[v];
        let free = cands & self.free_colors;
        if free != 0 {
            cands &= !self.free_colors;
            cands |= free & free.wrapping_neg();
        }
        while cands != 0 {
            let c = cands.trailing_zeros() + 1;
            cands &= cands - 1;
            let mark = self.trail.len();
            if self.assign(v, c) {
                match self.search(open - 1) {
                    Outcome::Found => return Outcome::Found,
                    Outcome::OutOfTime => {
                        self.undo(v, mark);
                        return Outcome::OutOfTime;
                    }
                    Outcome::Exhausted => {}
                }
            }
            self.undo(v, mark);
        }
        Outcome::Exhausted
    }
}

fn decide(
    g: &Graph,
    k: u32,
    constraints: &ColorConstraints,
    caps: Option<Vec<u32>>,
    deadline: Option<Instant>,
    nodes: &mut u64,
) -> Result<Decision> {
    if k > MAX_COLORS {
        return Err(Error::TooLarge {
            n: k as usize,
            limit: MAX_COLORS as usize,
        });
    }
    let n = g.vertex_count();
    if k == 0 {
        return Ok(if n == 0 {
            Decision::Sat(Coloring::new())
        } else {
            Decision::Unsat
        });
    }
    let Some(mut s) = Solver::new(g, k, constraints, caps, deadline)? else {
        return Ok(Decision::Unsat);
    };
    let outcome = s.search(n);
    *nodes += s.nodes;
    Ok(match outcome {
        Outcome::Found => {
            let c = Coloring::from_indexed(g, &s.color);
            debug_assert!(verify_packing_coloring(g, &c)
                .map(|r| r.ok())
                .unwrap_or(false));
            Decision::Sat(c)
        }
        Outcome::Exhausted => Decision::Unsat,
        Outcome::OutOfTime => Decision::Timeout,
    })
}

/// Exact decision: is there a packing coloring with colors `1..=k` meeting `constraints`?
pub fn is_packing_k_colorable(
    g: &Graph,
    k: u32,
    constraints: &ColorConstraints,
    budget: Duration,
) -> Result<Decision> {
    let deadline = Instant::now().checked_add(budget);
    let caps = if g.vertex_count() <= MIS_LIMIT && k >= 1 && k <= MAX_COLORS {
        match packing_capacities(g, k, deadline) {
            Ok(c) => Some(c),
            Err(Error::Timeout) => return Ok(Decision::Timeout),
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut nodes = 0;
    decide(g, k, constraints, caps, deadline, &mut nodes)
}

/// Packing chromatic number, or bracketing bounds when the budget runs out.
pub fn chi_rho(g: &Graph, budget: Duration) -> Result<SolveResult> {
    let start = Instant::now();
    let deadline = start.checked_add(budget);
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = g.vertex_count();
    let mut witness = greedy_packing_coloring(g, &GreedyOrder::DegreeDesc, 0);
    let by_label = greedy_packing_coloring(g, &GreedyOrder::Label, 0);
    if by_label.max_color() < witness.max_color() {
        witness = by_label;
    }
    let mut upper = witness.max_color();
    let mut lower = if n <= MIS_LIMIT {
        counting_lower_bound(g)?
    } else {
        clique_number(g) as u32
    }
    .max(u32::from(n > 0));
    let caps_limit = (upper.saturating_sub(1)).min(MAX_COLORS);
    let caps = if n <= MIS_LIMIT && caps_limit >= 1 {
        Some(packing_capacities(g, caps_limit, deadline)?)
    } else {
        None
    };
    let mut nodes = 0;
    let mut status = SolveStatus::Exact;
    while lower < upper {
        if lower > MAX_COLORS {
            status = SolveStatus::Bounds;
            break;
        }
        let caps_k = caps.as_ref().map(|c| c[..=lower as usize].to_vec());
        match decide(
            g,
            lower,
            &ColorConstraints::none(),
            caps_k,
            deadline,
            &mut nodes,
        )? {
            Decision::Sat(c) => {
                upper = c.max_color();
                witness = c;
            }
            Decision::Unsat => lower += 1,
            Decision::Timeout => {
                status = SolveStatus::Timeout;
                break;
            }
        }
    }
    Ok(SolveResult {
        status,
        lower,
        upper,
        witness: Some(witness),
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}
