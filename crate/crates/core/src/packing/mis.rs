use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Vertex limit for the bitset-based exact routines.
pub const MIS_LIMIT: usize = 60;

struct CliqueSearch<'a> {
    adj: &'a [u64],
    best: usize,
    deadline: Option<Instant>,
    steps: u64,
    timed_out: bool,
}

impl CliqueSearch<'_> {
    /// Greedy coloring of `p`; returns vertices in color order with their color numbers.
    fn color_sort(&self, mut p: u64) -> (Vec<u32>, Vec<u32>) {
        let mut order = Vec::with_capacity(p.count_ones() as usize);
        let mut colors = Vec::with_capacity(order.capacity());
        let mut k = 0;
        while p != 0 {
            k += 1;
            let mut q = p;
            while q != 0 {
                let v = q.trailing_zeros();
                q &= !(1u64 << v);
                q &= !self.adj[v as usize];
                p &= !(1u64 << v);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, size: usize, mut p: u64) {
        self.steps += 1;
        if self.steps % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        let (order, colors) = self.color_sort(p);
        for idx in (0..order.len()).rev() {
            if size + colors[idx] as usize <= self.best {
                return;
            }
            let v = order[idx];
            let next = p & self.adj[v as usize];
            if next == 0 {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next);
            }
            p &= !(1u64 << v);
        }
    }
}

fn max_clique_masks(adj: &[u64], deadline: Option<Instant>) -> Result<usize> {
    let n = adj.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut s = CliqueSearch {
        adj,
        best: 0,
        deadline,
        steps: 0,
        timed_out: false,
    };
    s.expand(0, all);
    if s.timed_out {
        return Err(Error::Timeout);
    }
    Ok(s.best)
}

fn check_size(g: &Graph) -> Result<()> {
    let n = g.vertex_count();
    if n > MIS_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: MIS_LIMIT,
        });
    }
    Ok(())
}

/// Largest `i`-packing, as a maximum clique in the complement of the `i`-th distance power.
pub fn max_i_packing_size(g: &Graph, i: u32, budget: Duration) -> Result<usize> {
    check_size(g)?;
    let n = g.vertex_count();
    let adj: Vec<u64> = (0..n)
        .map(|v| {
            let near = g
                .ball(v, i)
                .into_iter()
                .fold(0u64, |m, (w, _)| m | 1u64 << w);
            let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            all & !near
        })
        .collect();
    max_clique_masks(&adj, Instant::now().checked_add(budget))
}

/// Clique number: exact up to [`MIS_LIMIT`] vertices, a greedy lower bound beyond.
pub fn clique_number(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    if n <= MIS_LIMIT {
        let adj: Vec<u64> = (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1u64 << w))
            .collect();
        return max_clique_masks(&adj, None).expect("no deadline");
    }
    (0..n)
        .map(|v| {
            let mut clique = vec![v];
            let mut cands: Vec<usize> = g.neighbors(v).iter().map(|&w| w as usize).collect();
            cands.sort_by_key(|&w| std::cmp::Reverse(g.degree(w)));
            for w in cands {
                if clique.iter().all(|&u| g.has_edge(u, w)) {
                    clique.push(w);
                }
            }
            clique.len()
        })
        .max()
        .unwrap_or(1)
}

/// Smallest color count not ruled out by class capacities, raised to the clique number.
pub fn counting_lower_bound(g: &Graph) -> Result<u32> {
    check_size(g)?;
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = g.vertex_count();
    if n == 0 {
        return Ok(0);
    }
    let caps = packing_capacities(g, n as u32, None)?;
    let mut covered = 0usize;
    let mut t = 1u32;
    for &cap in &caps[1..] {
        covered += cap as usize;
        if covered >= n {
            break;
        }
        t += 1;
    }
    Ok(t.max(clique_number(g) as u32))
}

/// `caps[i]` = largest `i`-packing for `1 <= i <= k`; index 0 unused.
pub(crate) fn packing_capacities(g: &Graph, k: u32, deadline: Option<Instant>) -> Result<Vec<u32>> {
    check_size(g)?;
    let diam = if g.is_connected() {
        g.diameter()?
    } else {
        u32::MAX
    };
    let mut caps = vec![0u32; k as usize + 1];
    for i in 1..=k {
        caps[i as usize] = if i >= diam && g.vertex_count() > 0 {
            1
        } else {
            let left = deadline.map(|d| d.saturating_duration_since(Instant::now()));
            max_i_packing_size(g, i, left.unwrap_or(Duration::MAX))? as u32
        };
    }
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sierpinski::{gen_sierpinski, gen_triangle};

    #[test]
    fn k4_values() {
        let k4 = gen_sierpinski(1, 4).unwrap();
        assert_eq!(max_i_packing_size(&k4, 1, Duration::MAX).unwrap(), 1);
        assert_eq!(clique_number(&k4), 4);
        assert_eq!(counting_lower_bound(&k4).unwrap(), 4);
    }

    #[test]
    fn st1_bound() {
        let g = gen_triangle(1).unwrap();
        let p: Vec<usize> = (1..=3)
            .map(|i| max_i_packing_size(&g, i, Duration::MAX).unwrap())
            .collect();
        assert_eq!(p, vec![3, 1, 1]);
        assert_eq!(counting_lower_bound(&g).unwrap(), 4);
    }

    #[test]
    fn st2_capacities() {
        let g = gen_triangle(2).unwrap();
        assert_eq!(max_i_packing_size(&g, 2, Duration::MAX).unwrap(), 3);
        for i in 4..7 {
            assert_eq!(max_i_packing_size(&g, i, Duration::MAX).unwrap(), 1);
        }
    }

    #[test]
    fn single_edge_bound() {
        let g = Graph::new(&["a", "b"], &[("a", "b")]).unwrap();
        assert_eq!(counting_lower_bound(&g).unwrap(), 2);
    }

    #[test]
    fn too_large() {
        let g = gen_sierpinski(3, 4).unwrap();
        assert!(matches!(
            max_i_packing_size(&g, 1, Duration::MAX),
            Err(Error::TooLarge { .. })
        ));
    }
}
