#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sierpack::Graph;

/// Connected graph on `n` vertices: a random tree plus each other pair with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((j, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let named: Vec<(String, String)> = edges
        .into_iter()
        .map(|(a, b)| (labels[a].clone(), labels[b].clone()))
        .collect();
    Graph::new(&labels, &named).unwrap()
}

pub fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn extend(d: &[Vec<u32>], colors: &mut Vec<u32>, k: u32) -> bool {
    let v = colors.len();
    if v == d.len() {
        return true;
    }
    for c in 1..=k {
        if (0..v).all(|u| colors[u] != c || d[u][v] > c) {
            colors.push(c);
            if extend(d, colors, k) {
                return true;
            }
            colors.pop();
        }
    }
    false
}

/// Packing chromatic number by plain backtracking in index order.
pub fn brute_chi(g: &Graph) -> u32 {
    let d = floyd_warshall(g);
    (1..=g.vertex_count() as u32)
        .find(|&k| extend(&d, &mut Vec::new(), k))
        .unwrap_or(0)
}
