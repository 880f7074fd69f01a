//! Random graph models driven by [`SplitMix64`].
//!
//! Draw order is part of the contract so that runs are reproducible from a
//! seed: `gnp` visits pairs `(i, j)`, `i < j`, lexicographically and keeps a
//! pair when `next_f64() < p`; `gnm` takes the first `m` positions of a
//! partial Fisher-Yates shuffle over the lexicographic pair list.

use crate::graph::{Edge, Graph};
use crate::rng::SplitMix64;

fn all_pairs(n: usize) -> Vec<Edge> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn gnp(rng: &mut SplitMix64, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for (i, j) in all_pairs(n) {
        if rng.next_f64() < p {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, edges).expect("distinct in-range pairs")
}

/// `m` must not exceed `n(n-1)/2`.
pub fn gnm(rng: &mut SplitMix64, n: usize, m: usize) -> Graph {
    let pairs = all_pairs(n);
    let picked = rng.sample_indices(pairs.len(), m);
    Graph::from_edges(n, picked.into_iter().map(|i| pairs[i])).expect("distinct in-range pairs")
}

/// A connected graph: vertex `i >= 1` attaches to `below(i)`, then every
/// remaining pair is added with probability `p`.
pub fn connected(rng: &mut SplitMix64, n: usize, p: f64) -> Graph {
    let mut tree = vec![false; n * n];
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.below_usize(i);
        tree[j * n + i] = true;
        edges.push((j, i));
    }
    for (i, j) in all_pairs(n) {
        if !tree[i * n + j] && rng.next_f64() < p {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, edges).expect("distinct in-range pairs")
}

/// Applies a uniformly random relabeling; returns the graph and `perm`
/// with old vertex `v` now called `perm[v]`.
pub fn relabel(rng: &mut SplitMix64, g: &Graph) -> (Graph, Vec<usize>) {
    let perm = rng.permutation(g.n());
    (g.relabel(&perm).expect("permutation"), perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let a = gnp(&mut SplitMix64::new(3), 12, 0.5);
        let b = gnp(&mut SplitMix64::new(3), 12, 0.5);
        assert_eq!(a, b);
        assert_eq!(gnm(&mut SplitMix64::new(9), 10, 17).m(), 17);
    }

    #[test]
    fn connected_model_is_connected() {
        let mut rng = SplitMix64::new(1);
        for n in 1..40 {
            assert!(connected(&mut rng, n, 0.05).is_connected());
        }
    }
}
