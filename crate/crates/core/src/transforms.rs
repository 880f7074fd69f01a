//! The `k`-closure and the Kelmans transformation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{normalize, Edge, EdgeSet, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("Kelmans transformation needs two distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error("vertex {vertex} out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("closure parameter must be at least 1")]
    BadParameter,
    #[error("scan order must list every pair of 0..{0} exactly once")]
    BadScanOrder(usize),
}

/// Edges added by a closure, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureTrace {
    pub k: usize,
    pub added: Vec<Edge>,
}

impl ClosureTrace {
    /// Re-applies the added edges to `g`, checking the degree-sum rule at
    /// every step. Returns `None` if some step was not justified.
    pub fn replay(&self, g: &Graph) -> Option<Graph> {
        let mut deg = g.degrees().to_vec();
        let mut adj: Vec<Vec<bool>> = (0..g.n()).map(|u| (0..g.n()).map(|v| g.has_edge(u, v)).collect()).collect();
        for &(u, v) in &self.added {
            if u >= g.n() || v >= g.n() || u == v || adj[u][v] || deg[u] + deg[v] < self.k {
                return None;
            }
            adj[u][v] = true;
            adj[v][u] = true;
            deg[u] += 1;
            deg[v] += 1;
        }
        g.add_edges(&self.added.iter().copied().collect::<EdgeSet>()).ok()
    }
}

/// `cl_k(G)` scanning pairs lexicographically and restarting after each
/// addition: the next added pair is always the lexicographically smallest
/// nonadjacent pair whose current degree sum is at least `k`.
pub fn closure(g: &Graph, k: usize) -> Result<(Graph, ClosureTrace), TransformError> {
    let n = g.n();
    let order: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    closure_with_scan_order(g, k, &order)
}

/// Closure with an explicit pair scan order; `order` must list every pair
/// exactly once. Semantics are "scan from the start, add the first
/// qualifying pair, restart".
pub fn closure_with_scan_order(g: &Graph, k: usize, order: &[Edge]) -> Result<(Graph, ClosureTrace), TransformError> {
    if k == 0 {
        return Err(TransformError::BadParameter);
    }
    let n = g.n();
    if order.len() != n * (n - 1) / 2 {
        return Err(TransformError::BadScanOrder(n));
    }
    let mut pos = vec![usize::MAX; n * n];
    for (i, &(a, b)) in order.iter().enumerate() {
        let (u, v) = normalize(a, b);
        if u == v || v >= n || pos[u * n + v] != usize::MAX {
            return Err(TransformError::BadScanOrder(n));
        }
        pos[u * n + v] = i;
    }
    let mut adj: Vec<bool> = vec![false; n * n];
    for (u, v) in g.edges() {
        adj[u * n + v] = true;
        adj[v * n + u] = true;
    }
    let mut deg = g.degrees().to_vec();
    let mut added = Vec::new();
    // pairs before the scan cursor that became eligible after the cursor passed them
    let mut pending: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
    let mut cursor = 0;
    let eligible = |adj: &[bool], deg: &[usize], (u, v): Edge| !adj[u * n + v] && deg[u] + deg[v] >= k;
    loop {
        while let Some(&Reverse(i)) = pending.peek() {
            if adj[order[i].0 * n + order[i].1] {
                pending.pop();
            } else {
                break;
            }
        }
        while cursor < order.len() && !eligible(&adj, &deg, order[cursor]) {
            cursor += 1;
        }
        let from_pending = pending.peek().map(|r| r.0).filter(|&p| p < cursor);
        let next = match from_pending {
            Some(p) => {
                pending.pop();
                p
            }
            None if cursor < order.len() => {
                cursor += 1;
                cursor - 1
            }
            None => break,
        };
        let (u, v) = normalize(order[next].0, order[next].1);
        adj[u * n + v] = true;
        adj[v * n + u] = true;
        deg[u] += 1;
        deg[v] += 1;
        added.push((u, v));
        for &a in &[u, v] {
            for w in 0..n {
                if w == a {
                    continue;
                }
                let (p, q) = normalize(a, w);
                let i = pos[p * n + q];
                if i < cursor && eligible(&adj, &deg, (p, q)) {
                    pending.push(Reverse(i));
                }
            }
        }
    }
    let out = g
        .add_edges(&added.iter().copied().collect::<EdgeSet>())
        .expect("closure adds only non-edges");
    Ok((out, ClosureTrace { k, added }))
}

/// `G* = G − {vx : x ∈ N(v) \ N[u]} + {ux : x ∈ N(v) \ N[u]}`.
pub fn kelmans(g: &Graph, u: usize, v: usize) -> Result<Graph, TransformError> {
    let n = g.n();
    for w in [u, v] {
        if w >= n {
            return Err(TransformError::VertexOutOfRange { vertex: w, n });
        }
    }
    if u == v {
        return Err(TransformError::SameVertex(u));
    }
    let moved: Vec<usize> = g.neighbors(v).filter(|&x| x != u && !g.has_edge(u, x)).collect();
    let remove: EdgeSet = moved.iter().map(|&x| (v, x)).collect();
    let add: EdgeSet = moved.iter().map(|&x| (u, x)).collect();
    let h = g.delete_edges(&remove).expect("moved edges exist");
    Ok(h.add_edges(&add).expect("moved edges are new at u"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let (h, t) = closure(&c4, 5).unwrap();
        assert_eq!(h, c4);
        assert!(t.added.is_empty());

        let k5e = Graph::complete(5).unwrap().delete_edges(&EdgeSet::from_pairs([(1, 3)]).unwrap()).unwrap();
        let (h, t) = closure(&k5e, 6).unwrap();
        assert_eq!(h, Graph::complete(5).unwrap());
        assert_eq!(t.added, vec![(1, 3)]);

        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(closure(&c5, 6).unwrap().0, c5);
    }

    #[test]
    fn closure_trace_replays() {
        // path 0-1-2-3-4 plus chord 1-3: degrees 1,3,2,3,1
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
        let (h, t) = closure(&g, 4).unwrap();
        assert_eq!(t.replay(&g), Some(h.clone()));
        assert!(h.non_edges().all(|(a, b)| h.degree(a) + h.degree(b) < 4));
        // the first addition is the lexicographically first eligible pair
        assert_eq!(t.added[0], (0, 3));
        let idem = closure(&h, 4).unwrap().1;
        assert!(idem.added.is_empty());
    }

    #[test]
    fn restart_revisits_earlier_pairs() {
        // later additions raise degrees of pairs the scan has already passed
        let g = Graph::from_edges(6, [(0, 1), (0, 4), (0, 5), (2, 4), (3, 4), (3, 5), (1, 3)]).unwrap();
        let (_, t) = closure(&g, 5).unwrap();
        let lexi = naive_closure(&g, 5);
        assert_eq!(t.added, lexi);
    }

    fn naive_closure(g: &Graph, k: usize) -> Vec<Edge> {
        let mut h = g.clone();
        let mut added = vec![];
        'outer: loop {
            for (u, v) in h.non_edges().collect::<Vec<_>>() {
                if h.degree(u) + h.degree(v) >= k {
                    h = h.add_edges(&EdgeSet::from_pairs([(u, v)]).unwrap()).unwrap();
                    added.push((u, v));
                    continue 'outer;
                }
            }
            break;
        }
        added
    }

    #[test]
    fn closure_matches_naive_restart_scan() {
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..300 {
            let n = 3 + rng.below_usize(9);
            let p = rng.next_f64();
            let g = crate::random::gnp(&mut rng, n, p);
            let k = 1 + rng.below_usize(2 * n);
            assert_eq!(closure(&g, k).unwrap().1.added, naive_closure(&g, k));
        }
    }

    #[test]
    fn kelmans_examples() {
        let p3 = Graph::path(3).unwrap();
        assert_eq!(kelmans(&p3, 0, 2).unwrap(), p3);
        // C4 on 1-2-3-4-1 relabeled to 0-1-2-3-0; u = 0, v = 1 moves 12 to 02
        let c4 = Graph::cycle(4).unwrap();
        let h = kelmans(&c4, 0, 1).unwrap();
        assert_eq!(h, Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap());
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(kelmans(&k4, 2, 3).unwrap(), k4);
        assert_eq!(kelmans(&k4, 2, 2), Err(TransformError::SameVertex(2)));
    }

    #[test]
    fn kelmans_preserves_uv_adjacency_and_other_degrees() {
        let mut rng = crate::rng::SplitMix64::new(5);
        for _ in 0..200 {
            let n = 2 + rng.below_usize(10);
            let g = crate::random::gnp(&mut rng, n, 0.4);
            let u = rng.below_usize(n);
            let v = (u + 1 + rng.below_usize(n - 1)) % n;
            let h = kelmans(&g, u, v).unwrap();
            assert_eq!(h.has_edge(u, v), g.has_edge(u, v));
            assert_eq!(h.m(), g.m());
            for x in (0..n).filter(|&x| x != u && x != v) {
                assert_eq!(h.degree(x), g.degree(x));
            }
            assert_eq!(h.degree(u) + h.degree(v), g.degree(u) + g.degree(v));
        }
    }
}
