//! Exhaustive small-graph corpora: one representative per isomorphism class.
//!
//! Graphs on `n` vertices are grown from graphs on `n − 1` vertices by adding
//! a vertex with every possible neighborhood and keeping one graph per
//! canonical form. The canonical form is the smallest adjacency bit string
//! over all orderings that respect a color refinement of the vertices, so it
//! is a complete isomorphism invariant.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::Graph;

/// Largest order with a canonical form in one `u64` (`C(11, 2) = 55`).
pub const MAX_CANON_ORDER: usize = 11;
/// Largest order the exhaustive generator accepts.
pub const MAX_CORPUS_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("order {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Stable refinement of the degree partition. Returns cells in an
/// isomorphism-invariant order.
fn refined_cells(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut color: Vec<usize> = vec![0; n];
    let mut classes = 1;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).map(|u| color[u]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut order: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        order.sort();
        order.dedup();
        let rank: BTreeMap<&(usize, Vec<usize>), usize> = order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let next: Vec<usize> = sigs.iter().map(|s| rank[s]).collect();
        let count = order.len();
        color = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let mut cells = vec![Vec::new(); classes];
    for v in 0..n {
        cells[color[v]].push(v);
    }
    cells
}

fn encode(g: &Graph, order: &[usize]) -> u64 {
    let mut code = 0u64;
    for j in 1..order.len() {
        for i in 0..j {
            code = (code << 1) | g.has_edge(order[i], order[j]) as u64;
        }
    }
    code
}

/// Canonical form of a graph with at most [`MAX_CANON_ORDER`] vertices:
/// equal iff the graphs are isomorphic.
pub fn canonical_form(g: &Graph) -> Result<u64, CorpusError> {
    if g.n() > MAX_CANON_ORDER {
        return Err(CorpusError::TooLarge { n: g.n(), limit: MAX_CANON_ORDER });
    }
    let cells = refined_cells(g);
    let mut order = Vec::with_capacity(g.n());
    let mut best = u64::MAX;
    permute_cells(g, &cells, 0, &mut order, &mut best);
    Ok(best)
}

fn permute_cells(g: &Graph, cells: &[Vec<usize>], c: usize, order: &mut Vec<usize>, best: &mut u64) {
    if c == cells.len() {
        *best = (*best).min(encode(g, order));
        return;
    }
    let mut cell = cells[c].clone();
    let len = cell.len();
    heap_permutations(&mut cell, len, &mut |p| {
        let base = order.len();
        order.extend_from_slice(p);
        permute_cells(g, cells, c + 1, order, best);
        order.truncate(base);
    });
}

fn heap_permutations(items: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, f);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, f);
}

/// One representative of every graph on `n` vertices, ordered by canonical
/// form.
pub fn all_graphs(n: usize) -> Result<Vec<Graph>, CorpusError> {
    if n > MAX_CORPUS_ORDER || n == 0 {
        return Err(CorpusError::TooLarge { n, limit: MAX_CORPUS_ORDER });
    }
    let mut level: Vec<Graph> = vec![Graph::empty(1).expect("order 1")];
    for order in 2..=n {
        let mut seen: BTreeMap<u64, Graph> = BTreeMap::new();
        for g in &level {
            for mask in 0u32..(1 << (order - 1)) {
                let edges = g.edges().chain((0..order - 1).filter(|&u| mask >> u & 1 == 1).map(|u| (u, order - 1)));
                let h = Graph::from_edges(order, edges).expect("valid extension");
                let key = canonical_form(&h).expect("order within limit");
                seen.entry(key).or_insert(h);
            }
        }
        level = seen.into_values().collect();
    }
    Ok(level)
}

/// One representative of every connected graph on `n` vertices.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>, CorpusError> {
    Ok(all_graphs(n)?.into_iter().filter(|g| g.is_connected()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn published_counts() {
        let all: Vec<usize> = (1..=6).map(|n| all_graphs(n).unwrap().len()).collect();
        assert_eq!(all, vec![1, 2, 4, 11, 34, 156]);
        let conn: Vec<usize> = (1..=6).map(|n| connected_graphs(n).unwrap().len()).collect();
        assert_eq!(conn, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..300 {
            let n = 1 + rng.below_usize(9);
            let g = crate::random::gnp(&mut rng, n, 0.5);
            let (h, _) = crate::random::relabel(&mut rng, &g);
            assert_eq!(canonical_form(&g), canonical_form(&h));
        }
    }

    #[test]
    fn canonical_form_separates_cospectral_pair() {
        // C4 + K1 and the star K_{1,4} share the adjacency spectrum
        let a = Graph::cycle(4).unwrap().disjoint_union(&Graph::complete(1).unwrap());
        let b = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }
}
