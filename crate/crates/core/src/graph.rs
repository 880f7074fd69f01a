//! Immutable simple undirected graphs on dense vertex indices `0..n`.
//!
//! Adjacency is stored as one bit row per vertex. Every editing operation
//! returns a new value; nothing mutates a graph after construction.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("{0}-{1} is already an edge")]
    AlreadyAnEdge(usize, usize),
    #[error("operation limited to n <= {limit}, got n = {n}")]
    SizeLimit { n: usize, limit: usize },
    #[error("permutation is not a bijection on 0..{0}")]
    BadPermutation(usize),
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Iterates the set bits of a word slice in ascending order.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// An unordered edge normalized so that `.0 < .1`.
pub type Edge = (usize, usize);

pub fn normalize(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A set of unordered vertex pairs with distinct endpoints.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet {
    edges: BTreeSet<Edge>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from pairs, rejecting loops and duplicates (in either orientation).
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = BTreeSet::new();
        for (u, v) in pairs {
            if u == v {
                return Err(GraphError::Loop(u));
            }
            let e = normalize(u, v);
            if !edges.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self { edges })
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::Loop(u));
        }
        Ok(self.edges.insert(normalize(u, v)))
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&normalize(u, v))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Largest endpoint plus one, or 0 for the empty set.
    pub fn span(&self) -> usize {
        self.edges.iter().map(|&(_, v)| v + 1).max().unwrap_or(0)
    }

    /// Applies a vertex relabeling `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> EdgeSet {
        EdgeSet {
            edges: self.edges.iter().map(|&(u, v)| normalize(perm[u], perm[v])).collect(),
        }
    }

    pub fn to_vec(&self) -> Vec<Edge> {
        self.edges.iter().copied().collect()
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        EdgeSet {
            edges: iter
                .into_iter()
                .filter(|&(u, v)| u != v)
                .map(|(u, v)| normalize(u, v))
                .collect(),
        }
    }
}

/// Simple undirected graph with bit-row adjacency and cached degrees.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<usize>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    fn blank(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
            degrees: vec![0; n],
            m: 0,
        }
    }

    fn set(&mut self, u: usize, v: usize) {
        let w = self.words;
        self.rows[u * w + v / 64] |= 1 << (v % 64);
        self.rows[v * w + u / 64] |= 1 << (u % 64);
    }

    fn clear(&mut self, u: usize, v: usize) {
        let w = self.words;
        self.rows[u * w + v / 64] &= !(1 << (v % 64));
        self.rows[v * w + u / 64] &= !(1 << (u % 64));
    }

    fn recount(&mut self) {
        let w = self.words;
        for v in 0..self.n {
            self.degrees[v] = self.rows[v * w..(v + 1) * w]
                .iter()
                .map(|x| x.count_ones() as usize)
                .sum();
        }
        self.m = self.degrees.iter().sum::<usize>() / 2;
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Self::blank(n))
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v);
            }
        }
        g.recount();
        Ok(g)
    }

    /// The cycle `C_n` on `0-1-...-(n-1)-0`, `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::SizeLimit { n, limit: 3 });
        }
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// The path `P_n` on `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if g.has_edge(u, v) {
                let (a, b) = normalize(u, v);
                return Err(GraphError::DuplicateEdge(a, b));
            }
            g.set(u, v);
        }
        g.recount();
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count `e(G)`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Bit row of `N(v)`.
    pub fn neighbor_bits(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    /// Word count of each bit row.
    pub fn words(&self) -> usize {
        self.words
    }

    /// `N(v)` as a single word; only meaningful for `n <= 64`.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.rows[v * self.words]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.neighbor_bits(v))
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges().collect()
    }

    /// Nonadjacent pairs `(u, v)`, `u < v`, in lexicographic order.
    pub fn non_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| (u + 1..self.n).filter(move |&v| !self.has_edge(u, v)).map(move |v| (u, v)))
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.m == self.n * (self.n - 1) / 2
    }

    /// `G ∨ H`: vertices of `self` first, then those of `other` shifted by `self.n()`.
    pub fn join(&self, other: &Graph) -> Graph {
        let mut g = self.disjoint_union(other);
        for u in 0..self.n {
            for v in 0..other.n {
                g.set(u, self.n + v);
            }
        }
        g.recount();
        g
    }

    /// `G + H` with block-diagonal adjacency.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Self::blank(self.n + other.n);
        for (u, v) in self.edges() {
            g.set(u, v);
        }
        for (u, v) in other.edges() {
            g.set(self.n + u, self.n + v);
        }
        g.recount();
        g
    }

    /// `kG`, `k` disjoint copies.
    pub fn copies(k: usize, g: &Graph) -> Result<Graph, GraphError> {
        if k == 0 {
            return Err(GraphError::Empty);
        }
        let mut out = g.clone();
        for _ in 1..k {
            out = out.disjoint_union(g);
        }
        Ok(out)
    }

    /// `G − E`; every pair of `E` must be an edge.
    pub fn delete_edges(&self, edges: &EdgeSet) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        for (u, v) in edges.iter() {
            self.check_vertex(v)?;
            if !self.has_edge(u, v) {
                return Err(GraphError::NotAnEdge(u, v));
            }
            g.clear(u, v);
        }
        g.recount();
        Ok(g)
    }

    /// `G + E`; every pair of `E` must be a non-edge.
    pub fn add_edges(&self, edges: &EdgeSet) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        for (u, v) in edges.iter() {
            self.check_vertex(v)?;
            if self.has_edge(u, v) {
                return Err(GraphError::AlreadyAnEdge(u, v));
            }
            g.set(u, v);
        }
        g.recount();
        Ok(g)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation(self.n));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(GraphError::BadPermutation(self.n));
            }
            seen[p] = true;
        }
        let mut g = Self::blank(self.n);
        for (u, v) in self.edges() {
            g.set(perm[u], perm[v]);
        }
        g.recount();
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        let mut g = Self::blank(self.n);
        for (u, v) in self.non_edges() {
            g.set(u, v);
        }
        g.recount();
        g
    }

    /// Subgraph induced on `vertices`, relabeled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph, GraphError> {
        let mut g = Self::empty(vertices.len())?;
        for (i, &a) in vertices.iter().enumerate() {
            self.check_vertex(a)?;
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.set(i, j);
                }
            }
        }
        g.recount();
        Ok(g)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![];
            while let Some(u) = stack.pop() {
                members.push(u);
                for w in self.neighbors(u) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Cut vertices, ascending.
    pub fn articulation_points(&self) -> Vec<usize> {
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (vertex, parent, neighbors, next neighbor index)
            let mut stack: Vec<(usize, usize, Vec<usize>, usize)> = Vec::new();
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, usize::MAX, self.neighbors(root).collect(), 0));
            let mut root_children = 0;
            while let Some(top) = stack.last_mut() {
                let (u, parent) = (top.0, top.1);
                if top.3 < top.2.len() {
                    let w = top.2[top.3];
                    top.3 += 1;
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, u, self.neighbors(w).collect(), 0));
                    } else if w != parent {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(p) = stack.last() {
                        let pu = p.0;
                        low[pu] = low[pu].min(low[u]);
                        if pu != root && low[u] >= disc[pu] {
                            is_cut[pu] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        (0..n).filter(|&v| is_cut[v]).collect()
    }

    /// Connected, at least three vertices, and no cut vertex.
    pub fn is_2_connected(&self) -> bool {
        self.n >= 3 && self.is_connected() && self.articulation_points().is_empty()
    }

    /// Exact clique number `ω(G)` by branch and bound over a degeneracy order.
    pub fn clique_number(&self) -> Result<usize, GraphError> {
        const LIMIT: usize = 64;
        if self.n > LIMIT {
            return Err(GraphError::SizeLimit { n: self.n, limit: LIMIT });
        }
        let order = self.degeneracy_order();
        let adj: Vec<u64> = (0..self.n).map(|v| self.neighbor_mask(v)).collect();
        let mut best = 0;
        // each vertex is the first of its clique among later vertices in the order
        let mut later = (1u64 << (self.n - 1) << 1).wrapping_sub(1);
        for &v in &order {
            later &= !(1 << v);
            let cand = adj[v] & later;
            expand_clique(&adj, 1, cand, &mut best);
        }
        Ok(best)
    }

    fn degeneracy_order(&self) -> Vec<usize> {
        let mut deg = self.degrees.clone();
        let mut removed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let v = (0..self.n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (deg[v], v))
                .expect("vertex left");
            removed[v] = true;
            order.push(v);
            for w in self.neighbors(v) {
                if !removed[w] {
                    deg[w] -= 1;
                }
            }
        }
        order
    }
}

fn expand_clique(adj: &[u64], size: usize, mut cand: u64, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        expand_clique(adj, size + 1, cand & adj[v], best);
    }
}
