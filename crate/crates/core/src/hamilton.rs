//! Exact Hamilton path, cycle and Hamilton-connectivity oracles.
//!
//! The search is a depth-first backtrack over `u64` vertex masks, so the
//! oracle handles graphs with at most 64 vertices. Neighbors are tried in
//! ascending order. A partial path `start .. cur` with unvisited set `U`
//! (the target is in `U` until the last step) is abandoned when
//!
//! - some vertex of `U` other than the target has fewer than two neighbors
//!   in `U ∪ {cur}`;
//! - the vertices with exactly two such neighbors force more than one edge
//!   at `cur` or at the target, or more than two at any other vertex;
//! - `G[U ∪ {cur}]` is disconnected.
//!
//! For `n <= 24` failed states `(visited, cur)` are memoized. The budget
//! counts expanded search nodes, so a `Timeout` verdict is deterministic.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::transforms::closure;

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const MAX_ORDER: usize = 64;
const MEMO_ORDER_LIMIT: usize = 24;
const MEMO_CAPACITY: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonError {
    #[error("exact oracle handles at most {limit} vertices, got {n}")]
    SizeLimit { n: usize, limit: usize },
    #[error("endpoints must be distinct, got {0} twice")]
    SameVertex(usize),
    #[error("vertex {vertex} out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("Hamilton cycles need at least 3 vertices")]
    TooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    None,
    /// A Hamilton path for every pair, in ascending pair order.
    Paths(Vec<(Edge, Vec<usize>)>),
    /// The smallest pair joined by no Hamilton path.
    NoPair(Edge),
    Cycle(Vec<usize>),
    Path(Vec<usize>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleAnswer {
    pub verdict: Verdict,
    pub witness: Witness,
    pub stats: SearchStats,
    /// Whether `cl_{n+1}(G)` is complete, when the closure gate ran.
    pub closure_complete: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSearch {
    Found(Vec<usize>),
    Absent,
    Timeout,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Node-expansion budget per pair search.
    pub budget: u64,
    /// Compute `cl_{n+1}(G)` before the pair searches.
    pub closure_gate: bool,
    /// Keep one witness path per pair on a Yes verdict.
    pub keep_paths: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: DEFAULT_BUDGET, closure_gate: true, keep_paths: true }
    }
}

struct Timeout;

struct Searcher<'a> {
    adj: &'a [u64],
    target: usize,
    budget: u64,
    nodes: u64,
    memo: Option<HashSet<(u64, u8)>>,
    path: Vec<usize>,
}

impl Searcher<'_> {
    fn new(adj: &[u64], target: usize, budget: u64) -> Searcher<'_> {
        let memo = (adj.len() <= MEMO_ORDER_LIMIT).then(HashSet::new);
        Searcher { adj, target, budget, nodes: 0, memo, path: Vec::with_capacity(adj.len()) }
    }

    fn full(&self) -> u64 {
        if self.adj.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.adj.len()) - 1
        }
    }

    fn run(&mut self, start: usize) -> Result<bool, Timeout> {
        self.path.clear();
        self.path.push(start);
        self.dfs(start, 1u64 << start)
    }

    fn dfs(&mut self, cur: usize, visited: u64) -> Result<bool, Timeout> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Timeout);
        }
        let t = self.target;
        let tbit = 1u64 << t;
        let unvisited = self.full() & !visited;
        if unvisited == tbit {
            if self.adj[cur] & tbit != 0 {
                self.path.push(t);
                return Ok(true);
            }
            return Ok(false);
        }
        if let Some(memo) = &self.memo {
            if memo.contains(&(visited, cur as u8)) {
                return Ok(false);
            }
        }
        let next = match self.candidates(cur, unvisited) {
            Some(c) => c,
            None => {
                self.remember(visited, cur);
                return Ok(false);
            }
        };
        let mut bits = next;
        while bits != 0 {
            let w = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            self.path.push(w);
            if self.dfs(w, visited | (1u64 << w))? {
                return Ok(true);
            }
            self.path.pop();
        }
        self.remember(visited, cur);
        Ok(false)
    }

    fn remember(&mut self, visited: u64, cur: usize) {
        if let Some(memo) = &mut self.memo {
            if memo.len() < MEMO_CAPACITY {
                memo.insert((visited, cur as u8));
            }
        }
    }

    /// Admissible successors of `cur`, or `None` if the state is dead.
    fn candidates(&self, cur: usize, unvisited: u64) -> Option<u64> {
        let t = self.target;
        let tbit = 1u64 << t;
        let cbit = 1u64 << cur;
        let live = unvisited | cbit;
        let inner = unvisited & !tbit;
        if self.adj[t] & inner == 0 {
            return None;
        }
        let mut forced_cur = 0u64;
        let mut forced_target = 0u32;
        let mut forced_count = [0u8; 64];
        let mut bits = inner;
        while bits != 0 {
            let w = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let avail = self.adj[w] & live;
            match avail.count_ones() {
                0 | 1 => return None,
                2 => {
                    if avail & cbit != 0 && avail & tbit != 0 && inner != 1u64 << w {
                        // cur - w - target would close the path early
                        return None;
                    }
                    let mut ends = avail;
                    while ends != 0 {
                        let e = ends.trailing_zeros() as usize;
                        ends &= ends - 1;
                        if e == cur {
                            forced_cur |= 1u64 << w;
                        } else if e == t {
                            forced_target += 1;
                        } else {
                            forced_count[e] += 1;
                            if forced_count[e] > 2 {
                                return None;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        if forced_cur.count_ones() > 1 || forced_target > 1 {
            return None;
        }
        if !self.connected(live, cur) {
            return None;
        }
        let next = self.adj[cur] & inner;
        if forced_cur != 0 {
            return Some(forced_cur & next);
        }
        Some(next)
    }

    fn connected(&self, set: u64, from: usize) -> bool {
        let mut seen = 1u64 << from;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[v] & set & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == set
    }
}

fn masks(g: &Graph) -> Result<Vec<u64>, HamiltonError> {
    if g.n() > MAX_ORDER {
        return Err(HamiltonError::SizeLimit { n: g.n(), limit: MAX_ORDER });
    }
    Ok((0..g.n()).map(|v| g.neighbor_mask(v)).collect())
}

fn search(adj: &[u64], u: usize, v: usize, budget: u64) -> (PathSearch, u64) {
    let mut s = Searcher::new(adj, v, budget);
    let out = match s.run(u) {
        Ok(true) => PathSearch::Found(std::mem::take(&mut s.path)),
        Ok(false) => PathSearch::Absent,
        Err(Timeout) => PathSearch::Timeout,
    };
    (out, s.nodes)
}

/// A Hamilton path from `u` to `v`, if one exists.
pub fn hamilton_path_between(g: &Graph, u: usize, v: usize, budget: u64) -> Result<PathSearch, HamiltonError> {
    Ok(hamilton_path_with_stats(g, u, v, budget)?.0)
}

/// As [`hamilton_path_between`], also returning the number of nodes expanded.
pub fn hamilton_path_with_stats(g: &Graph, u: usize, v: usize, budget: u64) -> Result<(PathSearch, u64), HamiltonError> {
    let adj = masks(g)?;
    for w in [u, v] {
        if w >= g.n() {
            return Err(HamiltonError::VertexOutOfRange { vertex: w, n: g.n() });
        }
    }
    if u == v {
        return Err(HamiltonError::SameVertex(u));
    }
    Ok(search(&adj, u, v, budget))
}

/// Checks that `path` is a Hamilton path of `g`.
pub fn is_hamilton_path(g: &Graph, path: &[usize]) -> bool {
    let mut seen = vec![false; g.n()];
    for &v in path {
        if v >= g.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    path.len() == g.n() && path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// Checks that `cycle` lists a Hamilton cycle of `g` (closing edge implied).
pub fn is_hamilton_cycle(g: &Graph, cycle: &[usize]) -> bool {
    cycle.len() >= 3 && is_hamilton_path(g, cycle) && g.has_edge(cycle[0], cycle[cycle.len() - 1])
}

pub fn is_hamilton_connected(g: &Graph, budget: u64) -> Result<OracleAnswer, HamiltonError> {
    is_hamilton_connected_with(g, OracleOptions { budget, ..OracleOptions::default() })
}

/// Searches every pair `(u, v)`, `u < v`, in ascending order and stops at
/// the first pair with no Hamilton path. A timed-out pair does not stop the
/// scan; the verdict is `No` if a later pair fails and `Timeout` otherwise.
pub fn is_hamilton_connected_with(g: &Graph, opts: OracleOptions) -> Result<OracleAnswer, HamiltonError> {
    let start = Instant::now();
    let adj = masks(g)?;
    let n = g.n();
    let closure_complete = if opts.closure_gate && n >= 3 {
        Some(closure(g, n + 1).expect("k = n + 1 >= 1").0.is_complete())
    } else {
        None
    };
    let mut nodes = 0;
    let mut paths = Vec::new();
    let mut timed_out = false;
    let mut no_pair = None;
    'pairs: for u in 0..n {
        for v in u + 1..n {
            let (out, used) = search(&adj, u, v, opts.budget);
            nodes += used;
            match out {
                PathSearch::Found(p) => {
                    if opts.keep_paths {
                        paths.push(((u, v), p));
                    }
                }
                PathSearch::Absent => {
                    no_pair = Some((u, v));
                    break 'pairs;
                }
                PathSearch::Timeout => timed_out = true,
            }
        }
    }
    let (verdict, witness) = match no_pair {
        Some(pair) => (Verdict::No, Witness::NoPair(pair)),
        None if timed_out => (Verdict::Timeout, Witness::None),
        None if opts.keep_paths => (Verdict::Yes, Witness::Paths(paths)),
        None => (Verdict::Yes, Witness::None),
    };
    Ok(OracleAnswer {
        verdict,
        witness,
        stats: SearchStats { nodes, elapsed_secs: start.elapsed().as_secs_f64() },
        closure_complete,
    })
}

/// Hamilton cycle search: a Hamilton path from 0 to some neighbor of 0.
pub fn is_hamiltonian(g: &Graph, budget: u64) -> Result<OracleAnswer, HamiltonError> {
    let start = Instant::now();
    let adj = masks(g)?;
    if g.n() < 3 {
        return Err(HamiltonError::TooSmall);
    }
    let mut nodes = 0;
    let mut timed_out = false;
    let mut found = None;
    for w in g.neighbors(0) {
        let (out, used) = search(&adj, 0, w, budget);
        nodes += used;
        match out {
            PathSearch::Found(p) => {
                found = Some(p);
                break;
            }
            PathSearch::Absent => {}
            PathSearch::Timeout => timed_out = true,
        }
    }
    Ok(answer(found.map(Witness::Cycle), timed_out, nodes, start))
}

/// Hamilton path search with free ends: a Hamilton path from an added
/// universal vertex to some vertex of `G`.
pub fn is_traceable(g: &Graph, budget: u64) -> Result<OracleAnswer, HamiltonError> {
    let start = Instant::now();
    let n = g.n();
    if n >= MAX_ORDER {
        return Err(HamiltonError::SizeLimit { n, limit: MAX_ORDER - 1 });
    }
    if n == 1 {
        return Ok(answer(Some(Witness::Path(vec![0])), false, 0, start));
    }
    let mut adj = masks(g)?;
    for row in adj.iter_mut() {
        *row |= 1u64 << n;
    }
    adj.push((1u64 << n) - 1);
    let mut nodes = 0;
    let mut timed_out = false;
    let mut found = None;
    for w in 0..n {
        let (out, used) = search(&adj, n, w, budget);
        nodes += used;
        match out {
            PathSearch::Found(p) => {
                found = Some(p[1..].to_vec());
                break;
            }
            PathSearch::Absent => {}
            PathSearch::Timeout => timed_out = true,
        }
    }
    Ok(answer(found.map(Witness::Path), timed_out, nodes, start))
}

fn answer(found: Option<Witness>, timed_out: bool, nodes: u64, start: Instant) -> OracleAnswer {
    let (verdict, witness) = match found {
        Some(w) => (Verdict::Yes, w),
        None if timed_out => (Verdict::Timeout, Witness::None),
        None => (Verdict::No, Witness::None),
    };
    OracleAnswer {
        verdict,
        witness,
        stats: SearchStats { nodes, elapsed_secs: start.elapsed().as_secs_f64() },
        closure_complete: None,
    }
}

/// True iff `G` is 2-connected and every nonadjacent pair has degree sum at
/// least `n + 1`; true implies Hamilton-connected.
pub fn ore_check(g: &Graph) -> bool {
    let n = g.n();
    n >= 3 && g.is_2_connected() && g.non_edges().all(|(u, v)| g.degree(u) + g.degree(v) > n)
}
