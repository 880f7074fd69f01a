//! The extremal families `S_n^k`, `T_n^k` and their edge-deleted classes.
//!
//! Vertex layout of the hosts (join order):
//!
//! - `S_n^k = K_k ∨ (K_{n−2k+1} + (k−1)K_1)`: `Y = 0..k`, `Z = k..n−k+1`,
//!   `X = n−k+1..n`.
//! - `T_n^k = K_2 ∨ (K_{n−k−1} + K_{k−1})`: `Y = {0, 1}`, `Z = 2..n−k+1`,
//!   `X = n−k+1..n`.
//!
//! In both hosts `Y ∪ Z = 0..n−k+1` spans a clique and `E0` is the edge set
//! of that clique. A class member is the host minus some `E' ⊆ E0`; the
//! first classes allow `|E'| <= ⌊k(k−1)/4⌋` (S) and `|E'| <= ⌊(k−1)/2⌋`
//! (T), the second classes fix `|E'|` at one more than that.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{iter_bits, normalize, Edge, EdgeSet, Graph};
use crate::rational::RationalValue;
use crate::rng::SplitMix64;

pub const DEFAULT_ENUM_BUDGET: u64 = 5_000_000;
pub const DEFAULT_EMBED_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("need n >= 5 and 2 <= k <= n/2, got n = {n}, k = {k}")]
    BadParameters { n: usize, k: usize },
    #[error("edge {0:?} does not lie inside Y ∪ Z")]
    NotInE0(Edge),
    #[error("base handle already has deleted edges")]
    NotPristine,
    #[error("{needed} candidates exceed the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("n = {n} is below n_min = {n_min} for k = {k}")]
    BelowThreshold { k: usize, n: usize, n_min: u64, report: Box<AppendixReport> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    S,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassId {
    S1,
    S2,
    T1,
    T2,
}

impl ClassId {
    pub fn kind(self) -> FamilyKind {
        match self {
            ClassId::S1 | ClassId::S2 => FamilyKind::S,
            ClassId::T1 | ClassId::T2 => FamilyKind::T,
        }
    }

    pub fn is_first(self) -> bool {
        matches!(self, ClassId::S1 | ClassId::T1)
    }

    /// Admissible `|E'|` values.
    pub fn sizes(self, k: usize) -> std::ops::RangeInclusive<usize> {
        let b = class_bound(self, k);
        if self.is_first() {
            0..=b
        } else {
            b..=b
        }
    }
}

impl std::str::FromStr for ClassId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "S1" | "s1" => Ok(ClassId::S1),
            "S2" | "s2" => Ok(ClassId::S2),
            "T1" | "t1" => Ok(ClassId::T1),
            "T2" | "t2" => Ok(ClassId::T2),
            _ => Err(format!("unknown class {s:?}, expected S1, S2, T1 or T2")),
        }
    }
}

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `⌊k(k−1)/4⌋` (S1), `⌊(k−1)/2⌋` (T1), one more for S2 and T2.
pub fn class_bound(class: ClassId, k: usize) -> usize {
    let base = match class.kind() {
        FamilyKind::S => k * (k - 1) / 4,
        FamilyKind::T => (k - 1) / 2,
    };
    if class.is_first() {
        base
    } else {
        base + 1
    }
}

fn check_params(n: usize, k: usize) -> Result<(), FamilyError> {
    if n < 5 || k < 2 || 2 * k > n {
        return Err(FamilyError::BadParameters { n, k });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyHandle {
    pub kind: FamilyKind,
    pub n: usize,
    pub k: usize,
    pub graph: Graph,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub deleted: EdgeSet,
}

/// JSON sidecar for an exported member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySidecar {
    pub kind: FamilyKind,
    pub n: usize,
    pub k: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub deleted: Vec<Edge>,
}

pub fn build_s(n: usize, k: usize) -> Result<FamilyHandle, FamilyError> {
    check_params(n, k)?;
    let inner = Graph::complete(n - 2 * k + 1)
        .expect("positive order")
        .disjoint_union(&Graph::empty(k - 1).expect("k >= 2"));
    let graph = Graph::complete(k).expect("k >= 2").join(&inner);
    Ok(handle(FamilyKind::S, n, k, graph, k))
}

pub fn build_t(n: usize, k: usize) -> Result<FamilyHandle, FamilyError> {
    check_params(n, k)?;
    let inner = Graph::complete(n - k - 1)
        .expect("positive order")
        .disjoint_union(&Graph::complete(k - 1).expect("k >= 2"));
    let graph = Graph::complete(2).expect("order 2").join(&inner);
    Ok(handle(FamilyKind::T, n, k, graph, 2))
}

pub fn build(kind: FamilyKind, n: usize, k: usize) -> Result<FamilyHandle, FamilyError> {
    match kind {
        FamilyKind::S => build_s(n, k),
        FamilyKind::T => build_t(n, k),
    }
}

fn handle(kind: FamilyKind, n: usize, k: usize, graph: Graph, ylen: usize) -> FamilyHandle {
    let yz = n - k + 1;
    FamilyHandle {
        kind,
        n,
        k,
        graph,
        x: (yz..n).collect(),
        y: (0..ylen).collect(),
        z: (ylen..yz).collect(),
        deleted: EdgeSet::new(),
    }
}

/// `base − E`; `base` must have no deleted edges.
pub fn family_member(base: &FamilyHandle, edges: &EdgeSet) -> Result<FamilyHandle, FamilyError> {
    if !base.deleted.is_empty() {
        return Err(FamilyError::NotPristine);
    }
    if let Some(e) = edges.iter().find(|&(u, v)| !base.in_e0(u, v)) {
        return Err(FamilyError::NotInE0(e));
    }
    let graph = base.graph.delete_edges(edges).expect("E0 edges are present in the host");
    Ok(FamilyHandle { graph, deleted: edges.clone(), ..base.clone() })
}

impl FamilyHandle {
    /// `|Y ∪ Z| = n − k + 1`.
    pub fn yz_len(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn in_e0(&self, u: usize, v: usize) -> bool {
        u != v && u < self.yz_len() && v < self.yz_len()
    }

    /// `|E0| = C(n−k+1, 2)`.
    pub fn e0_len(&self) -> usize {
        let l = self.yz_len();
        l * (l - 1) / 2
    }

    /// `E0` in lexicographic order.
    pub fn e0_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let l = self.yz_len();
        (0..l).flat_map(move |u| (u + 1..l).map(move |v| (u, v)))
    }

    pub fn host(&self) -> Graph {
        self.graph.add_edges(&self.deleted).expect("deleted edges are absent")
    }

    fn split(&self, part: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let touched: BTreeSet<usize> = self.deleted.iter().flat_map(|(u, v)| [u, v]).collect();
        part.iter().partition(|v| !touched.contains(v))
    }

    /// `(Y1, Y2)`: Y vertices untouched / touched by `deleted`.
    pub fn y_split(&self) -> (Vec<usize>, Vec<usize>) {
        self.split(&self.y)
    }

    /// `(Z1, Z2)`: Z vertices untouched / touched by `deleted`.
    pub fn z_split(&self) -> (Vec<usize>, Vec<usize>) {
        self.split(&self.z)
    }

    /// The 0/1 indicator of `Y ∪ Z`.
    pub fn yz_indicator(&self) -> Vec<i64> {
        (0..self.n).map(|v| (v < self.yz_len()) as i64).collect()
    }

    pub fn sidecar(&self) -> FamilySidecar {
        FamilySidecar {
            kind: self.kind,
            n: self.n,
            k: self.k,
            x: self.x.clone(),
            y: self.y.clone(),
            z: self.z.clone(),
            deleted: self.deleted.to_vec(),
        }
    }
}

fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumMode {
    /// Every admissible `E'`, by size and then lexicographically.
    Exhaustive,
    /// `count` members drawn deterministically from `seed`.
    Sample { seed: u64, count: usize },
    /// Every admissible `E'` inside `Y` plus the first `2|E'|` vertices of
    /// `Z`. Up to automorphisms of the host fixing `X` this is every member.
    OrbitWindow,
}

/// Stream of class members.
pub struct ClassStream {
    base: FamilyHandle,
    total: u128,
    inner: StreamState,
}

enum StreamState {
    Combos {
        pairs: Vec<Edge>,
        sizes: Vec<usize>,
        size_idx: usize,
        idx: Option<Vec<usize>>,
    },
    Sample {
        rng: SplitMix64,
        left: usize,
        class: ClassId,
    },
}

impl ClassStream {
    /// Number of members the stream will yield.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn base(&self) -> &FamilyHandle {
        &self.base
    }
}

fn next_combination(idx: &mut [usize], len: usize) -> bool {
    let r = idx.len();
    for i in (0..r).rev() {
        if idx[i] < len - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `i`-th pair of `0..l` in lexicographic order.
fn unrank_pair(l: usize, mut i: usize) -> Edge {
    for u in 0..l {
        let row = l - 1 - u;
        if i < row {
            return (u, u + 1 + i);
        }
        i -= row;
    }
    unreachable!("index within C(l, 2)")
}

impl Iterator for ClassStream {
    type Item = FamilyHandle;

    fn next(&mut self) -> Option<FamilyHandle> {
        let edges = match &mut self.inner {
            StreamState::Combos { pairs, sizes, size_idx, idx } => loop {
                match idx {
                    None => {
                        let &s = sizes.get(*size_idx)?;
                        if s > pairs.len() {
                            *size_idx += 1;
                            continue;
                        }
                        let first: Vec<usize> = (0..s).collect();
                        *idx = Some(first.clone());
                        break first.iter().map(|&i| pairs[i]).collect::<EdgeSet>();
                    }
                    Some(cur) => {
                        if next_combination(cur, pairs.len()) {
                            break cur.iter().map(|&i| pairs[i]).collect::<EdgeSet>();
                        }
                        *idx = None;
                        *size_idx += 1;
                    }
                }
            },
            StreamState::Sample { rng, left, class } => {
                if *left == 0 {
                    return None;
                }
                *left -= 1;
                let range = class.sizes(self.base.k);
                let s = if class.is_first() { rng.below_usize(range.end() + 1) } else { *range.start() };
                let l = self.base.yz_len();
                let total = l * (l - 1) / 2;
                let mut picked = BTreeSet::new();
                while picked.len() < s.min(total) {
                    picked.insert(rng.below_usize(total));
                }
                picked.into_iter().map(|i| unrank_pair(l, i)).collect::<EdgeSet>()
            }
        };
        Some(family_member(&self.base, &edges).expect("edges drawn from E0"))
    }
}

pub fn enumerate_class(class: ClassId, n: usize, k: usize, mode: EnumMode, budget: u64) -> Result<ClassStream, FamilyError> {
    let base = build(class.kind(), n, k)?;
    let sizes: Vec<usize> = class.sizes(k).collect();
    let pairs: Vec<Edge> = match mode {
        EnumMode::Sample { seed, count } => {
            return Ok(ClassStream {
                base,
                total: count as u128,
                inner: StreamState::Sample { rng: SplitMix64::new(seed), left: count, class },
            });
        }
        EnumMode::Exhaustive => base.e0_edges().collect(),
        EnumMode::OrbitWindow => {
            let width = base.y.len() + (2 * sizes.last().copied().unwrap_or(0)).min(base.z.len());
            (0..width).flat_map(|u| (u + 1..width).map(move |v| (u, v))).collect()
        }
    };
    let total: u128 = sizes.iter().map(|&s| binomial(pairs.len() as u128, s as u128)).sum();
    if total > budget as u128 {
        return Err(FamilyError::BudgetExceeded { needed: total, budget });
    }
    Ok(ClassStream {
        base,
        total,
        inner: StreamState::Combos { pairs, sizes, size_idx: 0, idx: None },
    })
}

/// A relabeling of `G` onto a family layout: `perm[v]` is the host index of
/// `G`'s vertex `v` (Y, then Z, then X, each ascending in `G`'s labels).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyWitness {
    pub kind: FamilyKind,
    pub n: usize,
    pub k: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    /// Missing host edges inside `Y ∪ Z`, in `G`'s labels. Empty for
    /// embeddings, where any subgraph of the host qualifies.
    pub deleted: Vec<Edge>,
    pub perm: Vec<usize>,
}

fn layout_perm(n: usize, y: &[usize], z: &[usize], x: &[usize]) -> Vec<usize> {
    let mut perm = vec![0; n];
    for (i, &v) in y.iter().chain(z).chain(x).enumerate() {
        perm[v] = i;
    }
    perm
}

fn bits_of(n: usize, vs: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut b = vec![0u64; n.div_ceil(64)];
    for v in vs {
        b[v / 64] |= 1 << (v % 64);
    }
    b
}

/// Decides whether `G` is isomorphic to a member of `class` for this `k`.
///
/// Candidate `X` sets are groups of degree-`k` vertices sharing an open
/// (S) or closed (T) neighborhood. Two vertices in such a group are
/// nonadjacent twins (S) or adjacent twins (T), so swapping them is an
/// automorphism and any `k−1` of them may serve as `X`.
pub fn membership(g: &Graph, class: ClassId, k: usize) -> Option<FamilyWitness> {
    let n = g.n();
    check_params(n, k).ok()?;
    let kind = class.kind();
    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for v in (0..n).filter(|&v| g.degree(v) == k) {
        let mut key = g.neighbor_bits(v).to_vec();
        if kind == FamilyKind::T {
            key[v / 64] |= 1 << (v % 64);
        }
        groups.entry(key).or_default().push(v);
    }
    let mut candidates: Vec<(Vec<u64>, Vec<usize>)> = groups.into_iter().filter(|(_, m)| m.len() >= k - 1).collect();
    candidates.sort_by_key(|(_, m)| m[0]);
    let sizes = class.sizes(k);
    for (key, members) in candidates {
        let x: Vec<usize> = members[..k - 1].to_vec();
        let y: Vec<usize> = iter_bits(&key).filter(|v| !x.contains(v)).collect();
        let want_y = if kind == FamilyKind::S { k } else { 2 };
        if y.len() != want_y {
            continue;
        }
        let xy = bits_of(n, x.iter().chain(&y).copied());
        let z: Vec<usize> = (0..n).filter(|&v| xy[v / 64] >> (v % 64) & 1 == 0).collect();
        if let Some(deleted) = missing_inside(g, &y, &z, &sizes) {
            let perm = layout_perm(n, &y, &z, &x);
            return Some(FamilyWitness { kind, n, k, x, y, z, deleted, perm });
        }
    }
    None
}

/// Non-edges of `G[Y ∪ Z]` when their number lies in `sizes`.
fn missing_inside(g: &Graph, y: &[usize], z: &[usize], sizes: &std::ops::RangeInclusive<usize>) -> Option<Vec<Edge>> {
    let n = g.n();
    let yz: Vec<usize> = y.iter().chain(z).copied().collect();
    let mask = bits_of(n, yz.iter().copied());
    let l = yz.len();
    let mut inside = 0usize;
    for &v in &yz {
        inside += g.neighbor_bits(v).iter().zip(&mask).map(|(a, b)| (a & b).count_ones() as usize).sum::<usize>();
    }
    let missing = l * (l - 1) / 2 - inside / 2;
    if !sizes.contains(&missing) {
        return None;
    }
    let mut out = Vec::with_capacity(missing);
    for (i, &u) in yz.iter().enumerate() {
        for &v in &yz[i + 1..] {
            if !g.has_edge(u, v) {
                out.push(normalize(u, v));
            }
        }
    }
    out.sort_unstable();
    Some(out)
}

/// Looks for a labeling under which `G` is a spanning subgraph of the host.
///
/// S: `k−1` pairwise nonadjacent vertices of degree at most `k` whose
/// neighborhoods fit in a common `k`-set. T: `k−1` vertices of degree at
/// most `k` whose neighborhoods fit in `X` plus a common 2-set.
pub fn spanning_subgraph_of(g: &Graph, kind: FamilyKind, k: usize, budget: u64) -> Result<Option<FamilyWitness>, FamilyError> {
    let n = g.n();
    check_params(n, k)?;
    let cand: Vec<usize> = (0..n).filter(|&v| g.degree(v) <= k).collect();
    if cand.len() < k - 1 {
        return Ok(None);
    }
    let mut search = Embed { g, kind, k, cand: &cand, budget, nodes: 0, chosen: Vec::new() };
    let words = g.words();
    if !search.extend(0, &vec![0u64; words], &vec![0u64; words])? {
        return Ok(None);
    }
    let x = search.chosen;
    let xbits = bits_of(n, x.iter().copied());
    let mut union = vec![0u64; words];
    for &v in &x {
        for (a, b) in union.iter_mut().zip(g.neighbor_bits(v)) {
            *a |= b;
        }
    }
    let mut y: Vec<usize> = iter_bits(&union).filter(|&v| xbits[v / 64] >> (v % 64) & 1 == 0).collect();
    let want_y = if kind == FamilyKind::S { k } else { 2 };
    for v in 0..n {
        if y.len() >= want_y {
            break;
        }
        if xbits[v / 64] >> (v % 64) & 1 == 0 && !y.contains(&v) {
            y.push(v);
        }
    }
    y.sort_unstable();
    let z: Vec<usize> = (0..n).filter(|&v| xbits[v / 64] >> (v % 64) & 1 == 0 && !y.contains(&v)).collect();
    let perm = layout_perm(n, &y, &z, &x);
    Ok(Some(FamilyWitness { kind, n, k, x, y, z, deleted: Vec::new(), perm }))
}

struct Embed<'a> {
    g: &'a Graph,
    kind: FamilyKind,
    k: usize,
    cand: &'a [usize],
    budget: u64,
    nodes: u64,
    chosen: Vec<usize>,
}

impl Embed<'_> {
    fn outside(&self, union: &[u64], xbits: &[u64]) -> usize {
        union.iter().zip(xbits).map(|(u, x)| (u & !x).count_ones() as usize).sum()
    }

    /// `union` is `∪ N(x)` and `xbits` the chosen set.
    fn extend(&mut self, from: usize, union: &[u64], xbits: &[u64]) -> Result<bool, FamilyError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(FamilyError::BudgetExceeded { needed: self.nodes as u128, budget: self.budget });
        }
        let left = self.k - 1 - self.chosen.len();
        let out = self.outside(union, xbits);
        match self.kind {
            FamilyKind::S if out > self.k => return Ok(false),
            FamilyKind::T if out > 2 + left => return Ok(false),
            _ => {}
        }
        if left == 0 {
            return Ok(match self.kind {
                FamilyKind::S => out <= self.k,
                FamilyKind::T => out <= 2,
            });
        }
        for i in from..self.cand.len() {
            if self.cand.len() - i < left {
                break;
            }
            let v = self.cand[i];
            if self.kind == FamilyKind::S && union[v / 64] >> (v % 64) & 1 == 1 {
                continue;
            }
            let nb = self.g.neighbor_bits(v);
            if self.kind == FamilyKind::S && nb.iter().zip(xbits).any(|(a, b)| a & b != 0) {
                continue;
            }
            let u2: Vec<u64> = union.iter().zip(nb).map(|(a, b)| a | b).collect();
            let mut x2 = xbits.to_vec();
            x2[v / 64] |= 1 << (v % 64);
            self.chosen.push(v);
            if self.extend(i + 1, &u2, &x2)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// Closed-form thresholds for a given `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub k: usize,
    /// `k^4 + 5k^3 + 2k^2 + 8k + 12`.
    pub n_min: u64,
    /// Minimum order `11k` for the edge-count condition.
    pub order_edge_thm: usize,
}

impl Thresholds {
    /// `2n − 2k`.
    pub fn spectral(&self, n: usize) -> i64 {
        2 * n as i64 - 2 * self.k as i64
    }

    /// `C(n−k, 2) + k(k+1)`.
    pub fn edge(&self, n: usize) -> usize {
        let r = n - self.k;
        r * (r.saturating_sub(1)) / 2 + self.k * (self.k + 1)
    }
}

pub fn thresholds(k: usize) -> Thresholds {
    let kk = k as u64;
    Thresholds {
        k,
        n_min: kk.pow(4) + 5 * kk.pow(3) + 2 * kk * kk + 8 * kk + 12,
        order_edge_thm: 11 * k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AppendixBranch {
    /// `k = 4s`
    Zero,
    /// `k = 4s + 1`
    One,
    /// `k = 4s + 2`, primed terms
    Two,
    /// `k = 4s + 3`, primed terms
    Three,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub k: usize,
    pub n: usize,
    pub branch: AppendixBranch,
    pub s: usize,
    pub primed: bool,
    /// `|E'|` from the branch formula.
    pub e1: usize,
    pub a1: RationalValue,
    pub a2: RationalValue,
    pub a3: RationalValue,
    pub a4: RationalValue,
    pub bound: RationalValue,
    /// `bound − (A1 + A2 + A3 − A4)`; positive iff the inequality holds.
    pub margin: RationalValue,
    /// `max A − min B` evaluated from its definition.
    pub max_a_minus_min_b: RationalValue,
    pub holds: bool,
}

fn q(num: i128, den: i128) -> RationalValue {
    RationalValue::new(num, den)
}

/// Exact evaluation of the `k mod 4` case split. Below `n_min` the report is
/// still computed and returned inside `BelowThreshold`.
pub fn appendix_check(k: usize, n: usize) -> Result<AppendixReport, FamilyError> {
    if k < 2 || 2 * k + 1 > n {
        return Err(FamilyError::BadParameters { n, k });
    }
    let s = k / 4;
    let branch = match k % 4 {
        0 => AppendixBranch::Zero,
        1 => AppendixBranch::One,
        2 => AppendixBranch::Two,
        _ => AppendixBranch::Three,
    };
    let e1 = match branch {
        AppendixBranch::Zero => s * (4 * s).saturating_sub(1) + 1,
        AppendixBranch::One => s * (4 * s + 1) + 1,
        AppendixBranch::Two => 4 * s * s + 3 * s + 1,
        AppendixBranch::Three => 4 * s * s + 5 * s + 2,
    };
    let primed = matches!(branch, AppendixBranch::Two | AppendixBranch::Three);
    let (ki, ni) = (k as i128, n as i128);
    let kp = |e: u32| ki.pow(e);
    let a1 = q(2 * kp(3) - 2 * kp(2), 2 * ni - 3 * ki - 1);
    let a2 = q(kp(4) - kp(3), 4 * ni * ni - (12 * ki + 4) * ni + 9 * kp(2) + 6 * ki + 1);
    let quad = 4 * ni * ni - 16 * ki * ni + 16 * kp(2);
    let (a3, a4, bound) = if primed {
        (
            q(kp(4) + 5 * kp(3) + 2 * kp(2) + 6 * ki + 12, ni - 2 * ki),
            q(kp(6) + 11 * kp(5) + 38 * kp(4) + 48 * kp(3) + 60 * kp(2) + 108 * ki + 72, quad),
            RationalValue::integer(2),
        )
    } else {
        (
            q(kp(4) + 5 * kp(3) + 4 * kp(2) + 18 * ki + 24, ni - 2 * ki),
            q(kp(6) + 11 * kp(5) + 40 * kp(4) + 72 * kp(3) + 156 * kp(2) + 252 * ki + 144, quad),
            RationalValue::integer(4),
        )
    };
    let sum = &(&(&a1 + &a2) + &a3) - &a4;
    let margin = &bound - &sum;
    let one = RationalValue::integer(1);
    let grow = &one + &q(ki, 2 * ni - 3 * ki - 1);
    let shrink = &one - &q(kp(2) + 6 * ki + 6, 2 * (ni - 2 * ki));
    let max_a = &RationalValue::integer(ki * (ki - 1)) * &(&grow * &grow);
    let min_b = &RationalValue::integer(4 * e1 as i128) * &(&shrink * &shrink);
    let report = AppendixReport {
        k,
        n,
        branch,
        s,
        primed,
        e1,
        holds: !margin.is_negative() && !margin.is_zero(),
        a1,
        a2,
        a3,
        a4,
        bound,
        margin,
        max_a_minus_min_b: &max_a - &min_b,
    };
    let n_min = thresholds(k).n_min;
    if (n as u64) < n_min {
        return Err(FamilyError::BelowThreshold { k, n, n_min, report: Box::new(report) });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::rayleigh_quotient_exact;

    fn degree_multiset(g: &Graph) -> Vec<usize> {
        let mut d = g.degrees().to_vec();
        d.sort_unstable();
        d
    }

    #[test]
    fn build_examples() {
        let s = build_s(6, 2).unwrap();
        assert_eq!(s.graph.m(), 12);
        assert_eq!(s.graph.degrees(), &[5, 5, 4, 4, 4, 2]);
        assert_eq!(s.x, vec![5]);
        let t = build_t(7, 3).unwrap();
        assert_eq!(t.graph.m(), 15);
        for n in 5..30 {
            assert_eq!(build_s(n, 2).unwrap().graph, build_t(n, 2).unwrap().graph);
        }
        assert_eq!(build_s(5, 3), Err(FamilyError::BadParameters { n: 5, k: 3 }));
        assert!(build_t(4, 2).is_err());
    }

    #[test]
    fn degree_spectrum_and_edge_counts() {
        for n in 5..26 {
            for k in 2..=n / 2 {
                let s = build_s(n, k).unwrap();
                let mut want = vec![k; k - 1];
                want.extend(vec![n - k; n - 2 * k + 1]);
                want.extend(vec![n - 1; k]);
                want.sort_unstable();
                assert_eq!(degree_multiset(&s.graph), want);
                assert_eq!(s.graph.m(), binomial((n - k + 1) as u128, 2) as usize + k * (k - 1));
                for &x in &s.x {
                    assert_eq!(s.graph.neighbors(x).collect::<Vec<_>>(), s.y);
                }
                let t = build_t(n, k).unwrap();
                let mut want = vec![k; k - 1];
                want.extend(vec![n - k; n - k - 1]);
                want.extend(vec![n - 1; 2]);
                want.sort_unstable();
                assert_eq!(degree_multiset(&t.graph), want);
                let expect = binomial((n - k + 1) as u128, 2) as usize + 2 * (k - 1) + (k - 1) * (k - 2) / 2;
                assert_eq!(t.graph.m(), expect);
                assert_eq!(t.e0_len(), t.e0_edges().count());
                assert!(t.e0_edges().all(|(u, v)| t.graph.has_edge(u, v)));
            }
        }
    }

    #[test]
    fn class_bounds() {
        assert_eq!(class_bound(ClassId::S1, 4), 3);
        assert_eq!(class_bound(ClassId::T2, 2), 1);
        assert_eq!(class_bound(ClassId::S1, 2), 0);
        assert_eq!(class_bound(ClassId::S1, 3), 1);
        assert_eq!(class_bound(ClassId::T2, 3), 2);
    }

    #[test]
    fn member_examples() {
        let s = build_s(9, 3).unwrap();
        let m = family_member(&s, &EdgeSet::from_pairs([(0, 5)]).unwrap()).unwrap();
        assert_eq!(m.graph.m(), s.graph.m() - 1);
        assert!(membership(&m.graph, ClassId::S1, 3).is_some());
        let t = build_t(9, 3).unwrap();
        let m = family_member(&t, &EdgeSet::from_pairs([(0, 5), (2, 3)]).unwrap()).unwrap();
        assert!(membership(&m.graph, ClassId::T2, 3).is_some());
        assert!(membership(&m.graph, ClassId::T1, 3).is_none());
        assert_eq!(m.y_split(), (vec![1], vec![0]));
        assert_eq!(m.z_split(), (vec![4, 6], vec![2, 3, 5]));
        let bad = EdgeSet::from_pairs([(0, 8)]).unwrap();
        assert_eq!(family_member(&t, &bad), Err(FamilyError::NotInE0((0, 8))));
        assert_eq!(family_member(&m, &EdgeSet::new()), Err(FamilyError::NotPristine));
    }

    #[test]
    fn enumeration_counts() {
        let all: Vec<_> = enumerate_class(ClassId::S1, 6, 2, EnumMode::Exhaustive, 100).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].deleted.is_empty());
        let s = enumerate_class(ClassId::S2, 92, 2, EnumMode::Exhaustive, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(s.total(), 4095);
        assert_eq!(s.count(), 4095);
        let t: Vec<_> = enumerate_class(ClassId::T1, 9, 3, EnumMode::Exhaustive, 100).unwrap().collect();
        assert_eq!(t.len(), 22);
        let sample: Vec<_> = enumerate_class(ClassId::T2, 9, 3, EnumMode::Sample { seed: 7, count: 10 }, 0).unwrap().collect();
        assert_eq!(sample.len(), 10);
        assert!(sample.iter().all(|m| m.deleted.len() == 2));
        let again: Vec<_> = enumerate_class(ClassId::T2, 9, 3, EnumMode::Sample { seed: 7, count: 10 }, 0).unwrap().collect();
        assert_eq!(sample, again);
        assert!(matches!(
            enumerate_class(ClassId::S2, 92, 2, EnumMode::Exhaustive, 10),
            Err(FamilyError::BudgetExceeded { needed: 4095, budget: 10 })
        ));
    }

    #[test]
    fn exhaustive_order_is_sorted_and_unique() {
        let members: Vec<Vec<Edge>> = enumerate_class(ClassId::S1, 10, 3, EnumMode::Exhaustive, 1000)
            .unwrap()
            .map(|m| m.deleted.to_vec())
            .collect();
        assert_eq!(members.len(), 1 + 28);
        let mut sorted = members.clone();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        sorted.dedup();
        assert_eq!(sorted, members);
    }

    #[test]
    fn unrank_matches_lexicographic_order() {
        let l = 9;
        let lex: Vec<Edge> = (0..l).flat_map(|u| (u + 1..l).map(move |v| (u, v))).collect();
        for (i, &e) in lex.iter().enumerate() {
            assert_eq!(unrank_pair(l, i), e);
        }
    }

    #[test]
    fn membership_examples() {
        let s = build_s(6, 2).unwrap();
        let w = membership(&s.graph, ClassId::S1, 2).unwrap();
        assert!(w.deleted.is_empty());
        assert_eq!(w.x, vec![5]);
        assert!(membership(&Graph::complete(6).unwrap(), ClassId::S1, 2).is_none());
        let m = family_member(&build_s(9, 3).unwrap(), &EdgeSet::from_pairs([(1, 6)]).unwrap()).unwrap();
        let (g, perm) = crate::random::relabel(&mut SplitMix64::new(4), &m.graph);
        let w = membership(&g, ClassId::S1, 3).unwrap();
        assert_eq!(w.deleted, vec![normalize(perm[1], perm[6])]);
        let host = build_s(9, 3).unwrap().graph;
        let back = g.relabel(&w.perm).unwrap();
        let restored = back.add_edges(&w.deleted.iter().map(|&(u, v)| normalize(w.perm[u], w.perm[v])).collect()).unwrap();
        assert_eq!(restored, host);
    }

    #[test]
    fn membership_recovers_random_relabeled_members() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..200 {
            let k = 2 + rng.below_usize(4);
            let n = 2 * k + 1 + rng.below_usize(12);
            let class = [ClassId::S1, ClassId::S2, ClassId::T1, ClassId::T2][rng.below_usize(4)];
            let m = enumerate_class(class, n, k, EnumMode::Sample { seed: rng.next_u64(), count: 1 }, 0)
                .unwrap()
                .next()
                .unwrap();
            let (g, _) = crate::random::relabel(&mut rng, &m.graph);
            let w = membership(&g, class, k).unwrap_or_else(|| panic!("{class} n={n} k={k} {:?}", m.deleted));
            assert_eq!(w.deleted.len(), m.deleted.len());
            let host = build(class.kind(), n, k).unwrap().graph;
            let back = g.relabel(&w.perm).unwrap();
            let del: EdgeSet = w.deleted.iter().map(|&(u, v)| normalize(w.perm[u], w.perm[v])).collect();
            assert_eq!(back.add_edges(&del).unwrap(), host);
        }
    }

    #[test]
    fn embedding_examples() {
        let s = build_s(6, 2).unwrap();
        for e in s.graph.edges() {
            let g = s.graph.delete_edges(&EdgeSet::from_pairs([e]).unwrap()).unwrap();
            let w = spanning_subgraph_of(&g, FamilyKind::S, 2, 1000).unwrap().unwrap();
            let host = &s.graph;
            assert!(g.edges().all(|(u, v)| host.has_edge(w.perm[u], w.perm[v])));
        }
        assert!(spanning_subgraph_of(&Graph::complete(6).unwrap(), FamilyKind::S, 2, 1000).unwrap().is_none());
    }

    /// Brute force over every labeling's choice of X vertex and Y pair.
    fn brute_embeds(g: &Graph, kind: FamilyKind, k: usize) -> bool {
        let host = build(kind, g.n(), k).unwrap().graph;
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| g.edges().all(|(u, v)| host.has_edge(p[u], p[v])))
    }

    fn permutations(p: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if i == p.len() {
            return f(p);
        }
        for j in i..p.len() {
            p.swap(i, j);
            if permutations(p, i + 1, f) {
                p.swap(i, j);
                return true;
            }
            p.swap(i, j);
        }
        false
    }

    #[test]
    fn embedding_matches_brute_force() {
        let c6 = Graph::cycle(6).unwrap();
        for kind in [FamilyKind::S, FamilyKind::T] {
            let got = spanning_subgraph_of(&c6, kind, 2, 1000).unwrap().is_some();
            assert_eq!(got, brute_embeds(&c6, kind, 2));
        }
        let mut rng = SplitMix64::new(8);
        for _ in 0..150 {
            let n = 6 + rng.below_usize(2);
            let p = 0.35 + 0.5 * rng.next_f64();
            let g = crate::random::gnp(&mut rng, n, p);
            for kind in [FamilyKind::S, FamilyKind::T] {
                for k in 2..=3 {
                    let got = spanning_subgraph_of(&g, kind, k, 100_000).unwrap();
                    assert_eq!(got.is_some(), brute_embeds(&g, kind, k), "{g:?} {kind:?} {k}");
                    if let Some(w) = got {
                        let host = build(kind, n, k).unwrap().graph;
                        assert!(g.edges().all(|(u, v)| host.has_edge(w.perm[u], w.perm[v])));
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(thresholds(2).n_min, 92);
        assert_eq!(thresholds(2).edge(22), 196);
        assert_eq!(thresholds(3).spectral(270), 534);
        assert_eq!(thresholds(3).n_min, 270);
        assert_eq!(thresholds(4).n_min, 652);
        assert_eq!(thresholds(5).n_min, 1352);
    }

    #[test]
    fn appendix_examples() {
        let r = appendix_check(2, 92).unwrap();
        assert!(r.primed && r.holds);
        assert_eq!(r.branch, AppendixBranch::Two);
        let r = appendix_check(4, 652).unwrap();
        assert!(!r.primed && r.holds);
        assert_eq!(r.bound, RationalValue::integer(4));
        let r = appendix_check(3, 270).unwrap();
        assert_eq!((r.branch, r.e1), (AppendixBranch::Three, 2));
        assert!(r.holds);
        assert!(matches!(appendix_check(2, 50), Err(FamilyError::BelowThreshold { .. })));
    }

    #[test]
    fn appendix_terms_agree_with_definitions() {
        for k in 2..=12 {
            let n_min = thresholds(k).n_min as usize;
            for n in [n_min, n_min + 1000] {
                let r = appendix_check(k, n).unwrap();
                assert_eq!(r.e1, class_bound(ClassId::S2, k));
                assert_eq!(r.max_a_minus_min_b, &(&r.a1 + &r.a2) + &(&(&r.a3 - &r.a4) - &r.bound));
                assert!(r.holds);
            }
        }
    }

    #[test]
    fn rayleigh_certificate_on_first_classes() {
        for (class, k, n) in [(ClassId::S1, 3, 12), (ClassId::T1, 3, 12), (ClassId::S1, 4, 12)] {
            for m in enumerate_class(class, n, k, EnumMode::Exhaustive, 100_000).unwrap() {
                let lo = rayleigh_quotient_exact(&m.graph, &m.yz_indicator()).unwrap();
                let c = if class.kind() == FamilyKind::S { k * (k - 1) } else { 2 * (k - 1) } as i64;
                let want = RationalValue::integer(2 * (n - k) as i64)
                    + RationalValue::new(c - 4 * m.deleted.len() as i64, (n - k + 1) as i64);
                assert_eq!(lo, want);
                assert!(lo >= RationalValue::integer(2 * (n - k) as i64));
            }
        }
    }
}
