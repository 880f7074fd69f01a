//! Verification suites. Each suite checks one inequality or equivalence of
//! the theory at desk scale and returns a deterministic [`SuiteReport`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use hamq_core::certifier::{certify, CertifyConfig, FiredCondition, Outcome, StepVerdict};
use hamq_core::corpus::{connected_graphs, CorpusError};
use hamq_core::families::{
    appendix_check, build, class_bound, enumerate_class, membership, thresholds, ClassId, EnumMode, FamilyError,
    FamilyHandle, FamilyKind, DEFAULT_ENUM_BUDGET,
};
use hamq_core::hamilton::{is_hamilton_connected_with, ore_check, OracleOptions, Verdict, DEFAULT_BUDGET};
use hamq_core::random;
use hamq_core::rng::SplitMix64;
use hamq_core::spectral::{
    eigen_residual, perron_pair_default, rayleigh_quotient_exact, upper_bound_edge_count, SpectralEstimate,
};
use hamq_core::transforms::{closure, closure_with_scan_order, kelmans};
use hamq_core::{Graph, RationalValue};

use crate::report::{CaseOutcome, SuiteReport};

pub const SUITES: &[&str] = &[
    "ore",
    "closure",
    "kelmans",
    "qbound",
    "eigen-equation",
    "edge-count",
    "spectral-theorem",
    "q-lower",
    "q-upper",
    "appendix",
    "corollary",
    "family-nonhc",
];

/// Every statement of the theory that is checked, with the suite checking it.
pub const ANCHORS: &[(&str, &str)] = &[
    ("Ore degree-sum condition implies Hamilton-connected", "ore"),
    ("Hamilton-connectivity is invariant under the (n+1)-closure", "closure"),
    ("Kelmans operation does not decrease q", "kelmans"),
    ("edge-count upper bound on q for connected graphs", "qbound"),
    ("signless Laplacian eigen-equation", "eigen-equation"),
    ("edge-count sufficient condition with host escape", "edge-count"),
    ("spectral sufficient condition with class-1 escape", "spectral-theorem"),
    ("class-1 members reach the spectral threshold", "q-lower"),
    ("class-2 members stay below the spectral threshold", "q-upper"),
    ("class-2 Rayleigh lower bound within one of the threshold", "q-upper"),
    ("low-degree vertex entries of the Perron vector", "q-upper"),
    ("Perron vector ordering on the maximizing member", "q-upper"),
    ("Perron vector spread on the maximizing member", "q-upper"),
    ("quadratic-form gap against the large clique", "q-upper"),
    ("k mod 4 case analysis of the closing inequality", "appendix"),
    ("host ordering q(S) > q(T) > 2n-2k", "corollary"),
    ("class-1 members are not Hamilton-connected", "family-nonhc"),
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; expected one of {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sample,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sample" => Ok(Mode::Sample),
            _ => Err(format!("unknown mode {s:?}, expected exhaustive or sample")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample => "sample",
        })
    }
}

/// Suite parameters. Unset fields take suite-specific defaults, which are
/// the scales used by the acceptance tests.
#[derive(Debug, Clone, Default)]
pub struct SuiteParams {
    pub k: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub mode: Option<Mode>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
}

/// Parses `"2..12"`, `"2,3"` or mixtures like `"2,5..7"`; ranges are inclusive.
pub fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.trim_start_matches('=');
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn show_list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

pub fn run_suite(id: &str, p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    match id {
        "ore" => ore(p),
        "closure" => closure_suite(p),
        "kelmans" => kelmans_suite(p),
        "qbound" => qbound(p),
        "eigen-equation" => eigen_equation(p),
        "edge-count" => edge_count(p),
        "spectral-theorem" => spectral_theorem(p),
        "q-lower" => q_lower(p),
        "q-upper" => q_upper(p),
        "appendix" => appendix(p),
        "corollary" => corollary(p),
        "family-nonhc" => family_nonhc(p),
        _ => Err(SuiteError::UnknownSuite(id.to_string())),
    }
}

fn run_cases<T: Sync>(report: &mut SuiteReport, cases: &[T], f: impl Fn(&T) -> CaseOutcome + Sync + Send) {
    let outs: Vec<CaseOutcome> = cases.par_iter().map(f).collect();
    for o in outs {
        report.absorb(o);
    }
}

/// Exact oracle without the closure shortcut, so it is independent of the
/// closure code under test.
pub fn oracle(g: &Graph) -> Verdict {
    let opts = OracleOptions { budget: DEFAULT_BUDGET, closure_gate: false, keep_paths: false };
    match is_hamilton_connected_with(g, opts) {
        Ok(a) => a.verdict,
        Err(_) => Verdict::Timeout,
    }
}

fn perron(g: &Graph) -> Result<SpectralEstimate, String> {
    perron_pair_default(g).map_err(|e| e.to_string())
}

fn ri(v: i64) -> RationalValue {
    RationalValue::integer(v)
}

/// Connected corpora for `ns` plus `count` random graphs on 8 or 9
/// vertices.
fn small_corpus(ns: &[usize], count: usize, seed: u64) -> Result<Vec<Graph>, SuiteError> {
    let mut out = Vec::new();
    for &n in ns {
        out.extend(connected_graphs(n)?);
    }
    let mut rng = SplitMix64::new(seed);
    for i in 0..count {
        let n = 8 + i % 2;
        let p = 0.3 + 0.65 * rng.next_f64();
        out.push(random::gnp(&mut rng, n, p));
    }
    Ok(out)
}

fn ore(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ns = p.n.clone().unwrap_or_else(|| vec![6, 7]);
    let count = p.count.unwrap_or(500);
    let seed = p.seed.unwrap_or(1);
    let mut report = SuiteReport::new("ore")
        .param("n", show_list(&ns))
        .param("count", count)
        .param("seed", seed);
    let graphs = small_corpus(&ns, count, seed)?;
    let fired = graphs.par_iter().filter(|g| ore_check(g)).count();
    run_cases(&mut report, &graphs, |g| {
        let mut out = CaseOutcome::default();
        if ore_check(g) {
            let v = oracle(g);
            out.check(v == Verdict::Yes, Some(g), "ore", || format!("Ore condition holds but oracle says {v:?}"));
        }
        out
    });
    report.notes.push(format!("Ore condition held on {fired} graphs"));
    Ok(report.finish())
}

fn closure_suite(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ns = p.n.clone().unwrap_or_else(|| vec![6, 7]);
    let count = p.count.unwrap_or(500);
    let seed = p.seed.unwrap_or(1);
    let mut report = SuiteReport::new("closure")
        .param("n", show_list(&ns))
        .param("count", count)
        .param("seed", seed);
    let graphs = small_corpus(&ns, count, seed)?;
    run_cases(&mut report, &graphs, |g| {
        let mut out = CaseOutcome::default();
        let n = g.n();
        let (cl, trace) = closure(g, n + 1).expect("valid k");
        out.check(trace.replay(g).as_ref() == Some(&cl), Some(g), "closure", || "trace replay differs".into());
        let reversed: Vec<_> = (0..n).rev().flat_map(|v| (0..v).rev().map(move |u| (u, v))).collect();
        let (cl_rev, _) = closure_with_scan_order(g, n + 1, &reversed).expect("valid order");
        out.check(cl_rev == cl, Some(g), "closure", || "closure depends on scan order".into());
        let (a, b) = (oracle(g), oracle(&cl));
        out.check(a != Verdict::Timeout && a == b, Some(g), "closure", || {
            format!("oracle(G) = {a:?} but oracle(closure) = {b:?}")
        });
        out
    });
    Ok(report.finish())
}

fn kelmans_suite(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let count = p.count.unwrap_or(1000);
    let seed = p.seed.unwrap_or(1);
    let max_n = p.n.as_ref().and_then(|v| v.iter().max().copied()).unwrap_or(30);
    if max_n < 3 {
        return Err(SuiteError::BadParameters("kelmans needs n >= 3".into()));
    }
    let mut report = SuiteReport::new("kelmans")
        .param("count", count)
        .param("max_n", max_n)
        .param("seed", seed);
    let mut rng = SplitMix64::new(seed);
    let mut cases = Vec::with_capacity(count);
    let mut skipped = 0usize;
    while cases.len() < count {
        let n = 3 + rng.below_usize(max_n - 2);
        let prob = 0.05 + 0.45 * rng.next_f64();
        let g = random::connected(&mut rng, n, prob);
        let u = rng.below_usize(n);
        let v = (u + 1 + rng.below_usize(n - 1)) % n;
        let gs = kelmans(&g, u, v).expect("distinct in-range vertices");
        if gs.is_connected() {
            cases.push((g, u, v, gs));
        } else {
            skipped += 1;
        }
    }
    run_cases(&mut report, &cases, |(g, u, v, gs)| {
        let mut out = CaseOutcome::default();
        let case = format!("kelmans u={u} v={v}");
        match (perron(g), perron(gs)) {
            (Ok(a), Ok(b)) => {
                out.check(b.q_hat >= a.q_hat - 1e-8, Some(g), case.clone(), || {
                    format!("q(G*) = {} < q(G) = {} by {:e}", b.q_hat, a.q_hat, a.q_hat - b.q_hat)
                });
                let (ea, eb) = (a.exact_enclosure(g), b.exact_enclosure(gs));
                if let (Ok(ea), Ok(eb)) = (ea, eb) {
                    out.check(ea.lo <= eb.hi, Some(g), case, || {
                        format!("certified lo(G) = {} exceeds certified hi(G*) = {}", ea.lo, eb.hi)
                    });
                }
            }
            (a, b) => out.check(false, Some(g), case, || format!("spectral failure: {:?} / {:?}", a.err(), b.err())),
        }
        out
    });
    report.notes.push(format!("{skipped} draws with disconnected G* skipped"));
    Ok(report.finish())
}

fn qbound(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let count = p.count.unwrap_or(10_000);
    let seed = p.seed.unwrap_or(1);
    let max_n = p.n.as_ref().and_then(|v| v.iter().max().copied()).unwrap_or(50);
    if max_n < 2 {
        return Err(SuiteError::BadParameters("qbound needs n >= 2".into()));
    }
    let mut report = SuiteReport::new("qbound")
        .param("count", count)
        .param("max_n", max_n)
        .param("seed", seed);
    let mut rng = SplitMix64::new(seed);
    let graphs: Vec<Graph> = (0..count)
        .map(|_| {
            let n = 2 + rng.below_usize(max_n - 1);
            let prob = 0.6 * rng.next_f64();
            random::connected(&mut rng, n, prob)
        })
        .collect();
    run_cases(&mut report, &graphs, |g| {
        let mut out = CaseOutcome::default();
        let bound = upper_bound_edge_count(g).expect("connected");
        match perron(g) {
            Ok(est) => {
                let slack = bound.to_f64() - est.q_hat;
                out.check(slack >= -1e-9, Some(g), "qbound", || format!("q = {} exceeds bound {bound} (slack {slack:e})", est.q_hat));
                if let Ok(x) = est.exact_enclosure(g) {
                    out.check(x.lo <= bound, Some(g), "qbound exact", || format!("certified lo {} exceeds bound {bound}", x.lo));
                }
            }
            Err(e) => out.check(false, Some(g), "qbound", || e),
        }
        out
    });
    Ok(report.finish())
}

fn eigen_equation(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ns = p.n.clone().unwrap_or_else(|| (3..=200).collect());
    if ns.iter().any(|&n| n < 3) {
        return Err(SuiteError::BadParameters("eigen-equation needs n >= 3".into()));
    }
    let mut report = SuiteReport::new("eigen-equation").param("n", show_list(&ns));
    let mut cases = Vec::new();
    for &n in &ns {
        cases.push((Graph::complete(n).expect("n >= 3"), 2 * n as i64 - 2));
        cases.push((Graph::cycle(n).expect("n >= 3"), 4));
    }
    run_cases(&mut report, &cases, |(g, expected)| {
        let mut out = CaseOutcome::default();
        let case = format!("n={}", g.n());
        match perron(g) {
            Ok(est) => {
                let err = (est.q_hat - *expected as f64).abs();
                out.check(err <= 1e-9, Some(g), case.clone(), || format!("q = {} differs from {expected} by {err:e}", est.q_hat));
                let res = eigen_residual(g, est.q_hat, &est.f).unwrap_or(f64::INFINITY);
                out.check(res <= 1e-8, Some(g), case.clone(), || format!("residual {res:e}"));
                if let Ok(x) = est.exact_enclosure(g) {
                    let e = ri(*expected);
                    out.check(x.lo <= e && e <= x.hi, Some(g), case, || format!("[{}, {}] misses {expected}", x.lo, x.hi));
                }
            }
            Err(e) => out.check(false, Some(g), case, || e),
        }
        out
    });
    Ok(report.finish())
}

/// A random graph on `n` vertices with more than `C(n−k,2)+k(k+1)` edges
/// and minimum degree at least `k`. Half the draws are spanning subgraphs
/// of a host, half are uniform `G(n, m)`.
pub fn dense_above_edge_threshold(rng: &mut SplitMix64, n: usize, k: usize) -> Result<Graph, FamilyError> {
    let th = thresholds(k).edge(n);
    let total = n * (n - 1) / 2;
    if th >= total {
        return Err(FamilyError::BadParameters { n, k });
    }
    loop {
        let g = if rng.next_u64() & 1 == 0 {
            let kind = if rng.next_u64() & 1 == 0 { FamilyKind::S } else { FamilyKind::T };
            let host = build(kind, n, k)?.graph;
            if host.m() <= th {
                continue;
            }
            let m = th + 1 + rng.below_usize(host.m() - th);
            let edges: Vec<_> = host.edges().collect();
            let drop = rng.sample_indices(edges.len(), host.m() - m);
            let gone = drop.into_iter().map(|i| edges[i]).collect();
            host.delete_edges(&gone).expect("host edges")
        } else {
            let m = th + 1 + rng.below_usize(total - th);
            random::gnm(rng, n, m)
        };
        if g.min_degree() >= k {
            return Ok(random::relabel(rng, &g).0);
        }
    }
}

/// Config that never calls the oracle, so hunts compare two independent
/// answers.
pub fn oracle_free_config() -> CertifyConfig {
    CertifyConfig { oracle_gate: 0, dense_gate: 0, ..CertifyConfig::default() }
}

fn edge_count(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ns = p.n.clone().unwrap_or_else(|| vec![22]);
    let ks = p.k.clone().unwrap_or_else(|| vec![2]);
    let count = p.count.unwrap_or(100);
    let seed = p.seed.unwrap_or(7);
    let mut report = SuiteReport::new("edge-count")
        .param("k", show_list(&ks))
        .param("n", show_list(&ns))
        .param("count", count)
        .param("seed", seed);
    let mut rng = SplitMix64::new(seed);
    let mut cases = Vec::new();
    for &k in &ks {
        for &n in &ns {
            if n < 11 * k {
                return Err(SuiteError::BadParameters(format!("edge-count needs n >= 11k, got n = {n}, k = {k}")));
            }
            for _ in 0..count {
                cases.push((k, dense_above_edge_threshold(&mut rng, n, k)?, true));
            }
            // graphs sitting exactly on the threshold
            for kind in [FamilyKind::S, FamilyKind::T] {
                let host = build(kind, n, k)?.graph;
                let th = thresholds(k).edge(n);
                let edges: Vec<_> = host.edges().filter(|&(u, v)| host.degree(u) > k && host.degree(v) > k).collect();
                if host.m() > th && host.m() - th <= edges.len() {
                    let drop = rng.sample_indices(edges.len(), host.m() - th);
                    let g = host.delete_edges(&drop.into_iter().map(|i| edges[i]).collect()).expect("host edges");
                    cases.push((k, g, false));
                }
            }
        }
    }
    let cfg = oracle_free_config();
    run_cases(&mut report, &cases, |(k, g, above)| {
        let mut out = CaseOutcome::default();
        let cert = certify(g, &cfg);
        let fired = cert
            .trace
            .iter()
            .any(|t| t.condition == FiredCondition::EdgeCount(*k) && t.verdict == StepVerdict::Fired);
        if !above {
            out.check(!fired, Some(g), "at threshold", || "edge-count step fired at equality".into());
            return out;
        }
        let case = format!("k={k} m={}", g.m());
        out.check(
            matches!(cert.outcome, Outcome::CertifiedHamiltonConnected | Outcome::ExceptionalFamily),
            Some(g),
            case.clone(),
            || format!("outcome {:?} above the edge threshold", cert.outcome),
        );
        let v = oracle(g);
        out.check(v != Verdict::Timeout, Some(g), case.clone(), || "oracle timeout".into());
        let agree = match v {
            Verdict::Yes => !cert.implies_not_connected(),
            Verdict::No => !cert.claims_connected(),
            Verdict::Timeout => true,
        };
        out.check(agree, Some(g), case, || format!("certifier says {:?}, oracle says {v:?}", cert.outcome));
        out
    });
    Ok(report.finish())
}

fn spectral_theorem(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| vec![2]);
    let count = p.count.unwrap_or(100);
    let seed = p.seed.unwrap_or(1);
    let mut report = SuiteReport::new("spectral-theorem")
        .param("k", show_list(&ks))
        .param("count", count)
        .param("seed", seed);
    if let Some(ns) = &p.n {
        report = report.param("n", show_list(ns));
    }
    let mut rng = SplitMix64::new(seed);
    // (k, graph, known class)
    let mut cases: Vec<(usize, Graph, Option<ClassId>)> = Vec::new();
    for &k in &ks {
        let ns = p.n.clone().unwrap_or_else(|| vec![thresholds(k).n_min as usize]);
        for n in ns {
            for class in [ClassId::S1, ClassId::S2, ClassId::T1, ClassId::T2] {
                let mode = EnumMode::Sample { seed: rng.next_u64(), count: count.div_ceil(8) };
                for h in enumerate_class(class, n, k, mode, DEFAULT_ENUM_BUDGET)? {
                    cases.push((k, random::relabel(&mut rng, &h.graph).0, Some(class)));
                }
            }
            for _ in 0..count / 2 {
                cases.push((k, dense_above_edge_threshold(&mut rng, n, k)?, None));
            }
        }
    }
    let cfg = oracle_free_config();
    run_cases(&mut report, &cases, |(k, g, class)| {
        let mut out = CaseOutcome::default();
        let n = g.n();
        let t = ri(thresholds(*k).spectral(n));
        let case = format!("k={k} class={}", class.map_or("random".to_string(), |c| c.to_string()));
        let exact = match perron(g).and_then(|e| e.exact_enclosure(g).map_err(|e| e.to_string())) {
            Ok(x) => x,
            Err(e) => {
                out.check(false, Some(g), case, || e);
                return out;
            }
        };
        if exact.proves_at_least(&t) {
            let th = thresholds(*k).edge(n);
            out.check(g.m() > th, Some(g), case.clone(), || format!("q >= {t} but m = {} <= {th}", g.m()));
        }
        let cert = certify(g, &cfg);
        for entry in &cert.trace {
            if entry.condition == FiredCondition::Spectral(*k) && entry.verdict == StepVerdict::Fired {
                out.check(exact.proves_at_least(&t), Some(g), case.clone(), || "spectral step fired without lo >= 2n-2k".into());
                let in_first = [ClassId::S1, ClassId::T1].iter().any(|&c| membership(g, c, *k).is_some());
                out.check(!in_first, Some(g), case.clone(), || "spectral step fired on a class-1 member".into());
            }
        }
        match class {
            Some(c) if c.is_first() => {
                out.check(exact.proves_at_least(&t), Some(g), case.clone(), || format!("class-1 lo {} below {t}", exact.lo));
                out.check(!cert.claims_connected(), Some(g), case, || format!("class-1 member certified: {:?}", cert.outcome));
            }
            Some(_) => {
                out.check(exact.proves_below(&t), Some(g), case.clone(), || format!("class-2 hi {} not below {t}", exact.hi));
                let fired = cert
                    .trace
                    .iter()
                    .any(|e| e.condition == FiredCondition::Spectral(*k) && e.verdict == StepVerdict::Fired);
                out.check(!fired, Some(g), case, || "spectral step fired on a class-2 member".into());
            }
            None => {}
        }
        out
    });
    Ok(report.finish())
}

fn resolve_mode(p: &SuiteParams, default_count: usize, salt: u64) -> (Mode, EnumMode) {
    let mode = p.mode.unwrap_or(Mode::Exhaustive);
    let em = match mode {
        Mode::Exhaustive => EnumMode::Exhaustive,
        Mode::Sample => EnumMode::Sample { seed: p.seed.unwrap_or(1) ^ salt, count: p.count.unwrap_or(default_count) },
    };
    (mode, em)
}

fn class_params(report: SuiteReport, p: &SuiteParams, ks: &[usize], mode: Mode, default_count: usize) -> SuiteReport {
    let mut r = report.param("k", show_list(ks)).param("mode", mode);
    if mode == Mode::Sample {
        r = r.param("count", p.count.unwrap_or(default_count)).param("seed", p.seed.unwrap_or(1));
    }
    if let Some(ns) = &p.n {
        r = r.param("n", show_list(ns));
    }
    r
}

/// `e(Y, X)`: edges between the low-degree vertices and the clique part
/// of the host that `Y ∪ Z`'s indicator vector sees.
fn yx_edges(kind: FamilyKind, k: usize) -> i64 {
    match kind {
        FamilyKind::S => (k * (k - 1)) as i64,
        FamilyKind::T => 2 * (k as i64 - 1),
    }
}

fn q_lower(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| vec![2, 3]);
    let (mode, em) = resolve_mode(p, 500, 0);
    let mut report = class_params(SuiteReport::new("q-lower"), p, &ks, mode, 500);
    for &k in &ks {
        let ns = p.n.clone().unwrap_or_else(|| vec![thresholds(k).n_min as usize, 40]);
        for n in ns {
            for class in [ClassId::S1, ClassId::T1] {
                let stream = enumerate_class(class, n, k, em, DEFAULT_ENUM_BUDGET)?;
                let t = thresholds(k).spectral(n);
                let yz = (n - k + 1) as i64;
                for h in stream {
                    let mut out = CaseOutcome::default();
                    let r = rayleigh_quotient_exact(&h.graph, &h.yz_indicator()).expect("nonzero vector");
                    let e1 = h.deleted.len() as i64;
                    let expected = &ri(t) + &RationalValue::new(yx_edges(h.kind, k) - 4 * e1, yz);
                    let case = format!("{class} k={k} n={n} |E'|={e1}");
                    out.check(r == expected, Some(&h.graph), case.clone(), || format!("Rayleigh {r} differs from {expected}"));
                    out.check(r >= ri(t), Some(&h.graph), case, || format!("Rayleigh {r} below {t}"));
                    report.absorb(out);
                }
            }
        }
    }
    Ok(report.finish())
}

struct UpperCase {
    handle: FamilyHandle,
    q_hat: f64,
}

fn claim_two(h: &FamilyHandle, est: &SpectralEstimate, out: &mut CaseOutcome, case: &str) {
    let k = h.k as f64;
    let max_x = h.x.iter().map(|&v| est.f[v]).fold(0.0, f64::max);
    let bound = k / (est.q_hat - k);
    out.check(max_x <= bound + 1e-8, Some(&h.graph), case, || format!("max f on X = {max_x} exceeds k/(q-k) = {bound}"));
}

/// Ordering, spread and quadratic-form checks that hold for the member of
/// largest `q`.
fn maximizer_claims(h: &FamilyHandle, est: &SpectralEstimate, out: &mut CaseOutcome, case: &str) {
    let g = &h.graph;
    let f = &est.f;
    let (n, k) = (h.n as f64, h.k as f64);
    let q = est.q_hat;
    let (y1, y2) = h.y_split();
    let (z1, _) = h.z_split();
    for &u in &y1 {
        for &v in y2.iter().chain(&z1) {
            out.check(f[u] > f[v], Some(g), case, || format!("ordering fails: f[{u}] = {} <= f[{v}] = {}", f[u], f[v]));
        }
    }
    let yz = 0..h.yz_len();
    let hi = yz.clone().map(|v| f[v]).fold(f64::MIN, f64::max);
    let lo = yz.map(|v| f[v]).fold(f64::MAX, f64::min);
    let spread_bound = (k * k + 6.0 * k + 6.0) / (2.0 * (q - n + 1.0));
    out.check(hi - lo <= spread_bound + 1e-8, Some(g), case, || {
        format!("spread {} exceeds {spread_bound}", hi - lo)
    });

    let sq = |u: usize, v: usize| (f[u] + f[v]) * (f[u] + f[v]);
    let yz_len = h.yz_len();
    let extra: Vec<_> = g.edges().filter(|&(u, v)| u >= yz_len || v >= yz_len).collect();
    let gain: f64 = extra.iter().map(|&(u, v)| sq(u, v)).sum();
    let loss: f64 = h.deleted.iter().map(|(u, v)| sq(u, v)).sum();
    let a = extra.len() as f64 * (1.0 + k / (q - k)).powi(2);
    let b = 4.0 * h.deleted.len() as f64 * (1.0 - spread_bound).powi(2);
    out.check(gain - loss <= a - b + 1e-8, Some(g), case, || format!("quadratic-form gap {} exceeds A - B = {}", gain - loss, a - b));
    out.check(a - b < 0.0, Some(g), case, || format!("A - B = {} is not negative", a - b));
}

fn q_upper(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| vec![2]);
    let (mode, em) = resolve_mode(p, 200, 0);
    let mut report = class_params(SuiteReport::new("q-upper"), p, &ks, mode, 200);
    for &k in &ks {
        let ns = p.n.clone().unwrap_or_else(|| vec![thresholds(k).n_min as usize]);
        for n in ns {
            let t = thresholds(k).spectral(n);
            for class in [ClassId::S2, ClassId::T2] {
                let members: Vec<FamilyHandle> = enumerate_class(class, n, k, em, DEFAULT_ENUM_BUDGET)?.collect();
                let results: Vec<(CaseOutcome, Option<UpperCase>)> = members
                    .into_par_iter()
                    .map(|h| {
                        let mut out = CaseOutcome::default();
                        let case = format!("{class} k={k} n={n}");
                        let claim1 = rayleigh_quotient_exact(&h.graph, &h.yz_indicator()).expect("nonzero vector");
                        out.check(claim1 > ri(t - 1), Some(&h.graph), case.clone(), || {
                            format!("indicator Rayleigh {claim1} not above {}", t - 1)
                        });
                        let est = match perron(&h.graph) {
                            Ok(e) => e,
                            Err(e) => {
                                out.check(false, Some(&h.graph), case, || e);
                                return (out, None);
                            }
                        };
                        match est.exact_enclosure(&h.graph) {
                            Ok(x) => {
                                out.check(x.proves_below(&ri(t)), Some(&h.graph), case.clone(), || {
                                    format!("certified hi {} not below {t}", x.hi)
                                });
                                out.check(x.lo > ri(t - 1), Some(&h.graph), case.clone(), || {
                                    format!("certified lo {} not above {}", x.lo, t - 1)
                                });
                            }
                            Err(e) => out.check(false, Some(&h.graph), case.clone(), || e.to_string()),
                        }
                        claim_two(&h, &est, &mut out, &case);
                        (out, Some(UpperCase { q_hat: est.q_hat, handle: h }))
                    })
                    .collect();
                let mut best: Option<UpperCase> = None;
                for (out, uc) in results {
                    report.absorb(out);
                    if let Some(uc) = uc {
                        if best.as_ref().is_none_or(|b| uc.q_hat > b.q_hat) {
                            best = Some(uc);
                        }
                    }
                }
                if mode == Mode::Sample {
                    // sampled members need not contain the maximizer; scan the orbit window
                    best = None;
                    let window: Vec<FamilyHandle> =
                        enumerate_class(class, n, k, EnumMode::OrbitWindow, DEFAULT_ENUM_BUDGET)?.collect();
                    let scored: Vec<(f64, FamilyHandle)> = window
                        .into_par_iter()
                        .filter_map(|h| perron(&h.graph).ok().map(|e| (e.q_hat, h)))
                        .collect();
                    for (q_hat, handle) in scored {
                        if best.as_ref().is_none_or(|b| q_hat > b.q_hat) {
                            best = Some(UpperCase { q_hat, handle });
                        }
                    }
                }
                let Some(best) = best else { continue };
                let h = &best.handle;
                let mut out = CaseOutcome::default();
                let case = format!("{class} k={k} n={n} maximizer");
                match perron(&h.graph) {
                    Ok(est) => maximizer_claims(h, &est, &mut out, &case),
                    Err(e) => out.check(false, Some(&h.graph), case, || e),
                }
                report.absorb(out);
                report.notes.push(format!(
                    "{class} k={k} n={n}: maximizer deletes {:?}, q = {:.9}, margin {:.9}",
                    h.deleted.to_vec(),
                    best.q_hat,
                    t as f64 - best.q_hat
                ));
            }
        }
    }
    Ok(report.finish())
}

fn appendix(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| (2..=12).collect());
    let mut report = SuiteReport::new("appendix").param("k", show_list(&ks));
    if let Some(ns) = &p.n {
        report = report.param("n", show_list(ns));
    }
    for &k in &ks {
        let n_min = thresholds(k).n_min as usize;
        let ns = p.n.clone().unwrap_or_else(|| vec![n_min, n_min + 1000]);
        for n in ns {
            let mut out = CaseOutcome::default();
            let case = format!("k={k} n={n}");
            let r = match appendix_check(k, n) {
                Ok(r) => r,
                Err(FamilyError::BelowThreshold { report: r, .. }) => {
                    out.check(false, None, case.clone(), || format!("n below n_min = {n_min}"));
                    *r
                }
                Err(e) => return Err(e.into()),
            };
            out.check(r.holds, None, case.clone(), || format!("inequality fails with margin {}", r.margin));
            let sum = &(&(&r.a1 + &r.a2) + &r.a3) - &r.a4;
            out.check(&r.bound - &sum == r.margin, None, case.clone(), || "margin does not match its terms".into());
            out.check(r.e1 == class_bound(ClassId::S2, k), None, case.clone(), || {
                format!("|E'| = {} differs from the class-2 size {}", r.e1, class_bound(ClassId::S2, k))
            });
            out.check(r.max_a_minus_min_b.is_negative(), None, case, || {
                format!("max A - min B = {} is not negative", r.max_a_minus_min_b)
            });
            report.absorb(out);
        }
    }
    Ok(report.finish())
}

fn corollary(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| vec![3, 4, 5]);
    let ns = p.n.clone().unwrap_or_else(|| vec![30, 60]);
    let mut report = SuiteReport::new("corollary").param("k", show_list(&ks)).param("n", show_list(&ns));
    let mut cases = Vec::new();
    for &k in &ks {
        if k == 2 {
            report.notes.push("k=2 skipped: the two hosts coincide".into());
            continue;
        }
        for &n in &ns {
            cases.push((k, n, build(FamilyKind::S, n, k)?.graph, build(FamilyKind::T, n, k)?.graph));
        }
    }
    run_cases(&mut report, &cases, |(k, n, s, t)| {
        let mut out = CaseOutcome::default();
        let case = format!("k={k} n={n}");
        let enc = |g: &Graph| perron(g).and_then(|e| e.exact_enclosure(g).map_err(|e| e.to_string()));
        match (enc(s), enc(t)) {
            (Ok(xs), Ok(xt)) => {
                let gap1 = (&xs.lo - &xt.hi).to_f64();
                let gap2 = (&xt.lo - &ri(thresholds(*k).spectral(*n))).to_f64();
                out.check(gap1 > 1e-6, Some(s), case.clone(), || format!("q(S) - q(T) gap {gap1:e}"));
                out.check(gap2 > 1e-6, Some(t), case, || format!("q(T) - (2n-2k) gap {gap2:e}"));
            }
            (a, b) => out.check(false, Some(s), case, || format!("spectral failure: {:?} / {:?}", a.err(), b.err())),
        }
        out
    });
    Ok(report.finish())
}

fn family_nonhc(p: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let ks = p.k.clone().unwrap_or_else(|| vec![2, 3]);
    let ns = p.n.clone().unwrap_or_else(|| (8..=12).collect());
    let (mode, em) = resolve_mode(p, 100, 0);
    let mut report = class_params(SuiteReport::new("family-nonhc"), p, &ks, mode, 100);
    if p.n.is_none() {
        report = report.param("n", show_list(&ns));
    }
    let mut cases = Vec::new();
    for &k in &ks {
        for &n in &ns {
            for class in [ClassId::S1, ClassId::T1] {
                cases.extend(enumerate_class(class, n, k, em, DEFAULT_ENUM_BUDGET)?.map(|h| (class, h)));
            }
        }
    }
    run_cases(&mut report, &cases, |(class, h)| {
        let mut out = CaseOutcome::default();
        let v = oracle(&h.graph);
        out.check(v == Verdict::No, Some(&h.graph), format!("{class} k={} n={}", h.k, h.n), || {
            format!("oracle says {v:?}")
        });
        out
    });
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_anchor_has_a_suite() {
        for (anchor, suite) in ANCHORS {
            assert!(SUITES.contains(suite), "{anchor} maps to missing suite {suite}");
        }
        for suite in SUITES {
            assert!(ANCHORS.iter().any(|(_, s)| s == suite), "suite {suite} checks nothing");
        }
    }

    #[test]
    fn list_syntax() {
        assert_eq!(parse_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_list("2,3").unwrap(), vec![2, 3]);
        assert_eq!(parse_list("1,4..=5").unwrap(), vec![1, 4, 5]);
        assert!(parse_list("5..2").is_err());
        assert!(parse_list("").is_err());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &SuiteParams::default()), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn small_runs_pass() {
        let p = SuiteParams { count: Some(20), ..Default::default() };
        for id in ["kelmans", "qbound"] {
            let r = run_suite(id, &p).unwrap();
            assert!(r.passed(), "{id}: {:?}", r.failures);
            assert_eq!(r.cases, 20);
        }
        let r = run_suite("appendix", &SuiteParams { k: Some(vec![2, 3]), ..Default::default() }).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases, 4);
    }

    #[test]
    fn reports_are_deterministic() {
        let p = SuiteParams { count: Some(30), seed: Some(5), ..Default::default() };
        let a = serde_json::to_string(&run_suite("kelmans", &p).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite("kelmans", &p).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn below_threshold_appendix_is_a_failure() {
        let p = SuiteParams { k: Some(vec![3]), n: Some(vec![100]), ..Default::default() };
        let r = run_suite("appendix", &p).unwrap();
        assert!(!r.passed());
    }
}
