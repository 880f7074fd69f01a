//! The certification pipeline.
//!
//! Conditions are tried in order of cost: the Ore-type degree condition,
//! completeness of `cl_{n+1}(G)`, the edge-count condition for each `k` from
//! `δ(G)` down to 2, the spectral condition `q(G) >= 2n − 2k`, the variant
//! `q(G) >= q(S_n^k)`, and finally the exact oracle when the size gate
//! allows it. The first condition that fires decides the outcome. A graph
//! that meets a condition's numeric hypothesis but embeds in, or belongs
//! to, one of the extremal families is reported as exceptional instead.

use std::fmt;

use serde::Serialize;

use crate::families::{
    self, build_s, membership, spanning_subgraph_of, thresholds, ClassId, FamilyKind, FamilyWitness, DEFAULT_EMBED_BUDGET,
};
use crate::graph::{Edge, Graph};
use crate::hamilton::{self, ore_check, OracleOptions, Verdict, Witness};
use crate::rational::RationalValue;
use crate::spectral::{perron_pair_default, ExactEnclosure, SpectralError, SpectralEstimate};
use crate::transforms::{closure, ClosureTrace};

#[derive(Debug, Clone, Copy)]
pub struct CertifyConfig {
    /// Run the oracle whenever `n <= oracle_gate`.
    pub oracle_gate: usize,
    /// Run the oracle on dense exceptional graphs up to this order.
    pub dense_gate: usize,
    pub oracle_budget: u64,
    pub embed_budget: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            oracle_gate: 9,
            dense_gate: 24,
            oracle_budget: hamilton::DEFAULT_BUDGET,
            embed_budget: DEFAULT_EMBED_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    CertifiedHamiltonConnected,
    ExceptionalFamily,
    NotHamiltonConnected,
    Inconclusive,
    ExactYes,
    ExactNo,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FiredCondition {
    Ore,
    ClosureComplete,
    EdgeCount(usize),
    Spectral(usize),
    CorollarySpectral(usize),
    Oracle,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepVerdict {
    Fired,
    Failed,
    /// Hypotheses met but the graph lies in an exceptional family.
    Escaped,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub required: String,
    pub actual: String,
    pub pass: bool,
}

fn hyp(name: &str, required: impl fmt::Display, actual: impl fmt::Display, pass: bool) -> Hypothesis {
    Hypothesis { name: name.into(), required: required.to_string(), actual: actual.to_string(), pass }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub condition: FiredCondition,
    pub verdict: StepVerdict,
    pub hypotheses: Vec<Hypothesis>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub n: usize,
    pub delta: usize,
    pub m: usize,
    pub q_lo: Option<RationalValue>,
    pub q_hi: Option<RationalValue>,
    pub q_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum CertWitness {
    Membership { class: ClassId, family: FamilyWitness },
    Embedding { family: FamilyWitness },
    NonHamiltonPair { u: usize, v: usize },
    Closure { trace: ClosureTrace },
    LowDegree { vertex: usize, degree: usize },
    Disconnected,
    CutVertex { vertex: usize },
    SeparatingPair { u: usize, v: usize },
}

/// How an exceptional outcome was confirmed non-Hamilton-connected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Confirmation {
    Unconfirmed,
    /// The exact oracle found a pair with no Hamilton path in `G`.
    Oracle { pair: Edge },
    /// A vertex of degree at most 2 or a vertex cut of size at most 2.
    Structural,
    /// `G` spans a subgraph of a host the oracle rejected at this order.
    Host { kind: FamilyKind, k: usize, pair: Edge },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub outcome: Outcome,
    pub fired_condition: FiredCondition,
    pub parameters: Parameters,
    pub witnesses: Vec<CertWitness>,
    pub trace: Vec<TraceEntry>,
    pub confirmation: Option<Confirmation>,
}

impl Outcome {
    pub fn exit_code(self, confirmation: Option<&Confirmation>) -> i32 {
        match self {
            Outcome::CertifiedHamiltonConnected | Outcome::ExactYes => 0,
            Outcome::ExactNo | Outcome::NotHamiltonConnected => 1,
            Outcome::ExceptionalFamily => match confirmation {
                Some(Confirmation::Unconfirmed) | None => 2,
                Some(_) => 1,
            },
            Outcome::Inconclusive => 2,
            Outcome::Timeout => 3,
        }
    }
}

impl Certificate {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code(self.confirmation.as_ref())
    }

    /// True when the outcome asserts that `G` is Hamilton-connected.
    pub fn claims_connected(&self) -> bool {
        matches!(self.outcome, Outcome::CertifiedHamiltonConnected | Outcome::ExactYes)
    }

    /// True when the outcome implies that `G` is not Hamilton-connected.
    pub fn implies_not_connected(&self) -> bool {
        matches!(self.outcome, Outcome::ExceptionalFamily | Outcome::NotHamiltonConnected | Outcome::ExactNo)
    }
}

/// A vertex of degree at most 2 (`n >= 4`) or a vertex cut of size at most
/// 2. Either rules out Hamilton-connectivity: the paths between the two
/// neighbors of a degree-2 vertex, or between the two cut vertices, would
/// have to avoid a whole side.
pub fn structural_obstruction(g: &Graph) -> Option<CertWitness> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    if n >= 4 {
        if let Some(v) = (0..n).find(|&v| g.degree(v) <= 2) {
            return Some(CertWitness::LowDegree { vertex: v, degree: g.degree(v) });
        }
    }
    if !g.is_connected() {
        return Some(CertWitness::Disconnected);
    }
    if let Some(&v) = g.articulation_points().first() {
        return Some(CertWitness::CutVertex { vertex: v });
    }
    if n < 5 {
        return None;
    }
    for a in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&v| v != a).collect();
        let h = g.induced(&rest).expect("in range");
        if let Some(&b) = h.articulation_points().first() {
            let b = rest[b];
            return Some(CertWitness::SeparatingPair { u: a.min(b), v: a.max(b) });
        }
    }
    None
}

struct Spectrum {
    estimate: Option<SpectralEstimate>,
    exact: Option<ExactEnclosure>,
    failure: Option<String>,
}

fn spectrum(g: &Graph) -> Spectrum {
    let est = match perron_pair_default(g) {
        Ok(e) => e,
        Err(SpectralError::NoConvergence { best, .. }) => *best,
        Err(e) => return Spectrum { estimate: None, exact: None, failure: Some(e.to_string()) },
    };
    match est.exact_enclosure(g) {
        Ok(x) => Spectrum { estimate: Some(est), exact: Some(x), failure: None },
        Err(e) => Spectrum { estimate: Some(est), exact: None, failure: Some(e.to_string()) },
    }
}

pub fn certify(g: &Graph, cfg: &CertifyConfig) -> Certificate {
    let n = g.n();
    let delta = g.min_degree();
    let m = g.m();
    let mut cert = Certificate {
        outcome: Outcome::Inconclusive,
        fired_condition: FiredCondition::None,
        parameters: Parameters { n, delta, m, q_lo: None, q_hi: None, q_hat: None },
        witnesses: Vec::new(),
        trace: Vec::new(),
        confirmation: None,
    };
    let fire = |mut cert: Certificate, cond: FiredCondition| {
        cert.outcome = Outcome::CertifiedHamiltonConnected;
        cert.fired_condition = cond;
        cert
    };

    // Ore-type degree condition
    let two_conn = n >= 3 && g.is_2_connected();
    let min_sum = g.non_edges().map(|(u, v)| g.degree(u) + g.degree(v)).min();
    let ore = ore_check(g);
    cert.trace.push(TraceEntry {
        condition: FiredCondition::Ore,
        verdict: if ore { StepVerdict::Fired } else { StepVerdict::Failed },
        hypotheses: vec![
            hyp("2-connected", true, two_conn, two_conn),
            hyp(
                "min degree sum over nonadjacent pairs",
                format!(">= {}", n + 1),
                min_sum.map_or("no nonadjacent pairs".to_string(), |s| s.to_string()),
                min_sum.is_none_or(|s| s > n),
            ),
        ],
        notes: vec![],
    });
    if ore {
        return fire(cert, FiredCondition::Ore);
    }

    // (n+1)-closure
    let (cl, trace) = closure(g, n + 1).expect("n + 1 >= 1");
    let complete = cl.is_complete();
    cert.trace.push(TraceEntry {
        condition: FiredCondition::ClosureComplete,
        verdict: if complete { StepVerdict::Fired } else { StepVerdict::Failed },
        hypotheses: vec![hyp("edges of closure", n * (n - 1) / 2, cl.m(), complete)],
        notes: vec![format!("{} edges added", trace.added.len())],
    });
    if complete {
        cert.witnesses.push(CertWitness::Closure { trace });
        return fire(cert, FiredCondition::ClosureComplete);
    }

    let mut fired = None;
    let mut escape: Option<CertWitness> = None;

    // edge-count condition
    for k in (2..=delta).rev() {
        let th = thresholds(k);
        if n < th.order_edge_thm || 2 * k > n {
            continue;
        }
        let edge = th.edge(n);
        let mut entry = TraceEntry {
            condition: FiredCondition::EdgeCount(k),
            verdict: StepVerdict::Failed,
            hypotheses: vec![
                hyp("order", format!(">= {}", th.order_edge_thm), n, true),
                hyp("minimum degree", format!(">= {k}"), delta, true),
                hyp("edges", format!("> {edge}"), m, m > edge),
            ],
            notes: vec![],
        };
        if m > edge {
            let mut found = None;
            for kind in [FamilyKind::S, FamilyKind::T] {
                match spanning_subgraph_of(g, kind, k, cfg.embed_budget) {
                    Ok(Some(w)) => {
                        found = Some(w);
                        break;
                    }
                    Ok(None) => entry.notes.push(format!("no spanning embedding into {kind:?}_n^{k}")),
                    Err(e) => {
                        entry.notes.push(format!("embedding search into {kind:?}_n^{k}: {e}"));
                        entry.verdict = StepVerdict::Inconclusive;
                    }
                }
            }
            match found {
                Some(w) => {
                    entry.notes.push(format!("spans a subgraph of {:?}_n^{k}", w.kind));
                    entry.verdict = StepVerdict::Escaped;
                    escape = Some(CertWitness::Embedding { family: w });
                }
                None if entry.verdict == StepVerdict::Failed => {
                    entry.verdict = StepVerdict::Fired;
                    fired = Some(FiredCondition::EdgeCount(k));
                }
                None => {}
            }
        }
        let stop = entry.verdict == StepVerdict::Fired || entry.verdict == StepVerdict::Escaped;
        cert.trace.push(entry);
        if stop {
            break;
        }
    }
    if let Some(cond) = fired {
        return fire(cert, cond);
    }

    // spectral conditions
    let ks: Vec<usize> = (2..=delta).rev().filter(|&k| n as u64 >= thresholds(k).n_min).collect();
    if !ks.is_empty() {
        let sp = spectrum(g);
        if let Some(est) = &sp.estimate {
            cert.parameters.q_hat = Some(est.q_hat);
        }
        if let Some(x) = &sp.exact {
            cert.parameters.q_lo = Some(x.lo.clone());
            cert.parameters.q_hi = Some(x.hi.clone());
        }
        for &k in &ks {
            let entry = spectral_step(g, k, &sp, &mut escape);
            let done = entry.verdict == StepVerdict::Fired;
            cert.trace.push(entry);
            if done {
                fired = Some(FiredCondition::Spectral(k));
                break;
            }
        }
        if fired.is_none() {
            for &k in &ks {
                let entry = corollary_step(g, k, &sp, &mut escape);
                let done = entry.verdict == StepVerdict::Fired;
                cert.trace.push(entry);
                if done {
                    fired = Some(FiredCondition::CorollarySpectral(k));
                    break;
                }
            }
        }
    }

    match (fired, escape) {
        (Some(cond), None) => fire(cert, cond),
        (Some(_), Some(w)) => {
            cert.witnesses.push(w);
            cert.trace.last_mut().expect("fired step").notes.push("conflicts with an earlier family escape".into());
            cert
        }
        (None, Some(w)) => {
            cert.outcome = Outcome::ExceptionalFamily;
            let kind_k = match &w {
                CertWitness::Membership { family, .. } | CertWitness::Embedding { family } => Some((family.kind, family.k)),
                _ => None,
            };
            cert.witnesses.push(w);
            confirm_exceptional(g, cfg, kind_k, &mut cert);
            cert
        }
        (None, None) => {
            finish_without_theorem(g, cfg, &mut cert);
            cert
        }
    }
}

fn spectral_step(g: &Graph, k: usize, sp: &Spectrum, escape: &mut Option<CertWitness>) -> TraceEntry {
    let n = g.n();
    let th = thresholds(k);
    let t = RationalValue::integer(th.spectral(n));
    let mut entry = TraceEntry {
        condition: FiredCondition::Spectral(k),
        verdict: StepVerdict::Failed,
        hypotheses: vec![
            hyp("order", format!(">= {}", th.n_min), n, true),
            hyp("minimum degree", format!(">= {k}"), g.min_degree(), true),
        ],
        notes: vec![],
    };
    let Some(x) = &sp.exact else {
        entry.notes.push(sp.failure.clone().unwrap_or_default());
        return entry;
    };
    let proven = x.proves_at_least(&t);
    entry.hypotheses.push(hyp("certified lower bound on q", format!(">= {t}"), &x.lo, proven));
    for class in [ClassId::S2, ClassId::T2] {
        if membership(g, class, k).is_some() {
            entry.notes.push(format!("member of {class} for k = {k}"));
        }
    }
    if !proven {
        if !x.proves_below(&t) {
            entry.verdict = StepVerdict::Inconclusive;
            entry.notes.push(format!("threshold {t} lies inside [{}, {}]", x.lo, x.hi));
        }
        return entry;
    }
    for class in [ClassId::S1, ClassId::T1] {
        match membership(g, class, k) {
            Some(w) => {
                entry.hypotheses.push(hyp(&format!("membership in {class}"), "absent", "present", false));
                entry.verdict = StepVerdict::Escaped;
                if escape.is_none() {
                    *escape = Some(CertWitness::Membership { class, family: w });
                }
                return entry;
            }
            None => entry.hypotheses.push(hyp(&format!("membership in {class}"), "absent", "absent", true)),
        }
    }
    entry.verdict = StepVerdict::Fired;
    entry
}

fn corollary_step(g: &Graph, k: usize, sp: &Spectrum, escape: &mut Option<CertWitness>) -> TraceEntry {
    let n = g.n();
    let th = thresholds(k);
    let mut entry = TraceEntry {
        condition: FiredCondition::CorollarySpectral(k),
        verdict: StepVerdict::Failed,
        hypotheses: vec![
            hyp("order", format!(">= {}", th.n_min), n, true),
            hyp("minimum degree", format!(">= {k}"), g.min_degree(), true),
        ],
        notes: vec![],
    };
    let Some(x) = &sp.exact else {
        entry.notes.push(sp.failure.clone().unwrap_or_default());
        return entry;
    };
    let host = build_s(n, k).expect("n >= n_min > 2k");
    let host_hi = match spectrum(&host.graph).exact {
        Some(h) => h.hi,
        None => {
            entry.notes.push("no enclosure for the host".into());
            return entry;
        }
    };
    let pass = x.lo >= host_hi;
    entry.hypotheses.push(hyp("certified lower bound on q", format!(">= {host_hi} (upper bound on q(S_n^k))"), &x.lo, pass));
    if !pass {
        return entry;
    }
    match membership(g, ClassId::S1, k).filter(|w| w.deleted.is_empty()) {
        Some(w) => {
            entry.hypotheses.push(hyp("isomorphic to S_n^k", false, true, false));
            entry.verdict = StepVerdict::Escaped;
            if escape.is_none() {
                *escape = Some(CertWitness::Membership { class: ClassId::S1, family: w });
            }
        }
        None => {
            entry.hypotheses.push(hyp("isomorphic to S_n^k", false, false, true));
            entry.verdict = StepVerdict::Fired;
        }
    }
    entry
}

fn oracle_trace(answer: &hamilton::OracleAnswer) -> TraceEntry {
    TraceEntry {
        condition: FiredCondition::Oracle,
        verdict: match answer.verdict {
            Verdict::Yes => StepVerdict::Fired,
            Verdict::No => StepVerdict::Failed,
            Verdict::Timeout => StepVerdict::Inconclusive,
        },
        hypotheses: vec![],
        notes: vec![format!("{:?} after {} search nodes", answer.verdict, answer.stats.nodes)],
    }
}

fn run_oracle(g: &Graph, cfg: &CertifyConfig) -> Option<hamilton::OracleAnswer> {
    let opts = OracleOptions { budget: cfg.oracle_budget, closure_gate: false, keep_paths: false };
    hamilton::is_hamilton_connected_with(g, opts).ok()
}

fn is_dense(g: &Graph) -> bool {
    let n = g.n();
    4 * g.m() >= n * (n - 1)
}

fn confirm_exceptional(g: &Graph, cfg: &CertifyConfig, kind_k: Option<(FamilyKind, usize)>, cert: &mut Certificate) {
    let n = g.n();
    if let Some(w) = structural_obstruction(g) {
        cert.witnesses.push(w);
        cert.confirmation = Some(Confirmation::Structural);
        return;
    }
    if n <= cfg.oracle_gate || (is_dense(g) && n <= cfg.dense_gate) {
        if let Some(ans) = run_oracle(g, cfg) {
            cert.trace.push(oracle_trace(&ans));
            match (ans.verdict, ans.witness) {
                (Verdict::No, Witness::NoPair((u, v))) => {
                    cert.witnesses.push(CertWitness::NonHamiltonPair { u, v });
                    cert.confirmation = Some(Confirmation::Oracle { pair: (u, v) });
                    return;
                }
                (Verdict::Yes, _) => {
                    // the oracle is exact; a contradicting family witness is reported, not trusted
                    cert.outcome = Outcome::ExactYes;
                    cert.fired_condition = FiredCondition::Oracle;
                    return;
                }
                _ => {}
            }
        }
    }
    if let Some((kind, k)) = kind_k {
        if n <= hamilton::MAX_ORDER {
            let host = families::build(kind, n, k).expect("witness parameters are valid");
            if let Some(ans) = run_oracle(&host.graph, cfg) {
                if let Witness::NoPair(pair) = ans.witness {
                    cert.confirmation = Some(Confirmation::Host { kind, k, pair });
                    return;
                }
            }
        }
    }
    cert.confirmation = Some(Confirmation::Unconfirmed);
}

fn finish_without_theorem(g: &Graph, cfg: &CertifyConfig, cert: &mut Certificate) {
    resolve_small(g, cfg, cert);
    if cert.implies_not_connected() {
        annotate_family(g, cert);
    }
}

fn resolve_small(g: &Graph, cfg: &CertifyConfig, cert: &mut Certificate) {
    let n = g.n();
    if n <= cfg.oracle_gate {
        if let Some(ans) = run_oracle(g, cfg) {
            cert.trace.push(oracle_trace(&ans));
            match (ans.verdict, ans.witness) {
                (Verdict::Yes, _) => {
                    cert.outcome = Outcome::ExactYes;
                    cert.fired_condition = FiredCondition::Oracle;
                }
                (Verdict::No, Witness::NoPair((u, v))) => {
                    cert.outcome = Outcome::ExactNo;
                    cert.witnesses.push(CertWitness::NonHamiltonPair { u, v });
                }
                _ => cert.outcome = Outcome::Timeout,
            }
            return;
        }
    }
    if let Some(w) = structural_obstruction(g) {
        cert.outcome = Outcome::NotHamiltonConnected;
        cert.witnesses.push(w);
    }
}

/// Records class-1 membership for small graphs the theorems do not reach,
/// so the report shows which family layout explains the failure.
fn annotate_family(g: &Graph, cert: &mut Certificate) {
    let n = g.n();
    for k in 2..=n / 2 {
        for class in [ClassId::S1, ClassId::T1] {
            if n >= 5 {
                if let Some(w) = membership(g, class, k) {
                    cert.witnesses.push(CertWitness::Membership { class, family: w });
                    return;
                }
            }
        }
    }
}

/// Human-readable rendering of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub blocks: Vec<ExplainBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplainBlock {
    pub title: String,
    pub lines: Vec<String>,
}

fn cond_name(c: FiredCondition) -> String {
    match c {
        FiredCondition::Ore => "Ore degree condition".into(),
        FiredCondition::ClosureComplete => "complete (n+1)-closure".into(),
        FiredCondition::EdgeCount(k) => format!("edge count, k = {k}"),
        FiredCondition::Spectral(k) => format!("spectral radius q >= 2n - 2k, k = {k}"),
        FiredCondition::CorollarySpectral(k) => format!("spectral radius q >= q(S_n^k), k = {k}"),
        FiredCondition::Oracle => "exact oracle".into(),
        FiredCondition::None => "none".into(),
    }
}

fn set(vs: &[usize]) -> String {
    let inner: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

pub fn explain(cert: &Certificate) -> Explanation {
    let p = &cert.parameters;
    let mut blocks = vec![ExplainBlock {
        title: "outcome".into(),
        lines: vec![
            format!("{:?} via {}", cert.outcome, cond_name(cert.fired_condition)),
            format!("n = {}, m = {}, minimum degree = {}", p.n, p.m, p.delta),
        ],
    }];
    if let (Some(lo), Some(hi)) = (&p.q_lo, &p.q_hi) {
        blocks[0].lines.push(format!("q in [{:.12}, {:.12}]", lo.to_f64(), hi.to_f64()));
    }
    if let Some(c) = &cert.confirmation {
        blocks[0].lines.push(format!("confirmation: {c:?}"));
    }
    for t in &cert.trace {
        let mut lines: Vec<String> = t
            .hypotheses
            .iter()
            .map(|h| format!("{}: required {}, actual {} [{}]", h.name, h.required, h.actual, if h.pass { "pass" } else { "fail" }))
            .collect();
        lines.extend(t.notes.iter().cloned());
        blocks.push(ExplainBlock { title: format!("{} ({:?})", cond_name(t.condition), t.verdict), lines });
    }
    for w in &cert.witnesses {
        let (title, lines) = match w {
            CertWitness::Membership { class, family } => (
                format!("family membership ({class})"),
                vec![
                    format!("X = {}", set(&family.x)),
                    format!("Y = {}", set(&family.y)),
                    format!("Z = {}", set(&family.z)),
                    format!("deleted = {:?}", family.deleted),
                ],
            ),
            CertWitness::Embedding { family } => (
                format!("spanning embedding into {:?}_n^{}", family.kind, family.k),
                vec![
                    format!("X = {}", set(&family.x)),
                    format!("Y = {}", set(&family.y)),
                    format!("Z = {}", set(&family.z)),
                ],
            ),
            CertWitness::NonHamiltonPair { u, v } => ("non-Hamilton pair".into(), vec![format!("no Hamilton path joins {u} and {v}")]),
            CertWitness::Closure { trace } => (
                "closure trace".into(),
                vec![format!("k = {}, added {:?}", trace.k, trace.added)],
            ),
            CertWitness::LowDegree { vertex, degree } => ("low degree".into(), vec![format!("vertex {vertex} has degree {degree}")]),
            CertWitness::Disconnected => ("disconnected".into(), vec!["the graph is not connected".into()]),
            CertWitness::CutVertex { vertex } => ("cut vertex".into(), vec![format!("removing {vertex} disconnects the graph")]),
            CertWitness::SeparatingPair { u, v } => ("separating pair".into(), vec![format!("removing {u} and {v} disconnects the graph")]),
        };
        blocks.push(ExplainBlock { title, lines });
    }
    Explanation { blocks }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(f, "{}", b.title)?;
            for l in &b.lines {
                writeln!(f, "  {l}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_s, family_member};
    use crate::EdgeSet;

    #[test]
    fn complete_graph_via_ore() {
        let c = certify(&Graph::complete(22).unwrap(), &CertifyConfig::default());
        assert_eq!(c.outcome, Outcome::CertifiedHamiltonConnected);
        assert_eq!(c.fired_condition, FiredCondition::Ore);
        assert_eq!(c.exit_code(), 0);
        let e = explain(&certify(&Graph::complete(4).unwrap(), &CertifyConfig::default()));
        assert!(e.blocks[1].title.starts_with("Ore"));
        assert!(e.blocks[1].lines.iter().all(|l| l.ends_with("[pass]")));
    }

    #[test]
    fn cycle_goes_to_oracle() {
        let c = certify(&Graph::cycle(6).unwrap(), &CertifyConfig::default());
        assert_eq!(c.outcome, Outcome::ExactNo);
        assert_eq!(c.exit_code(), 1);
        assert!(c.trace.iter().all(|t| t.verdict == StepVerdict::Failed));
        assert!(matches!(c.witnesses[0], CertWitness::NonHamiltonPair { .. }));
    }

    #[test]
    fn host_s22_is_exceptional() {
        let s = build_s(22, 2).unwrap();
        assert_eq!(s.graph.m(), 212);
        let c = certify(&s.graph, &CertifyConfig::default());
        assert_eq!(c.outcome, Outcome::ExceptionalFamily);
        let edge = c.trace.iter().find(|t| t.condition == FiredCondition::EdgeCount(2)).unwrap();
        assert_eq!(edge.verdict, StepVerdict::Escaped);
        assert!(matches!(c.confirmation, Some(Confirmation::Structural | Confirmation::Oracle { .. })));
        assert_eq!(c.exit_code(), 1);
    }

    #[test]
    fn s62_explains_membership_layout() {
        let s = build_s(6, 2).unwrap();
        let c = certify(&s.graph, &CertifyConfig::default());
        assert_eq!(c.outcome, Outcome::ExactNo);
        let w = membership(&s.graph, ClassId::S1, 2).unwrap();
        assert_eq!((w.x.clone(), w.y.clone(), w.z.clone()), (vec![5], vec![0, 1], vec![2, 3, 4]));
        assert!(c.witnesses.contains(&CertWitness::Membership { class: ClassId::S1, family: w }));
        let text = explain(&c).to_string();
        assert!(text.contains("X = {5}") && text.contains("Y = {0, 1}") && text.contains("Z = {2, 3, 4}"), "{text}");
    }

    #[test]
    fn s92_minus_edge_is_exceptional_with_class_two_note() {
        let base = build_s(92, 2).unwrap();
        let m = family_member(&base, &EdgeSet::from_pairs([(5, 9)]).unwrap()).unwrap();
        let c = certify(&m.graph, &CertifyConfig::default());
        assert_eq!(c.outcome, Outcome::ExceptionalFamily);
        let sp = c.trace.iter().find(|t| t.condition == FiredCondition::Spectral(2)).unwrap();
        assert_eq!(sp.verdict, StepVerdict::Failed);
        assert!(sp.notes.iter().any(|s| s.contains("S2")));
        let hi = c.parameters.q_hi.clone().unwrap();
        assert!(hi < RationalValue::integer(180));
    }

    #[test]
    fn obstruction_examples() {
        assert!(structural_obstruction(&Graph::complete(5).unwrap()).is_none());
        assert!(matches!(structural_obstruction(&Graph::cycle(6).unwrap()), Some(CertWitness::LowDegree { .. })));
        // two K4's sharing an edge: 3-regular-ish but separated by the shared pair
        let g = Graph::from_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)],
        )
        .unwrap();
        assert_eq!(structural_obstruction(&g), Some(CertWitness::SeparatingPair { u: 0, v: 1 }));
    }

    #[test]
    fn certificate_serializes_with_stable_keys() {
        let c = certify(&Graph::cycle(5).unwrap(), &CertifyConfig::default());
        let v = serde_json::to_value(&c).unwrap();
        for key in ["outcome", "fired_condition", "parameters", "witnesses", "trace"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
