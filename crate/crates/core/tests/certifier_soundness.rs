use hamq_core::certifier::{certify, CertifyConfig, FiredCondition, Outcome, StepVerdict};
use hamq_core::corpus::connected_graphs;
use hamq_core::families::{build, build_s, family_member, thresholds, FamilyKind};
use hamq_core::hamilton::{is_hamilton_connected_with, OracleOptions, Verdict};
use hamq_core::random::gnp;
use hamq_core::rng::SplitMix64;
use hamq_core::{EdgeSet, Graph, RationalValue};

fn oracle(g: &Graph) -> Verdict {
    let opts = OracleOptions { closure_gate: false, keep_paths: false, ..OracleOptions::default() };
    is_hamilton_connected_with(g, opts).unwrap().verdict
}

fn assert_consistent(g: &Graph, cfg: &CertifyConfig) {
    let cert = certify(g, cfg);
    let v = oracle(g);
    if cert.claims_connected() {
        assert_eq!(v, Verdict::Yes, "{:?} on {}", cert.outcome, hamq_core::io::emit_graph6(g));
    }
    if cert.implies_not_connected() {
        assert_eq!(v, Verdict::No, "{:?} on {}", cert.outcome, hamq_core::io::emit_graph6(g));
    }
}

#[test]
fn certifier_agrees_with_oracle_on_random_graphs() {
    let cfg = CertifyConfig::default();
    let mut rng = SplitMix64::new(2024);
    for _ in 0..10_000 {
        let n = 3 + rng.below_usize(8);
        let p = rng.next_f64();
        let g = gnp(&mut rng, n, p);
        assert_consistent(&g, &cfg);
    }
}

#[test]
fn certifier_agrees_with_oracle_on_connected_corpus() {
    let cfg = CertifyConfig { oracle_gate: 0, dense_gate: 0, ..CertifyConfig::default() };
    for n in 3..=7 {
        for g in connected_graphs(n).unwrap() {
            assert_consistent(&g, &cfg);
        }
    }
}

#[test]
fn published_thresholds() {
    let n_min: Vec<u64> = (2..=5).map(|k| thresholds(k).n_min).collect();
    assert_eq!(n_min, vec![92, 270, 652, 1352]);
    let t = thresholds(2);
    assert_eq!((t.edge(22), t.spectral(92), t.order_edge_thm), (196, 180, 22));
}

#[test]
fn edge_count_needs_strict_excess() {
    // drop edges from S_22^2 until exactly at the threshold; the edge step must not fire
    let host = build(FamilyKind::S, 22, 2).unwrap().graph;
    let th = thresholds(2).edge(22);
    let drop: Vec<_> = host.edges().filter(|&(u, v)| u >= 2 && v < 21).take(host.m() - th).collect();
    let g = host.delete_edges(&EdgeSet::from_pairs(drop).unwrap()).unwrap();
    assert_eq!(g.m(), th);
    let cert = certify(&g, &CertifyConfig::default());
    let edge = cert.trace.iter().find(|t| t.condition == FiredCondition::EdgeCount(2)).unwrap();
    assert_eq!(edge.verdict, StepVerdict::Failed);
}

#[test]
fn spectral_step_respects_the_certified_interval() {
    // every class-2 member at n_min sits strictly below the threshold, so the
    // spectral step for k = 2 may not fire
    let base = build_s(92, 2).unwrap();
    for e in [(0, 1), (0, 5), (5, 9), (2, 90)] {
        let m = family_member(&base, &EdgeSet::from_pairs([e]).unwrap()).unwrap();
        let cert = certify(&m.graph, &CertifyConfig::default());
        let sp = cert.trace.iter().find(|t| t.condition == FiredCondition::Spectral(2)).unwrap();
        assert_ne!(sp.verdict, StepVerdict::Fired);
        assert!(cert.parameters.q_hi.clone().unwrap() < RationalValue::integer(180));
        assert!(!cert.claims_connected());
    }
}

#[test]
fn hosts_are_exceptional() {
    for (kind, n, k) in [(FamilyKind::S, 22, 2), (FamilyKind::T, 33, 3), (FamilyKind::S, 33, 3)] {
        let g = build(kind, n, k).unwrap().graph;
        let cert = certify(&g, &CertifyConfig::default());
        assert_eq!(cert.outcome, Outcome::ExceptionalFamily, "{kind:?} n={n} k={k}");
        assert_eq!(cert.exit_code(), 1);
    }
}
