//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or exceeds its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hamq_cli::hunt::{hunt, Model, Trials};
use hamq_cli::suites::{run_suite, Mode, SuiteParams};
use hamq_cli::SuiteReport;
use hamq_core::corpus::connected_graphs;
use hamq_core::families::{appendix_check, thresholds, AppendixBranch};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass_if(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn suite(id: &str, p: SuiteParams) -> SuiteReport {
    run_suite(id, &p).unwrap_or_else(|e| panic!("{id}: {e}"))
}

/// Folds several reports into one verdict and a short summary.
fn combine(reports: &[SuiteReport]) -> Outcome {
    let cases: u64 = reports.iter().map(|r| r.cases).sum();
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures.iter().map(move |f| format!("{} [{}] {}: {}", r.suite, f.graph6, f.case, f.violation)))
        .collect();
    let mut detail = format!("{cases} cases, {} failures", failures.len());
    for f in failures.iter().take(5) {
        detail.push_str("\n      ");
        detail.push_str(f);
    }
    pass_if(failures.is_empty() && cases > 0, detail)
}

fn spectral_sanity() -> Outcome {
    combine(&[suite("eigen-equation", SuiteParams { n: Some((3..=200).collect()), ..Default::default() })])
}

fn edge_count_bound() -> Outcome {
    let r = suite("qbound", SuiteParams { count: Some(10_000), n: Some(vec![50]), seed: Some(1), ..Default::default() });
    combine(&[r])
}

fn kelmans_monotone() -> Outcome {
    let r = suite("kelmans", SuiteParams { count: Some(1000), n: Some(vec![30]), seed: Some(1), ..Default::default() });
    combine(&[r])
}

fn corpus_params() -> SuiteParams {
    SuiteParams { n: Some(vec![6, 7]), count: Some(500), seed: Some(1), ..Default::default() }
}

fn closure_invariance() -> Outcome {
    let counts = (connected_graphs(6).unwrap().len(), connected_graphs(7).unwrap().len());
    let mut o = combine(&[suite("closure", corpus_params())]);
    o.ok &= counts == (112, 853);
    o.detail.push_str(&format!(", corpus sizes {} + {}", counts.0, counts.1));
    o
}

fn ore_sound() -> Outcome {
    combine(&[suite("ore", corpus_params())])
}

fn class_one_lower_bound() -> Outcome {
    let exhaustive = suite("q-lower", SuiteParams { k: Some(vec![2, 3]), mode: Some(Mode::Exhaustive), ..Default::default() });
    let mut reports = vec![exhaustive];
    for k in [4, 5] {
        let n = thresholds(k).n_min as usize;
        reports.push(suite(
            "q-lower",
            SuiteParams { k: Some(vec![k]), n: Some(vec![n]), mode: Some(Mode::Sample), count: Some(500), seed: Some(1) },
        ));
    }
    combine(&reports)
}

fn class_two_upper_bound() -> Outcome {
    let k2 = suite("q-upper", SuiteParams { k: Some(vec![2]), n: Some(vec![92]), mode: Some(Mode::Exhaustive), ..Default::default() });
    let members_k2 = k2.cases;
    let k3 = suite(
        "q-upper",
        SuiteParams { k: Some(vec![3]), n: Some(vec![270]), mode: Some(Mode::Sample), count: Some(200), seed: Some(1) },
    );
    let notes: Vec<String> = k2.notes.iter().chain(&k3.notes).cloned().collect();
    let mut o = combine(&[k2, k3]);
    // 4095 members per family plus one maximizer check each
    o.ok &= members_k2 == 2 * 4095 + 2;
    for n in notes {
        o.detail.push_str("\n      ");
        o.detail.push_str(&n);
    }
    o
}

fn appendix_inequalities() -> Outcome {
    let r = suite("appendix", SuiteParams { k: Some((2..=12).collect()), ..Default::default() });
    let branches: Vec<AppendixBranch> = (2..=12).map(|k| appendix_check(k, thresholds(k).n_min as usize).unwrap().branch).collect();
    let all_four = [AppendixBranch::Zero, AppendixBranch::One, AppendixBranch::Two, AppendixBranch::Three]
        .iter()
        .all(|b| branches.contains(b));
    let mut o = combine(&[r]);
    o.ok &= all_four;
    o.detail.push_str(if all_four { ", all four k mod 4 branches" } else { ", missing a k mod 4 branch" });
    o
}

fn families_not_hamilton_connected() -> Outcome {
    combine(&[suite(
        "family-nonhc",
        SuiteParams { k: Some(vec![2, 3]), n: Some((8..=12).collect()), mode: Some(Mode::Exhaustive), ..Default::default() },
    )])
}

fn certifier_consistency() -> Outcome {
    let runs = [
        hunt(7, Trials::Exhaustive, 0, Model::AllConnected),
        hunt(8, Trials::Count(10_000), 42, Model::Gnp(0.5)),
        hunt(22, Trials::Count(100), 7, Model::DenseAboveEdgeThreshold { k: 2 }),
    ];
    let reports: Vec<SuiteReport> = runs.into_iter().map(|r| r.expect("hunt parameters")).collect();
    let sizes = (reports[0].cases, reports[1].cases, reports[2].cases);
    let mut o = combine(&reports);
    o.ok &= sizes == (853, 10_000, 100);
    o
}

fn host_ordering() -> Outcome {
    let r = suite("corollary", SuiteParams { k: Some(vec![2, 3, 4, 5]), n: Some(vec![30, 60]), ..Default::default() });
    let skipped = r.notes.iter().any(|n| n.starts_with("k=2 skipped"));
    let mut o = combine(&[r]);
    o.ok &= skipped;
    o.detail.push_str(", k=2 skipped (S and T coincide)");
    o
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    (1, "spectral sanity on K_n and C_n, n = 3..200", 10, spectral_sanity),
    (2, "q <= 2m/(n-1) + n - 2 on 10^4 random connected graphs", 120, edge_count_bound),
    (3, "Kelmans operation never lowers q (1000 cases)", 60, kelmans_monotone),
    (4, "oracle(G) = oracle(closure) on n = 6, 7 corpora and 500 random", 300, closure_invariance),
    (5, "Ore condition implies oracle Yes", 300, ore_sound),
    (6, "class-1 exact Rayleigh certificate >= 2n - 2k", 300, class_one_lower_bound),
    (7, "class-2 members below 2n - 2k with supporting claims", 1800, class_two_upper_bound),
    (8, "k mod 4 closing inequality, k = 2..12", 1, appendix_inequalities),
    (9, "class-1 members are not Hamilton-connected, n = 8..12", 600, families_not_hamilton_connected),
    (10, "certifier agrees with the exact oracle in three hunts", 1200, certifier_consistency),
    (11, "q(S) > q(T) > 2n - 2k for k = 3..5, n = 30, 60", 10, host_ordering),
];

fn main() -> ExitCode {
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut all_ok = true;
    for &(id, title, limit, run) in CRITERIA {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let started = Instant::now();
        let outcome = run();
        let elapsed = started.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let ok = outcome.ok && in_time;
        all_ok &= ok;
        println!(
            "{} criterion {id:>2}: {title} ({}; {:.2} s of {limit} s{})",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over the time limit" }
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
