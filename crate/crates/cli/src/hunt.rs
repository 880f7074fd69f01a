//! Randomized and exhaustive consistency search between the certifier and
//! the exact oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use hamq_core::certifier::{certify, Outcome};
use hamq_core::corpus::{connected_graphs, CorpusError};
use hamq_core::families::FamilyError;
use hamq_core::hamilton::Verdict;
use hamq_core::random;
use hamq_core::rng::SplitMix64;
use hamq_core::Graph;

use crate::report::{CaseOutcome, SuiteReport};
use crate::suites::{dense_above_edge_threshold, oracle, oracle_free_config};

#[derive(Debug, Error)]
pub enum HuntError {
    #[error("unknown model {0:?}; expected gnp(p), all-connected or dense-above-edge-threshold(k=K)")]
    BadModel(String),
    #[error("bad trial count {0:?}; expected a number or \"exhaustive\"")]
    BadTrials(String),
    #[error("model {model} needs {need}, got n = {n}")]
    OutOfReach { model: String, need: &'static str, n: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Gnp(f64),
    AllConnected,
    DenseAboveEdgeThreshold { k: usize },
}

impl FromStr for Model {
    type Err = HuntError;

    fn from_str(s: &str) -> Result<Self, HuntError> {
        let bad = || HuntError::BadModel(s.to_string());
        let s = s.trim();
        if s == "all-connected" {
            return Ok(Model::AllConnected);
        }
        let (name, arg) = s.strip_suffix(')').and_then(|r| r.split_once('(')).ok_or_else(bad)?;
        match name {
            "gnp" => {
                let p: f64 = arg.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(Model::Gnp(p))
            }
            "dense-above-edge-threshold" => {
                let k = arg.strip_prefix("k=").unwrap_or(arg).parse().map_err(|_| bad())?;
                Ok(Model::DenseAboveEdgeThreshold { k })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gnp(p) => write!(f, "gnp({p})"),
            Model::AllConnected => f.write_str("all-connected"),
            Model::DenseAboveEdgeThreshold { k } => write!(f, "dense-above-edge-threshold(k={k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trials {
    Count(usize),
    Exhaustive,
}

impl FromStr for Trials {
    type Err = HuntError;

    fn from_str(s: &str) -> Result<Self, HuntError> {
        if s == "exhaustive" {
            return Ok(Trials::Exhaustive);
        }
        s.parse().map(Trials::Count).map_err(|_| HuntError::BadTrials(s.to_string()))
    }
}

impl fmt::Display for Trials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trials::Count(c) => write!(f, "{c}"),
            Trials::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

fn graphs_for(n: usize, trials: Trials, seed: u64, model: Model) -> Result<Vec<Graph>, HuntError> {
    let out_of_reach = |need| HuntError::OutOfReach { model: model.to_string(), need, n };
    let mut rng = SplitMix64::new(seed);
    match model {
        Model::AllConnected => {
            let all = connected_graphs(n)?;
            Ok(match trials {
                Trials::Exhaustive => all,
                Trials::Count(c) => all.into_iter().take(c).collect(),
            })
        }
        Model::Gnp(p) => {
            if n > 10 {
                return Err(out_of_reach("n <= 10"));
            }
            let Trials::Count(c) = trials else {
                return Err(HuntError::BadTrials("exhaustive needs the all-connected model".into()));
            };
            Ok((0..c).map(|_| random::gnp(&mut rng, n, p)).collect())
        }
        Model::DenseAboveEdgeThreshold { k } => {
            if n > 24 {
                return Err(out_of_reach("n <= 24"));
            }
            let Trials::Count(c) = trials else {
                return Err(HuntError::BadTrials("exhaustive needs the all-connected model".into()));
            };
            (0..c).map(|_| dense_above_edge_threshold(&mut rng, n, k).map_err(HuntError::from)).collect()
        }
    }
}

/// Certifies every generated graph without the oracle, then runs the
/// oracle and reports each disagreement.
pub fn hunt(n: usize, trials: Trials, seed: u64, model: Model) -> Result<SuiteReport, HuntError> {
    let graphs = graphs_for(n, trials, seed, model)?;
    let cfg = oracle_free_config();
    let dense = matches!(model, Model::DenseAboveEdgeThreshold { .. });
    let results: Vec<(CaseOutcome, Outcome, Verdict)> = graphs
        .par_iter()
        .map(|g| {
            let mut out = CaseOutcome::default();
            let cert = certify(g, &cfg);
            let v = oracle(g);
            out.check(v != Verdict::Timeout, Some(g), "oracle", || "oracle timeout".into());
            let agree = match v {
                Verdict::Yes => !cert.implies_not_connected(),
                Verdict::No => !cert.claims_connected(),
                Verdict::Timeout => true,
            };
            out.check(agree, Some(g), "disagreement", || format!("certifier says {:?}, oracle says {v:?}", cert.outcome));
            if dense {
                out.check(
                    matches!(cert.outcome, Outcome::CertifiedHamiltonConnected | Outcome::ExceptionalFamily),
                    Some(g),
                    "dense outcome",
                    || format!("outcome {:?} above the edge threshold", cert.outcome),
                );
            }
            (out, cert.outcome, v)
        })
        .collect();
    let mut report = SuiteReport::new("hunt")
        .param("n", n)
        .param("trials", trials)
        .param("seed", seed)
        .param("model", model);
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for (out, outcome, v) in results {
        report.absorb(out);
        *tally.entry(format!("{outcome:?} / oracle {v:?}")).or_default() += 1;
    }
    report.notes.extend(tally.into_iter().map(|(k, c)| format!("{k}: {c}")));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_syntax() {
        assert_eq!("gnp(0.5)".parse::<Model>().unwrap(), Model::Gnp(0.5));
        assert_eq!("all-connected".parse::<Model>().unwrap(), Model::AllConnected);
        assert_eq!(
            "dense-above-edge-threshold(k=2)".parse::<Model>().unwrap(),
            Model::DenseAboveEdgeThreshold { k: 2 }
        );
        assert_eq!("dense-above-edge-threshold(3)".parse::<Model>().unwrap(), Model::DenseAboveEdgeThreshold { k: 3 });
        assert!("gnp(2)".parse::<Model>().is_err());
        assert!("gnm(5)".parse::<Model>().is_err());
        assert_eq!("exhaustive".parse::<Trials>().unwrap(), Trials::Exhaustive);
        assert!("many".parse::<Trials>().is_err());
    }

    #[test]
    fn small_hunt_is_clean_and_stable() {
        let a = hunt(6, Trials::Count(200), 3, Model::Gnp(0.6)).unwrap();
        assert!(a.passed(), "{:?}", a.failures);
        let b = hunt(6, Trials::Count(200), 3, Model::Gnp(0.6)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sparse_model_refuses_large_n() {
        assert!(matches!(hunt(30, Trials::Count(1), 1, Model::Gnp(0.5)), Err(HuntError::OutOfReach { .. })));
    }
}
