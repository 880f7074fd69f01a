use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hamq_cli::hunt::{hunt, Model, Trials};
use hamq_cli::suites::{parse_list, run_suite, Mode, SuiteParams};
use hamq_cli::{init_threads, SuiteReport};
use hamq_core::certifier::{certify, explain, CertifyConfig};
use hamq_core::families::{build, enumerate_class, ClassId, EnumMode, FamilyKind, DEFAULT_ENUM_BUDGET};
use hamq_core::io::{emit_graph6, parse_any};
use hamq_core::spectral::{default_max_iter, eigen_residual, perron_pair, upper_bound_edge_count, SpectralError};
use hamq_core::Graph;

const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "hamq", version, about = "Hamilton-connectivity certificates from degree, edge-count and signless Laplacian conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signless Laplacian spectral radius with a certified enclosure.
    Spectrum {
        /// graph6 or edge-list file, `-` for stdin
        input: String,
        #[arg(long, default_value_t = hamq_core::spectral::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the certification pipeline on one graph.
    Certify {
        input: String,
        #[arg(long)]
        oracle_gate: Option<usize>,
        #[arg(long)]
        dense_gate: Option<usize>,
        /// node budget per Hamilton path search
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Emit a family host or the members of one of its classes as graph6.
    Family {
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        class: Option<ClassId>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
        budget: u64,
        /// write graph6 lines here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON-lines file with X/Y/Z and deleted edges per member
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        /// list such as `2..12` or `2,3`
        #[arg(long, value_parser = parse_list_arg)]
        k: Option<ListArg>,
        #[arg(long, value_parser = parse_list_arg)]
        n: Option<ListArg>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search for certifier/oracle disagreements.
    Hunt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: Trials,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        model: Model,
    },
}

#[derive(Clone, Debug)]
struct ListArg(Vec<usize>);

fn parse_list_arg(s: &str) -> Result<ListArg, String> {
    parse_list(s).map(ListArg)
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    S,
    T,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
    Orbit,
}

/// Errors in the user's input; everything else is an internal failure.
#[derive(Debug)]
struct InputError(anyhow::Error);

fn input_err(e: impl Into<anyhow::Error>) -> InputError {
    InputError(e.into())
}

fn read_graph(input: &str) -> Result<Graph, InputError> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input_err)?;
        s
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}")).map_err(input_err)?
    };
    parse_any(&text).with_context(|| format!("parsing {input}")).map_err(input_err)
}

#[derive(Serialize)]
struct SpectrumReport {
    n: usize,
    m: usize,
    q_hat: f64,
    lo: String,
    hi: String,
    lo_f64: f64,
    hi_f64: f64,
    residual: f64,
    iterations: usize,
    edge_count_bound: String,
}

fn cmd_spectrum(input: &str, tol: f64, json: bool) -> Result<u8, InputError> {
    let g = read_graph(input)?;
    let est = match perron_pair(&g, tol, default_max_iter(g.n())) {
        Ok(e) => e,
        Err(SpectralError::NoConvergence { best, .. }) => {
            eprintln!("warning: no convergence at tol {tol:e}; reporting the best iterate");
            *best
        }
        Err(e) => return Err(input_err(e)),
    };
    let exact = est.exact_enclosure(&g).map_err(input_err)?;
    let bound = upper_bound_edge_count(&g).map_err(input_err)?;
    let residual = eigen_residual(&g, est.q_hat, &est.f).map_err(input_err)?;
    let r = SpectrumReport {
        n: g.n(),
        m: g.m(),
        q_hat: est.q_hat,
        lo_f64: exact.lo.to_f64(),
        hi_f64: exact.hi.to_f64(),
        lo: exact.lo.to_string(),
        hi: exact.hi.to_string(),
        residual,
        iterations: est.iterations,
        edge_count_bound: bound.to_string(),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
    } else {
        println!("n = {}, m = {}", r.n, r.m);
        println!("q_hat = {:.12}", r.q_hat);
        println!("certified interval = [{:.12}, {:.12}]", r.lo_f64, r.hi_f64);
        println!("residual = {:e}", r.residual);
        println!("edge-count bound 2m/(n-1) + n - 2 = {} ({:.12})", r.edge_count_bound, bound.to_f64());
    }
    Ok(0)
}

fn cmd_certify(input: &str, oracle_gate: Option<usize>, dense_gate: Option<usize>, budget: Option<u64>, json: bool) -> Result<u8, InputError> {
    let g = read_graph(input)?;
    let mut cfg = CertifyConfig::default();
    if let Some(v) = oracle_gate {
        cfg.oracle_gate = v;
    }
    if let Some(v) = dense_gate {
        cfg.dense_gate = v;
    }
    if let Some(v) = budget {
        cfg.oracle_budget = v;
    }
    let cert = certify(&g, &cfg);
    if json {
        println!("{}", serde_json::to_string_pretty(&cert).expect("serializable"));
    } else {
        print!("{}", explain(&cert));
    }
    Ok(cert.exit_code() as u8)
}

#[allow(clippy::too_many_arguments)]
fn cmd_family(
    kind: KindArg,
    n: usize,
    k: usize,
    class: Option<ClassId>,
    mode: ModeArg,
    seed: u64,
    count: usize,
    budget: u64,
    out: Option<PathBuf>,
    sidecar: Option<PathBuf>,
) -> Result<u8, InputError> {
    let kind = match kind {
        KindArg::S => FamilyKind::S,
        KindArg::T => FamilyKind::T,
    };
    let mut sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display())).map_err(input_err)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut side: Option<Box<dyn Write>> = match &sidecar {
        Some(p) => Some(Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display())).map_err(input_err)?,
        ))),
        None => None,
    };
    let mut emit = |h: &hamq_core::families::FamilyHandle| -> io::Result<()> {
        writeln!(sink, "{}", emit_graph6(&h.graph))?;
        if let Some(s) = side.as_mut() {
            writeln!(s, "{}", serde_json::to_string(&h.sidecar()).expect("serializable"))?;
        }
        Ok(())
    };
    match class {
        None => emit(&build(kind, n, k).map_err(input_err)?).map_err(input_err)?,
        Some(c) => {
            if c.kind() != kind {
                return Err(input_err(anyhow!("class {c} does not belong to family {kind:?}")));
            }
            let mode = match mode {
                ModeArg::Exhaustive => EnumMode::Exhaustive,
                ModeArg::Sample => EnumMode::Sample { seed, count },
                ModeArg::Orbit => EnumMode::OrbitWindow,
            };
            for h in enumerate_class(c, n, k, mode, budget).map_err(input_err)? {
                emit(&h).map_err(input_err)?;
            }
        }
    }
    Ok(0)
}

fn print_report(report: &SuiteReport, started: Instant) -> u8 {
    println!("{}", serde_json::to_string_pretty(report).expect("serializable"));
    eprintln!(
        "{}: {} cases, {} failures, {:.2}s",
        report.suite,
        report.cases,
        report.failures.len(),
        started.elapsed().as_secs_f64()
    );
    if report.passed() {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<u8, InputError> {
    match cli.command {
        Command::Spectrum { input, tol, json } => cmd_spectrum(&input, tol, json),
        Command::Certify { input, oracle_gate, dense_gate, budget, json } => cmd_certify(&input, oracle_gate, dense_gate, budget, json),
        Command::Family { kind, n, k, class, mode, seed, count, budget, out, sidecar } => {
            cmd_family(kind, n, k, class, mode, seed, count, budget, out, sidecar)
        }
        Command::Verify { suite, k, n, mode, count, seed } => {
            let started = Instant::now();
            let params = SuiteParams { k: k.map(|l| l.0), n: n.map(|l| l.0), mode, count, seed };
            let report = run_suite(&suite, &params).map_err(input_err)?;
            Ok(print_report(&report, started))
        }
        Command::Hunt { n, trials, seed, model } => {
            let started = Instant::now();
            let report = hunt(n, trials, seed, model).map_err(input_err)?;
            Ok(print_report(&report, started))
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
