//! Command-line interface: simulate trajectories, enumerate exact
//! transition laws, tabulate correlation kernels, evaluate multipoint
//! Fredholm determinants, run the verification suite, and apply the
//! tableau bijection to a bit matrix. All commands emit canonical JSON
//! (deterministic bytes for a fixed config and seed) and optional CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};

use dtasep::dpp::{tabulate_kernel, KernelRoute};
use dtasep::drsk::{drsk_forward, drsk_inverse, BitMatrix};
use dtasep::dynamics::{enumerate_transition, simulate, ParticleConfig, Rates};
use dtasep::error::Error;
use dtasep::harness::config::{scalar_to_json, Backend, ExperimentConfig, Rational64};
use dtasep::harness::report::RunReport;
use dtasep::harness::verify::{run_suite, Level};
use dtasep::scalar::Scalar;

#[derive(Parser)]
#[command(name = "dtasep", version, about = "Discrete-time TASEP with inhomogeneous rates: simulation, exact oracles, determinantal kernels and Fredholm determinants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Biorthogonal,
    Hitting,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of particles.
    #[arg(long, visible_alias = "N")]
    n: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    t: Option<usize>,
    /// Initial positions, strictly decreasing (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<i64>>,
    /// Time parameters p_1..p_t as rationals like 1/4 (comma separated).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<String>>,
    /// Particle parameters q_1..q_N (comma separated).
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<String>>,
    /// Multipoint query as k:s pairs, e.g. 1:3,2:0.
    #[arg(long, allow_hyphen_values = true)]
    query: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Override the initial Fredholm window lower edge.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<i64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV table here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo trajectories; reports empirical endpoint frequencies.
    Simulate(CommonOpts),
    /// Exhaustive exact transition law at time t.
    Enumerate(CommonOpts),
    /// Tabulate the correlation kernel over a window.
    Kernel {
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, value_enum, default_value = "biorthogonal")]
        route: RouteArg,
    },
    /// Multipoint probability as a Fredholm determinant.
    Fredholm {
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, value_enum, default_value = "both")]
        route: RouteArg,
    },
    /// Run the identity verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, default_value = "7")]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the check table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Apply the dual-column tableau bijection to a {0,1} matrix.
    Drsk {
        /// Rows as comma-separated bits, rows separated by ';',
        /// e.g. "1,0,1,1;0,1,1,0;1,1,0,1".
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            let obj = json!({ "error": { "kind": error_kind(&err), "message": err.to_string() } });
            eprintln!("{}", serde_json::to_string_pretty(&obj).unwrap());
            ExitCode::from(2)
        }
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::BadConfig(_) => "bad_config",
        Error::RegimeViolation(_) => "regime_violation",
        Error::BudgetExceeded(_) => "budget_exceeded",
        Error::NoStabilization(_) => "no_stabilization",
        Error::RepeatedPole(_) => "repeated_pole",
        _ => "invalid_input",
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("TASEP_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Simulate(opts) => {
            let cfg = build_config(&opts)?;
            dispatch_simulate(&cfg, &opts)
        }
        Command::Enumerate(opts) => {
            let cfg = build_config(&opts)?;
            match cfg.backend {
                Backend::Rational => enumerate_cmd::<BigRational>(&cfg, &opts),
                Backend::Float => enumerate_cmd::<f64>(&cfg, &opts),
            }
        }
        Command::Kernel { opts, route } => {
            let cfg = build_config(&opts)?;
            match cfg.backend {
                Backend::Rational => kernel_cmd::<BigRational>(&cfg, &opts, route),
                Backend::Float => kernel_cmd::<f64>(&cfg, &opts, route),
            }
        }
        Command::Fredholm { opts, route } => {
            let cfg = build_config(&opts)?;
            match cfg.backend {
                Backend::Rational => fredholm_cmd::<BigRational>(&cfg, &opts, route),
                Backend::Float => fredholm_cmd::<f64>(&cfg, &opts, route),
            }
        }
        Command::Verify {
            level,
            seed,
            out,
            csv,
            timings,
        } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let start = Instant::now();
            let checks = run_suite(level, seed);
            let mut report = RunReport::new("verify", "mixed", seed);
            report.extend(checks);
            let mut value = serde_json::to_value(&report).expect("report serializes");
            if timings {
                value["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
            }
            if let Some(path) = &csv {
                let rows: Vec<String> = report
                    .checks
                    .iter()
                    .map(|c| {
                        format!(
                            "\"{}\",{},{:.3e},{:.1e}",
                            c.name, c.pass, c.abs_diff, c.tolerance
                        )
                    })
                    .collect();
                write_csv(path, "name,pass,abs_diff,tolerance", &rows)?;
            }
            emit(&value, out.as_deref())?;
            Ok(report.pass)
        }
        Command::Drsk { matrix, out } => drsk_cmd(&matrix, out.as_deref()),
    }
}

fn build_config(opts: &CommonOpts) -> Result<ExperimentConfig, Error> {
    let mut cfg: ExperimentConfig = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::BadConfig(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::BadConfig(format!("cannot parse {}: {e}", path.display())))?
        }
        None => ExperimentConfig {
            n: 0,
            t: 0,
            y: vec![],
            p: vec![],
            q: vec![],
            query: vec![],
            seed: 0,
            backend: Backend::default(),
            replicas: 10_000,
            window: None,
        },
    };
    if let Some(n) = opts.n {
        cfg.n = n;
    }
    if let Some(t) = opts.t {
        cfg.t = t;
    }
    if let Some(y) = &opts.y {
        cfg.y = y.clone();
    }
    if let Some(p) = &opts.p {
        cfg.p = p
            .iter()
            .map(|s| s.parse::<Rational64>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(q) = &opts.q {
        cfg.q = q
            .iter()
            .map(|s| s.parse::<Rational64>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(query) = &opts.query {
        cfg.query = parse_query(query)?;
    }
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(backend) = opts.backend {
        cfg.backend = backend;
    }
    if let Some(replicas) = opts.replicas {
        cfg.replicas = replicas;
    }
    if let Some(window) = opts.window {
        cfg.window = Some(window);
    }
    if cfg.n == 0 && !cfg.y.is_empty() {
        cfg.n = cfg.y.len();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Regime predicates evaluated up front and echoed in every report.
fn regimes_json<S: Scalar>(rates: &Rates<S>) -> Value {
    let verdict = |r: Result<(), Error>| match r {
        Ok(()) => json!(true),
        Err(e) => json!({ "holds": false, "reason": e.to_string() }),
    };
    json!({
        "theorem": verdict(rates.check_theorem_regime()),
        "kernel": verdict(rates.check_kernel_regime()),
        "ordered_q": verdict(rates.check_ordered_q()),
        "distinct_q": verdict(rates.check_distinct_q()),
    })
}

fn parse_query(text: &str) -> Result<Vec<(usize, i64)>, Error> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, s) = pair
                .split_once(':')
                .ok_or_else(|| Error::BadConfig(format!("query term '{pair}' is not k:s")))?;
            let k = k
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::BadConfig(format!("bad particle index: {e}")))?;
            let s = s
                .trim()
                .parse::<i64>()
                .map_err(|e| Error::BadConfig(format!("bad level: {e}")))?;
            Ok((k, s))
        })
        .collect()
}

fn emit(value: &Value, out: Option<&std::path::Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Error::BadConfig(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_csv(path: &std::path::Path, header: &str, rows: &[String]) -> Result<(), Error> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text)
        .map_err(|e| Error::BadConfig(format!("cannot write {}: {e}", path.display())))
}

fn dispatch_simulate(cfg: &ExperimentConfig, opts: &CommonOpts) -> Result<bool, Error> {
    // Sampling happens in f64 regardless of backend.
    let rates: Rates<f64> = cfg.rates()?;
    let y0 = cfg.initial()?;
    let start = Instant::now();
    use rayon::prelude::*;
    let endpoints: Vec<ParticleConfig> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            simulate(&y0, &rates, cfg.t, cfg.seed, r)
                .pop()
                .expect("trajectory nonempty")
        })
        .collect();
    let mut counts: BTreeMap<ParticleConfig, u64> = BTreeMap::new();
    for e in &endpoints {
        *counts.entry(e.clone()).or_insert(0) += 1;
    }
    let law: Vec<Value> = counts
        .iter()
        .map(|(cfg_pt, count)| {
            json!({
                "positions": cfg_pt.positions(),
                "count": count,
                "freq": *count as f64 / cfg.replicas as f64,
            })
        })
        .collect();
    let query_freqs: Vec<Value> = cfg
        .query
        .iter()
        .map(|&(k, s)| {
            let hits = endpoints
                .iter()
                .filter(|e| e.pos(k) >= s)
                .count();
            json!({ "k": k, "s": s, "freq": hits as f64 / cfg.replicas as f64 })
        })
        .collect();
    let mut value = json!({
        "schema": 1,
        "command": "simulate",
        "config": cfg,
        "regimes": regimes_json(&rates),
        "law": law,
        "query_marginals": query_freqs,
    });
    if opts.timings {
        value["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    if let Some(csv) = &opts.csv {
        let rows: Vec<String> = counts
            .iter()
            .map(|(cfg_pt, count)| {
                let pos: Vec<String> = cfg_pt.positions().iter().map(i64::to_string).collect();
                format!("\"{}\",{}", pos.join(" "), count)
            })
            .collect();
        write_csv(csv, "positions,count", &rows)?;
    }
    emit(&value, opts.out.as_deref())?;
    Ok(true)
}

fn enumerate_cmd<S: Scalar>(cfg: &ExperimentConfig, opts: &CommonOpts) -> Result<bool, Error> {
    let rates: Rates<S> = cfg.rates()?;
    let y0 = cfg.initial()?;
    let law = enumerate_transition(&y0, &rates, cfg.t)?;
    let rows: Vec<Value> = law
        .iter()
        .map(|(pt, prob)| json!({ "positions": pt.positions(), "prob": scalar_to_json(prob) }))
        .collect();
    let query_probs: Vec<Value> = if cfg.query.is_empty() {
        vec![]
    } else {
        let total = law
            .iter()
            .filter(|(pt, _)| cfg.query.iter().all(|&(k, s)| pt.pos(k) >= s))
            .fold(S::zero(), |acc, (_, w)| acc + w.clone());
        vec![json!({ "query": cfg.query, "prob": scalar_to_json(&total) })]
    };
    let value = json!({
        "schema": 1,
        "command": "enumerate",
        "config": cfg,
        "regimes": regimes_json(&rates),
        "law": rows,
        "query_probability": query_probs,
    });
    if let Some(csv) = &opts.csv {
        let rows: Vec<String> = law
            .iter()
            .map(|(pt, prob)| {
                let pos: Vec<String> = pt.positions().iter().map(i64::to_string).collect();
                format!("\"{}\",{}", pos.join(" "), prob)
            })
            .collect();
        write_csv(csv, "positions,prob", &rows)?;
    }
    emit(&value, opts.out.as_deref())?;
    Ok(true)
}

fn kernel_cmd<S: Scalar>(
    cfg: &ExperimentConfig,
    opts: &CommonOpts,
    route: RouteArg,
) -> Result<bool, Error> {
    let rates: Rates<S> = cfg.rates()?;
    let y = cfg.initial()?;
    rates.check_kernel_regime()?;
    let n = cfg.n;
    let lo = cfg
        .window
        .unwrap_or_else(|| y.pos(n) - n as i64 - cfg.t as i64 - 2);
    let hi = y.pos(1) + cfg.t as i64 + 2;
    let levels: Vec<usize> = if cfg.query.is_empty() {
        (1..=n).collect()
    } else {
        cfg.query.iter().map(|&(k, _)| k).collect()
    };
    let mut tables = Vec::new();
    let mut routes = Vec::new();
    match route {
        RouteArg::Biorthogonal => routes.push(KernelRoute::Biorthogonal),
        RouteArg::Hitting => routes.push(KernelRoute::Hitting),
        RouteArg::Both => {
            routes.push(KernelRoute::Biorthogonal);
            routes.push(KernelRoute::Hitting);
        }
    }
    let mut csv_rows: Vec<String> = Vec::new();
    for r in &routes {
        let table = tabulate_kernel(&y, &rates, cfg.t, *r, &levels, lo, hi)?;
        let index = table.index();
        let mut rows = Vec::new();
        for (a, &(m, x)) in index.iter().enumerate() {
            for (b, &(nn, xp)) in index.iter().enumerate() {
                let v = &table.entries[a][b];
                if !v.is_zero() {
                    rows.push(json!({
                        "m": m, "x": x, "n": nn, "xp": xp,
                        "value": scalar_to_json(v),
                    }));
                    csv_rows.push(format!("{r:?},{m},{x},{nn},{xp},{v}"));
                }
            }
        }
        tables.push(json!({ "route": format!("{r:?}"), "entries": rows }));
    }
    let value = json!({
        "schema": 1,
        "command": "kernel",
        "config": cfg,
        "regimes": regimes_json(&rates),
        "window": { "lo": lo, "hi": hi },
        "levels": levels,
        "tables": tables,
    });
    if let Some(csv) = &opts.csv {
        write_csv(csv, "route,m,x,n,xp,value", &csv_rows)?;
    }
    emit(&value, opts.out.as_deref())?;
    Ok(true)
}

fn fredholm_cmd<S: Scalar>(
    cfg: &ExperimentConfig,
    opts: &CommonOpts,
    route: RouteArg,
) -> Result<bool, Error> {
    if cfg.query.is_empty() {
        return Err(Error::BadConfig("fredholm needs a --query".into()));
    }
    let rates: Rates<S> = cfg.rates()?;
    let y = cfg.initial()?;
    let routes: Vec<KernelRoute> = match route {
        RouteArg::Biorthogonal => vec![KernelRoute::Biorthogonal],
        RouteArg::Hitting => vec![KernelRoute::Hitting],
        RouteArg::Both => vec![KernelRoute::Biorthogonal, KernelRoute::Hitting],
    };
    let start = Instant::now();
    let mut results = Vec::new();
    let mut values: Vec<S> = Vec::new();
    for r in &routes {
        let res = dtasep::dpp::multipoint_prob_kernel_windowed(
            &y,
            &rates,
            cfg.t,
            &cfg.query,
            *r,
            cfg.window,
        )?;
        results.push(json!({
            "route": format!("{r:?}"),
            "probability": scalar_to_json(&res.value),
            "window_lo": res.window_lo,
            "stabilized": res.stabilized,
            "last_change": res.last_change,
        }));
        values.push(res.value);
    }
    // Cross-checks: route agreement, and the exhaustive oracle when the
    // enumeration budget allows it.
    let mut checks = Vec::new();
    let mut pass = true;
    if values.len() == 2 {
        let diff = (values[0].clone() - values[1].clone()).abs_f64();
        let ok = if S::EXACT {
            values[0] == values[1]
        } else {
            diff < 1e-10
        };
        pass &= ok;
        checks.push(json!({ "name": "routes agree", "abs_diff": diff, "pass": ok }));
    }
    if cfg.t * cfg.n <= dtasep::dynamics::ENUMERATION_BUDGET {
        let oracle = dtasep::dynamics::multipoint_prob_oracle(&y, &rates, cfg.t, &cfg.query)?;
        for (i, v) in values.iter().enumerate() {
            let diff = (v.clone() - oracle.clone()).abs_f64();
            let ok = if S::EXACT { *v == oracle } else { diff < 1e-10 };
            pass &= ok;
            checks.push(json!({
                "name": format!("{:?} route matches exhaustive oracle", routes[i]),
                "abs_diff": diff,
                "pass": ok,
            }));
        }
    }
    let mut value = json!({
        "schema": 1,
        "command": "fredholm",
        "config": cfg,
        "regimes": regimes_json(&rates),
        "results": results,
        "checks": checks,
        "pass": pass,
    });
    if opts.timings {
        value["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    if let Some(csv) = &opts.csv {
        let rows: Vec<String> = routes
            .iter()
            .zip(values.iter())
            .map(|(r, v)| format!("{r:?},{v}"))
            .collect();
        write_csv(csv, "route,probability", &rows)?;
    }
    emit(&value, opts.out.as_deref())?;
    Ok(pass)
}

fn drsk_cmd(matrix: &str, out: Option<&std::path::Path>) -> Result<bool, Error> {
    let rows: Vec<Vec<u8>> = matrix
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|bit| {
                    bit.trim()
                        .parse::<u8>()
                        .map_err(|e| Error::BadConfig(format!("bad bit: {e}")))
                })
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let w = BitMatrix::from_rows(&rows)?;
    let (p, q) = drsk_forward(&w);
    let recovered = drsk_inverse(&p, &q, w.rows(), w.cols())?;
    let round_trip = recovered == w;
    let value = json!({
        "schema": 1,
        "command": "drsk",
        "matrix": rows,
        "p": p.rows(),
        "q": q.rows(),
        "shape": p.shape().parts(),
        "round_trip": round_trip,
    });
    emit(&value, out)?;
    Ok(round_trip)
}
