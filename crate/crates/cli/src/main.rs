//! `routgraph` command line: generate random r-out digraphs, analyse them and
//! run seeded sweeps.
//!
//! Exit codes: 0 on success, 1 on a configuration or input error, 2 on an
//! I/O error. Diagnostics go to stderr; data goes to stdout or `--out`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use routgraph::branching::{constants_csv, gw_tail_curve, gw_tail_exact_curve, tail_csv, TailRow};
use routgraph::dfa::{random_dfa, run_word, Dfa};
use routgraph::flags::{find_flags, flags_csv};
use routgraph::harness::summary::summary_csv;
use routgraph::harness::{emit, estimate_constants, flag_params, measure_graph, render, run_sweep, Format, Measurement, SweepConfig, TrialRecord};
use routgraph::{scc_decompose, solve_constants, Digraph, Error, Execution, Result, Seed};

#[derive(Parser)]
#[command(name = "routgraph", version, about = "Random r-out digraphs: structure, diameters, stationary laws and sweeps")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Shared options. Each one overrides the matching key of `--config`.
#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Graph sizes, comma-separated; `2^16` is accepted.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Out-degrees, comma-separated.
    #[arg(long, global = true)]
    r: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flag parameter epsilon.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Power-iteration tolerance on the l1 residual.
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    max_iter: Option<String>,
    /// Condition on simple digraphs (no loops or parallel edges).
    #[arg(long, global = true)]
    simple: bool,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Extra `key=value` config overrides, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate one graph from the seed as given; `--format csv` writes the edge-list text form.
    Gen,
    /// Largest strongly connected component, attractivity and period.
    Scc(Analyse),
    /// Diameter of the graph and of its largest component.
    Diam(Analyse),
    /// Stationary extremes of the walk on the largest component.
    Stat(Analyse),
    /// List epsilon-flags.
    Flags {
        #[command(flatten)]
        input: Analyse,
        /// Use the `ln^2 n` / `ln^3 n` thresholds.
        #[arg(long)]
        desk: bool,
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long)]
        size_cap: Option<u64>,
    },
    /// Galton-Watson Poisson(r) tail estimates `P(0 < Z_k < omega)`, or the constants table.
    Gw {
        /// Largest generation.
        #[arg(long, default_value_t = 14)]
        k: u32,
        #[arg(long, default_value_t = 4)]
        omega: u64,
        /// Use the exact recursion instead of sampling.
        #[arg(long)]
        exact: bool,
        /// Print `r,lambda,eta` for each `--r` instead.
        #[arg(long)]
        constants: bool,
    },
    /// Generate a random DFA, or run the word on stdin through `--dfa FILE`.
    Dfa {
        #[arg(long)]
        dfa: Option<PathBuf>,
    },
    /// Seeded trials over every (n, r) cell.
    Sweep {
        /// Measurements, comma-separated: scc, diam, stationary, flags, gw.
        #[arg(long)]
        measure: Option<String>,
        /// Record per-stage wall-clock times.
        #[arg(long)]
        timings: bool,
        /// Also write the per-r constant summary to this CSV file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Analyse {
    /// Analyse this graph (edge-list text or JSON) instead of generating trials.
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_data(out: Option<&Path>, data: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, data).map_err(|source| Error::Io { path: path.to_path_buf(), source }),
        None => io::stdout()
            .write_all(data.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}

fn read_graph(path: &Path) -> Result<Digraph> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        Digraph::from_json(&text)
    } else {
        Digraph::from_text(&text)
    }
}

fn config(common: &Common) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &common.config {
        cfg.merge_text(&read_file(path)?)?;
    }
    let pairs = [
        ("n", &common.n),
        ("r", &common.r),
        ("seed", &common.seed),
        ("trials", &common.trials),
        ("format", &common.format),
        ("eps", &common.eps),
        ("tol", &common.tol),
        ("max_iter", &common.max_iter),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if common.simple {
        cfg.simple = true;
    }
    if common.sequential {
        cfg.parallel = false;
    }
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set: expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn first(values: &[u32], key: &str) -> Result<u32> {
    values.first().copied().ok_or_else(|| Error::Config(format!("{key}: a value is required")))
}

fn exec(cfg: &SweepConfig) -> Execution {
    if cfg.parallel {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

fn emit_records(cfg: &SweepConfig, records: &[TrialRecord]) -> Result<()> {
    match &cfg.out {
        Some(path) => emit(records, cfg.format, path),
        None => write_data(None, &render(records, cfg.format)),
    }
}

/// One measurement, either on `--graph` or over the configured trials.
fn analyse(mut cfg: SweepConfig, input: &Analyse, m: Measurement) -> Result<()> {
    cfg.measurements = vec![m];
    match &input.graph {
        Some(path) => {
            let g = read_graph(path)?;
            let mut rec = TrialRecord { n: g.n(), r: g.r(), ..TrialRecord::default() };
            measure_graph(&cfg, &g, &mut rec, exec(&cfg));
            emit_records(&cfg, &[rec])
        }
        None => emit_records(&cfg, &run_sweep(&cfg)?),
    }
}

fn flags(mut cfg: SweepConfig, input: &Analyse, desk: bool, threshold: Option<u64>, size_cap: Option<u64>) -> Result<()> {
    if desk {
        cfg.set("flag_scale", "desk")?;
    }
    cfg.flag_threshold = threshold.or(cfg.flag_threshold);
    cfg.flag_size_cap = size_cap.or(cfg.flag_size_cap);
    let mut instances: Vec<(Digraph, u64)> = Vec::new();
    match &input.graph {
        Some(path) => instances.push((read_graph(path)?, 0)),
        None => {
            cfg.validate()?;
            for &n in &cfg.n {
                for &r in &cfg.r {
                    for t in 0..cfg.trials {
                        let seed = Seed::for_trial(Seed(cfg.seed), n, r, t);
                        let g = if cfg.simple { Digraph::generate_simple(n, r, seed)? } else { Digraph::generate(n, r, seed)? };
                        instances.push((g, seed.0));
                    }
                }
            }
        }
    }
    let mut csv = String::new();
    let mut rows = Vec::new();
    for (g, seed) in &instances {
        let p = flag_params(&cfg, g.n(), g.r())?;
        let dec = scc_decompose(g);
        let found = find_flags(g, &p, Some(&dec), exec(&cfg));
        eprintln!(
            "n={} r={} seed={seed}: {} flags (k*={}, threshold={}, size cap={})",
            g.n(),
            g.r(),
            found.len(),
            p.k_star,
            p.threshold,
            p.size_cap
        );
        let block = flags_csv(g.n(), g.r(), *seed, &found);
        let body = if csv.is_empty() { &block[..] } else { block.split_once('\n').map_or("", |(_, rest)| rest) };
        csv.push_str(body);
        rows.extend(found.iter().map(|f| {
            json!({
                "n": g.n(), "r": g.r(), "seed": seed, "vertex": f.vertex + 1, "k1": f.k1,
                "maze_size": f.maze_size, "entrance": f.entrance, "in_d0": f.in_d0,
            })
        }));
    }
    let data = match cfg.format {
        Format::Csv => csv,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows).expect("json values serialize")),
    };
    write_data(cfg.out.as_deref(), &data)
}

fn gw(cfg: SweepConfig, k: u32, omega: u64, exact: bool, constants: bool) -> Result<()> {
    if cfg.r.is_empty() || cfg.r.contains(&0) {
        return Err(Error::Config("r: values must be positive".into()));
    }
    let data = if constants {
        let table = cfg.r.iter().map(|&r| solve_constants(r)).collect::<Result<Vec<_>>>()?;
        match cfg.format {
            Format::Csv => constants_csv(&table),
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&table).expect("constants serialize")),
        }
    } else {
        let mut rows = Vec::new();
        for &r in &cfg.r {
            if exact {
                let curve = gw_tail_exact_curve(r, k, omega);
                rows.extend(curve.iter().enumerate().map(|(i, &p)| TailRow {
                    r,
                    k: i as u32,
                    omega,
                    trials: 0,
                    estimate: p,
                    stderr: 0.0,
                }));
            } else {
                let seed = Seed(cfg.seed).substream(u64::from(r));
                let curve = gw_tail_curve(r, k, omega, cfg.trials, seed, exec(&cfg));
                rows.extend(curve.iter().enumerate().map(|(i, e)| TailRow {
                    r,
                    k: i as u32,
                    omega,
                    trials: cfg.trials,
                    estimate: e.mean,
                    stderr: e.stderr,
                }));
            }
        }
        match cfg.format {
            Format::Csv => tail_csv(&rows),
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows).expect("rows serialize")),
        }
    };
    write_data(cfg.out.as_deref(), &data)
}

fn dfa(cfg: SweepConfig, path: Option<&Path>) -> Result<()> {
    let data = match path {
        Some(path) => {
            let d = Dfa::from_text(&read_file(path)?)?;
            let mut input = String::new();
            io::stdin()
                .read_to_string(&mut input)
                .map_err(|source| Error::Io { path: "<stdin>".into(), source })?;
            let word = input
                .split_whitespace()
                .map(|t| match t.parse::<u32>() {
                    Ok(a) if a >= 1 => Ok(a - 1),
                    _ => Err(Error::Config(format!("word: bad symbol `{t}`; symbols are 1..={}", d.graph.r()))),
                })
                .collect::<Result<Vec<_>>>()?;
            let (state, accept) = run_word(&d, &word)?;
            match cfg.format {
                Format::Csv => format!("state,accept\n{},{accept}\n", state + 1),
                Format::Json => format!("{}\n", json!({ "state": state + 1, "accept": accept })),
            }
        }
        None => {
            let d = random_dfa(first(&cfg.n, "n")?, first(&cfg.r, "r")?, Seed(cfg.seed))?;
            match cfg.format {
                Format::Csv => d.to_text(),
                Format::Json => {
                    let heads: Vec<u32> = d.graph.heads().iter().map(|h| h + 1).collect();
                    let v = json!({
                        "n": d.graph.n(), "r": d.graph.r(), "start": d.start + 1,
                        "heads": heads, "accepting": d.accepting,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
                }
            }
        }
    };
    write_data(cfg.out.as_deref(), &data)
}

fn sweep(mut cfg: SweepConfig, measure: Option<&str>, timings: bool, summary: Option<&Path>) -> Result<()> {
    if let Some(m) = measure {
        cfg.set("measurements", m)?;
    }
    cfg.timings |= timings;
    let records = run_sweep(&cfg)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} trials recorded an error", records.len());
    }
    emit_records(&cfg, &records)?;
    if let Some(path) = summary {
        let table = estimate_constants(&records)?;
        write_data(Some(path), &summary_csv(&table))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli.common)?;
    match &cli.cmd {
        Cmd::Gen => {
            let (n, r) = (first(&cfg.n, "n")?, first(&cfg.r, "r")?);
            let g = if cfg.simple {
                Digraph::generate_simple(n, r, Seed(cfg.seed))?
            } else {
                Digraph::generate(n, r, Seed(cfg.seed))?
            };
            let data = match cfg.format {
                Format::Csv => g.to_text(),
                Format::Json => format!("{}\n", g.to_json()),
            };
            write_data(cfg.out.as_deref(), &data)
        }
        Cmd::Scc(input) => analyse(cfg, input, Measurement::Scc),
        Cmd::Diam(input) => analyse(cfg, input, Measurement::Diam),
        Cmd::Stat(input) => analyse(cfg, input, Measurement::Stationary),
        Cmd::Flags { input, desk, threshold, size_cap } => flags(cfg, input, *desk, *threshold, *size_cap),
        Cmd::Gw { k, omega, exact, constants } => gw(cfg, *k, *omega, *exact, *constants),
        Cmd::Dfa { dfa: path } => dfa(cfg, path.as_deref()),
        Cmd::Sweep { measure, timings, summary } => sweep(cfg, measure.as_deref(), *timings, summary.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("routgraph: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
