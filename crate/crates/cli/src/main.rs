//! `thetacut` command-line driver.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 solver failure, 3 size
//! guard violated.

mod args;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Parser;
use serde::Serialize;
use thetacut::cutloop::REPORT_SCHEMA_VERSION;
use thetacut::reference::{self, ReferenceRecord, Source};
use thetacut::report::{self, Comparison, Format};
use thetacut::{
    compute_bounds, exact_alpha, exact_alpha_with_limit, exact_chi, read_dimacs, solve,
    write_dimacs, BoundReport, CandidateConfig, ExactError, GenSpec, Graph, LoopConfig, LoopError,
    Problem, SdpModel, SolverConfig,
};

use args::{
    BoundArgs, Cli, Command, ExactArgs, FamilyArg, GlobalArgs, GraphArgs, ProblemArgs, ReportArgs,
    ReproduceArgs,
};

/// A failed command with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        Failure::guard(e.to_string())
    }
}

impl From<LoopError> for Failure {
    fn from(e: LoopError) -> Self {
        match e {
            LoopError::Config(_) => Failure::input(e.to_string()),
            LoopError::Solver { .. } | LoopError::Model(_) => Failure::solver(e.to_string()),
        }
    }
}

impl From<report::ReportError> for Failure {
    fn from(e: report::ReportError) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let g = &cli.global;
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, g),
        Command::Exact(a) => cmd_exact(a, g),
        Command::Theta(a) => cmd_theta(a, g),
        Command::Bound(a) => cmd_bound(a, g),
        Command::Reproduce(a) => cmd_reproduce(a, g),
        Command::Report(a) => cmd_report(a, g),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(e.to_string())),
    }
}

fn require<T>(value: Option<T>, flag: &str, family: FamilyArg) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::input(format!("--family {family:?} needs --{flag}")))
}

fn gen_spec(a: &GraphArgs, seed: u64) -> Result<Option<GenSpec>, Failure> {
    let Some(family) = a.family else {
        return Ok(None);
    };
    let spec = match family {
        FamilyArg::Torus => GenSpec::Torus {
            d: require(a.d, "d", family)?,
        },
        FamilyArg::Queen => GenSpec::Queen {
            d: require(a.d, "d", family)?,
        },
        FamilyArg::Mycielski => GenSpec::Mycielski {
            levels: require(a.levels, "levels", family)?,
        },
        FamilyArg::Cycle => GenSpec::Cycle {
            length: require(a.length, "length", family)?,
        },
        FamilyArg::NearRegular => GenSpec::NearRegular {
            n: require(a.n, "n", family)?,
            r: require(a.r, "r", family)?,
            seed,
        },
        FamilyArg::ErdosRenyi => GenSpec::ErdosRenyi {
            n: require(a.n, "n", family)?,
            p: require(a.p, "p", family)?,
            seed,
        },
    };
    Ok(Some(spec))
}

fn read_graph_file(path: &Path) -> Result<Graph, Failure> {
    let file =
        fs::File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let parsed = read_dimacs(BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.graph)
}

/// Loads the graph named by `a` and a short id for reports.
fn load_graph(a: &GraphArgs, seed: u64) -> Result<(Graph, String), Failure> {
    if let Some(path) = &a.file {
        let id = path
            .file_stem()
            .map_or("graph".into(), |s| s.to_string_lossy().into_owned());
        return Ok((read_graph_file(path)?, id));
    }
    match gen_spec(a, seed)? {
        Some(spec) => {
            let g = spec.generate().map_err(|e| Failure::input(e.to_string()))?;
            Ok((g, spec.name()))
        }
        None => Err(Failure::input(
            "give a DIMACS file or --family with its parameters",
        )),
    }
}

fn solver_config(g: &GlobalArgs) -> SolverConfig {
    SolverConfig {
        feastol: g.feastol,
        gaptol: g.gaptol,
        verbosity: g.verbose.saturating_sub(1).min(2),
        ..SolverConfig::default()
    }
}

fn loop_config(g: &GlobalArgs, problem: Problem) -> LoopConfig {
    let mut cfg = LoopConfig::new(problem);
    cfg.threshold = g.threshold;
    cfg.cap_factor = g.cap_factor;
    cfg.max_iters = g.max_iters;
    cfg.seed = g.seed;
    cfg.time_limit = g.time_limit;
    cfg.families = g.families;
    cfg.purge_slack = g.purge_slack;
    cfg.solver = solver_config(g);
    cfg.candidates = CandidateConfig {
        maximal_only: g.maximal_only,
        cycle_lengths: g.cycle_lengths.clone(),
        ..CandidateConfig::default()
    };
    cfg
}

fn cmd_generate(a: &GraphArgs, g: &GlobalArgs) -> CmdResult {
    if a.file.is_some() {
        return Err(Failure::input("generate takes --family, not a file"));
    }
    let (graph, _) = load_graph(a, g.seed)?;
    emit(&write_dimacs(&graph), g.out.as_deref())
}

fn cmd_exact(a: &ExactArgs, g: &GlobalArgs) -> CmdResult {
    let (graph, id) = load_graph(&a.graph, g.seed)?;
    let (what, value) = if a.alpha {
        let limit = a.max_n.unwrap_or(thetacut::exact::ALPHA_LIMIT);
        ("alpha", exact_alpha_with_limit(&graph, limit)?)
    } else {
        ("chi", exact_chi(&graph)?)
    };
    let text = match g.format {
        Some(Format::Json) => format!("{}\n", serde_json::json!({ "graph": id, what: value })),
        Some(Format::Csv) => format!("graph,{what}\n{id},{value}\n"),
        _ => format!("{id} {what} {value}\n"),
    };
    emit(&text, g.out.as_deref())
}

#[derive(Serialize)]
struct ThetaOutput {
    graph: String,
    n: usize,
    m: usize,
    problem: Problem,
    theta: f64,
    dual: f64,
    status: String,
    iterations: usize,
    seconds: f64,
}

fn cmd_theta(a: &ProblemArgs, g: &GlobalArgs) -> CmdResult {
    let (graph, id) = load_graph(&a.graph, g.seed)?;
    let problem = Problem::from(a.problem);
    let sol = solve(&SdpModel::for_problem(&graph, problem), &solver_config(g));
    if !sol.status.is_usable() {
        return Err(Failure::solver(format!(
            "theta solve ended with {:?}",
            sol.status
        )));
    }
    let out = ThetaOutput {
        graph: id,
        n: graph.n(),
        m: graph.m(),
        problem,
        theta: sol.objective,
        dual: sol.dual_objective,
        status: format!("{:?}", sol.status),
        iterations: sol.iterations,
        seconds: sol.seconds,
    };
    let text = match g.format {
        Some(Format::Json) => serde_json::to_string_pretty(&out).expect("serializes") + "\n",
        Some(Format::Csv) => format!(
            "graph,n,m,problem,theta,status\n{},{},{},{},{:.6},{}\n",
            out.graph, out.n, out.m, out.problem, out.theta, out.status
        ),
        _ => format!(
            "{} {} theta {:.6} ({})\n",
            out.graph, out.problem, out.theta, out.status
        ),
    };
    emit(&text, g.out.as_deref())
}

fn exact_value(graph: &Graph, problem: Problem) -> Result<usize, ExactError> {
    match problem {
        Problem::Stable => exact_alpha(graph),
        Problem::Coloring => exact_chi(graph),
    }
}

fn cmd_bound(a: &BoundArgs, g: &GlobalArgs) -> CmdResult {
    let (graph, id) = load_graph(&a.inner.graph, g.seed)?;
    let problem = Problem::from(a.inner.problem);
    let exact = if a.exact {
        Some(exact_value(&graph, problem)?)
    } else {
        None
    };
    let mut r = compute_bounds(&graph, &id, &loop_config(g, problem))?;
    r.exact = exact;
    let table =
        |format| report::render_summary(&report::summary_rows(std::slice::from_ref(&r)), format);
    match (&g.out, g.format) {
        (Some(path), format) => {
            emit(&r.to_json(), Some(path))?;
            emit(&table(format.unwrap_or(Format::Md))?, None)
        }
        (None, Some(Format::Json)) => emit(&(r.to_json() + "\n"), None),
        (None, format) => emit(&table(format.unwrap_or(Format::Md))?, None),
    }
}

/// Parses `table3`, `3` or `all` into table ids.
fn table_ids(specs: &[String]) -> Result<Vec<u8>, Failure> {
    let mut ids = Vec::new();
    for s in specs {
        let s = s.trim().to_ascii_lowercase();
        if s == "all" {
            ids.extend(1..=7);
            continue;
        }
        let digits = s.strip_prefix("table").unwrap_or(&s);
        match digits.parse::<u8>() {
            Ok(t) if (1..=7).contains(&t) => ids.push(t),
            _ => {
                return Err(Failure::input(format!(
                    "unknown table '{s}' (table1..table7 or all)"
                )))
            }
        }
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn find_instance(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["", ".col", ".dimacs", ".clq", ".txt"]
        .iter()
        .map(|ext| dir.join(format!("{stem}{ext}")))
        .find(|p| p.is_file())
}

/// Graph for a reference row, or the reason it is skipped.
fn row_graph(rec: &ReferenceRecord, a: &ReproduceArgs) -> Result<Graph, String> {
    match &rec.source {
        Source::Generated(spec) | Source::Surrogate(spec) => {
            if !rec.is_desk_scale() && !a.include_large {
                return Err(format!(
                    "n = {} above desk scale (use --include-large)",
                    rec.n
                ));
            }
            spec.generate().map_err(|e| e.to_string())
        }
        Source::File(stem) => {
            let dir = a
                .instances_dir
                .as_ref()
                .ok_or("file-only instance (use --instances-dir)")?;
            let path = find_instance(dir, stem)
                .ok_or_else(|| format!("{stem} not found in {}", dir.display()))?;
            read_graph_file(&path).map_err(|f| f.message)
        }
    }
}

enum RowOutcome {
    Done(Box<Comparison>),
    Skipped(String),
}

fn run_row(rec: &ReferenceRecord, a: &ReproduceArgs, g: &GlobalArgs) -> RowOutcome {
    let graph = match row_graph(rec, a) {
        Ok(graph) => graph,
        Err(why) => return RowOutcome::Skipped(why),
    };
    log::info!("reproducing {} (n = {})", rec.name, graph.n());
    match compute_bounds(&graph, rec.name, &loop_config(g, rec.problem)) {
        Ok(r) => RowOutcome::Done(Box::new(report::compare(rec, &r))),
        Err(e) => RowOutcome::Skipped(format!("failed: {e}")),
    }
}

fn cmd_reproduce(a: &ReproduceArgs, g: &GlobalArgs) -> CmdResult {
    let ids = table_ids(&a.tables)?;
    let rows: Vec<&ReferenceRecord> = reference::records()
        .filter(|r| ids.contains(&r.table))
        .collect();
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .max(1);

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<RowOutcome>>> =
        Mutex::new((0..rows.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(rows.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(rec) = rows.get(i) else { break };
                let outcome = run_row(rec, a, g);
                outcomes.lock().expect("no worker panicked")[i] = Some(outcome);
            });
        }
    });

    let mut done = Vec::new();
    for (rec, outcome) in rows
        .iter()
        .zip(outcomes.into_inner().expect("no worker panicked"))
    {
        match outcome.expect("every row ran") {
            RowOutcome::Done(c) => done.push(*c),
            RowOutcome::Skipped(why) => {
                eprintln!("skipped {} (table {}): {why}", rec.name, rec.table)
            }
        }
    }
    emit(
        &report::render_comparisons(&done, g.format.unwrap_or(Format::Csv))?,
        g.out.as_deref(),
    )
}

fn cmd_report(a: &ReportArgs, g: &GlobalArgs) -> CmdResult {
    let mut reports: Vec<BoundReport> = Vec::new();
    for path in &a.files {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let r = report::parse_report(&text).map_err(|e| {
            Failure::input(format!(
                "{}: {e} (this build reads schema {REPORT_SCHEMA_VERSION})",
                path.display()
            ))
        })?;
        reports.push(r);
    }
    let rows = report::summary_rows(&reports);
    emit(
        &report::render_summary(&rows, g.format.unwrap_or(Format::Md))?,
        g.out.as_deref(),
    )
}
