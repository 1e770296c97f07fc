//! The `pebble` command: catalog listings, oracle runs, model generation,
//! solver or heuristic bound runs, certificate verification, conversion,
//! DOT export and model statistics.

pub mod settings;

use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pebbling::cert::{certify, Certified};
use pebbling::certfile::{convert_decimal, parse_certificate, write_certificate, CertificateFile, DEFAULT_MAX_EXPONENT};
use pebbling::heuristic::heuristic_generate;
use pebbling::milp::{
    build_model, emit_lp, extract_strategies, model_stats, parse_solution, sanitize, ModelParams, Variant,
};
use pebbling::oracle::{self, OracleError, OracleOptions, DEFAULT_BUDGET};
use pebbling::par::{self, Execution};
use pebbling::strategy::validate_strategy;
use pebbling::{catalog, CertificateBundle, Graph};

use settings::{default_t, default_variant, FileConfig, DEFAULT_ELL};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Code {
    Ok = 0,
    Invalid = 1,
    Usage = 2,
    Solver = 3,
    Budget = 4,
}

/// An error that carries its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: Code,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn fail(code: Code, message: impl Into<String>) -> anyhow::Error {
    Failure { code, message: message.into() }.into()
}

/// Exit code for an error returned by [`run`]: the code of the first
/// [`Failure`] in its chain, usage (2) otherwise.
pub fn exit_code(err: &anyhow::Error) -> Code {
    err.chain().find_map(|e| e.downcast_ref::<Failure>()).map_or(Code::Usage, |f| f.code)
}

#[derive(Debug, Parser)]
#[command(name = "pebble", version, about = "Tree-strategy certificates for graph pebbling bounds")]
pub struct Cli {
    /// Config file with `key = value` lines (solver_cmd, threads, budget).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print a catalog graph in the graph text format.
    Catalog(CatalogArgs),
    /// Compute rooted pebbling numbers by exhaustive search.
    Oracle(OracleArgs),
    /// Build the model, solve it (or run the heuristic) and certify a bound.
    Bound(BoundArgs),
    /// Re-check a certificate exactly and print the bound it proves.
    Verify(VerifyArgs),
    /// Turn a decimal transcription into an exact certificate.
    Convert(ConvertArgs),
    /// Write one DOT digraph per strategy of a valid certificate.
    Dot(DotArgs),
    /// Print model size statistics.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Catalog key such as `lemke`, `bruhat4`, `cycle_6` or `lemke_square`.
    pub key: Option<String>,
    /// List the accepted key forms.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Catalog key or graph file.
    #[arg(long)]
    pub graph: String,
    /// Single root label; every root when omitted.
    #[arg(long)]
    pub root: Option<String>,
    /// Search budget in visited states per root.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Largest configuration size to explore.
    #[arg(long)]
    pub cap: Option<u32>,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Catalog key or graph file.
    #[arg(long)]
    pub graph: String,
    /// Root label.
    #[arg(long)]
    pub root: Option<String>,
    /// Number of strategies.
    #[arg(long = "T", value_name = "T")]
    pub t: Option<usize>,
    /// Tree depth parameter ell.
    #[arg(long)]
    pub ell: Option<u32>,
    /// TS or STS.
    #[arg(long)]
    pub variant: Option<Variant>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// `all` runs every root.
    #[arg(long, conflicts_with = "root")]
    pub roots: Option<String>,
    /// Use the heuristic even when a solver is configured.
    #[arg(long, conflicts_with = "no_heuristic")]
    pub heuristic: bool,
    /// Never fall back to the heuristic.
    #[arg(long)]
    pub no_heuristic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; files go to `<out>/<graph>/<root>/`.
    #[arg(long, default_value = "pebble-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_EXPONENT)]
    pub max_exponent: u32,
    /// Solver command template with `{model}` and `{solution}` placeholders.
    #[arg(long)]
    pub solver_cmd: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_EXPONENT)]
    pub max_exponent: u32,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DotArgs {
    pub certificate: PathBuf,
    /// Write `tree_<i>.dot` files here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

/// Runs a parsed command line, writing the report to `out`. Returns the exit
/// code for completed runs (1 for an invalid certificate); errors carry
/// their code through [`exit_code`].
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Code> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(threads) = cfg.threads {
        par::set_threads(threads);
    }
    match cli.command {
        Cmd::Catalog(a) => cmd_catalog(&a, out),
        Cmd::Oracle(a) => cmd_oracle(&a, &cfg, out),
        Cmd::Bound(a) => cmd_bound(&a, &cfg, out),
        Cmd::Verify(a) => cmd_verify(&a.certificate, out),
        Cmd::Convert(a) => cmd_convert(&a, out),
        Cmd::Dot(a) => cmd_dot(&a, out),
        Cmd::Stats(a) => cmd_stats(&a, out),
    }
}

/// A catalog key, or a graph file when `source` names an existing file
/// (relative paths are tried against `base` first).
pub fn load_graph(source: &str, base: Option<&Path>) -> Result<Graph> {
    let candidates = base.map(|b| b.join(source)).into_iter().chain([PathBuf::from(source)]);
    for path in candidates {
        if path.is_file() {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            return Graph::parse_text(&text).with_context(|| format!("parsing graph file {}", path.display()));
        }
    }
    catalog(source).map_err(|e| fail(Code::Usage, e.to_string()))
}

fn load_certificate(path: &Path) -> Result<CertificateFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf);
    let resolve = |key: &str| load_graph(key, base.as_deref()).map_err(|e| e.to_string());
    parse_certificate(&text, resolve).map_err(|e| fail(Code::Invalid, format!("{}: {e}", path.display())))
}

fn root_index(g: &Graph, root: Option<&str>) -> Result<usize> {
    match root {
        Some(label) => g.require_vertex(label).map_err(|e| fail(Code::Usage, e.to_string())),
        None => Ok(0),
    }
}

pub fn cmd_catalog(a: &CatalogArgs, out: &mut dyn Write) -> Result<Code> {
    if a.list {
        for k in pebbling::catalog::KEYS {
            writeln!(out, "{k}")?;
        }
        return Ok(Code::Ok);
    }
    let key = a.key.as_deref().ok_or_else(|| fail(Code::Usage, "catalog needs a key (or --list)"))?;
    let g = catalog(key).map_err(|e| fail(Code::Usage, e.to_string()))?;
    out.write_all(g.to_text().as_bytes())?;
    Ok(Code::Ok)
}

pub fn cmd_oracle(a: &OracleArgs, cfg: &FileConfig, out: &mut dyn Write) -> Result<Code> {
    let g = load_graph(&a.graph, None)?;
    g.require_connected().map_err(|e| fail(Code::Usage, e.to_string()))?;
    let opts = OracleOptions { size_cap: a.cap, budget: a.budget.or(cfg.budget).unwrap_or(DEFAULT_BUDGET) };
    let roots: Vec<usize> = match &a.root {
        Some(label) => vec![root_index(&g, Some(label))?],
        None => (0..g.len()).collect(),
    };
    let stop = AtomicBool::new(false);
    let reports = par::map(Execution::Parallel, &roots, |&r| {
        if stop.load(Ordering::Relaxed) {
            return None;
        }
        let rep = oracle::max_unsolvable(&g, r, opts);
        if rep.as_ref().is_err_and(OracleError::is_inconclusive) {
            stop.store(true, Ordering::Relaxed);
        }
        Some(rep)
    });
    if let Some((r, Some(Err(e)))) = roots.iter().zip(&reports).find(|(_, rep)| matches!(rep, Some(Err(_)))) {
        let msg = format!("oracle on {} root {}: {e}", g.name(), g.label(*r));
        return Err(if e.is_inconclusive() { fail(Code::Budget, msg) } else { anyhow!(msg) });
    }
    let mut best = 0;
    for (r, rep) in roots.iter().zip(reports.into_iter().flatten()) {
        match rep {
            Ok(rep) => {
                best = best.max(rep.rooted_pebbling_number);
                let witness: Vec<String> = (0..g.len())
                    .filter(|&v| rep.witness.get(v) > 0)
                    .map(|v| format!("{}:{}", g.label(v), rep.witness.get(v)))
                    .collect();
                writeln!(
                    out,
                    "π({}, {}) = {}  (largest unsolvable size {}, witness {})",
                    g.name(),
                    g.label(*r),
                    rep.rooted_pebbling_number,
                    rep.max_unsolvable_size,
                    if witness.is_empty() { "empty".to_string() } else { witness.join(" ") }
                )?;
            }
            Err(e) => return Err(anyhow!(e)),
        }
    }
    if a.root.is_none() {
        writeln!(out, "π({}) = {best}", g.name())?;
    }
    Ok(Code::Ok)
}

/// Resolved model parameters for one root, with any note on how they were chosen.
struct Resolved {
    params: ModelParams,
    note: Option<String>,
}

fn resolve_params(g: &Graph, root: usize, m: &ModelArgs) -> Result<Resolved> {
    let mut note = None;
    let mut variant = m.variant.unwrap_or_else(|| default_variant(g, root));
    if variant == Variant::Sts && default_variant(g, root) != Variant::Sts {
        note = Some(format!(
            "note: the symmetric model needs a Cartesian square with a diagonal root; `{}` does not qualify, using TS",
            g.label(root)
        ));
        variant = Variant::Ts;
    }
    let t = m.t.unwrap_or_else(|| default_t(g, variant));
    let ell = m.ell.unwrap_or(DEFAULT_ELL);
    let params = ModelParams::new(t, ell, variant).map_err(|e| fail(Code::Usage, e.to_string()))?;
    Ok(Resolved { params, note })
}

/// Exact verification report of a bundle. Returns the text and, when every
/// check passes, both bounds.
pub fn verify_report(key: &str, bundle: &CertificateBundle) -> (String, Option<Certified>) {
    let g = bundle.graph();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "graph {key} ({} vertices, {} edges), root {}, {} strategies",
        g.len(),
        g.edge_count(),
        g.label(bundle.root()),
        bundle.len()
    );
    let mut invalid = 0;
    for (i, st) in bundle.strategies().iter().enumerate() {
        let verdict = validate_strategy(st);
        for v in &verdict.violations {
            let _ = writeln!(s, "strategy {}: {v}", i + 1);
        }
        if !verdict.is_ok() {
            invalid += 1;
        }
    }
    if invalid > 0 {
        let _ = writeln!(s, "{invalid} of {} strategies invalid", bundle.len());
        s.push_str("INVALID\n");
        return (s, None);
    }
    let _ = writeln!(s, "all {} strategies valid", bundle.len());
    match certify(bundle) {
        Ok(c) => {
            let mins: Vec<&str> = c.covering.minimisers(bundle.root()).into_iter().map(|v| g.label(v)).collect();
            let (k, total) = (c.covering.k.to_decimal(), c.covering.total_weight.to_decimal());
            let _ = writeln!(s, "K = {k} attained at {}", mins.join(" "));
            let _ = writeln!(s, "total weight = {total}");
            let _ = writeln!(s, "covering bound: floor({total} / {k}) + 1 = {}", c.covering.bound);
            let _ = writeln!(s, "LP relaxation: z_hat = {} (dual checked), bound {}", c.lp.z_hat, c.lp.bound);
            let _ = writeln!(s, "certified: π({key}, {}) <= {}", g.label(bundle.root()), c.bound);
            s.push_str("VALID\n");
            (s, Some(c))
        }
        Err(e) => {
            let _ = writeln!(s, "{e}");
            s.push_str("INVALID\n");
            (s, None)
        }
    }
}

pub fn cmd_verify(path: &Path, out: &mut dyn Write) -> Result<Code> {
    let f = load_certificate(path)?;
    let (text, result) = verify_report(&f.graph_key, &f.bundle);
    writeln!(out, "certificate {}", path.display())?;
    out.write_all(text.as_bytes())?;
    Ok(if result.is_some() { Code::Ok } else { Code::Invalid })
}

pub fn cmd_convert(a: &ConvertArgs, out: &mut dyn Write) -> Result<Code> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let base = a.input.parent().map(Path::to_path_buf);
    let resolve = |key: &str| load_graph(key, base.as_deref()).map_err(|e| e.to_string());
    let exact = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.split_whitespace().eq(["certificate", "v1"]));
    let f = if exact {
        let f = parse_certificate(&text, resolve).map_err(|e| fail(Code::Invalid, e.to_string()))?;
        f.bundle.validate().map_err(|e| fail(Code::Invalid, e.to_string()))?;
        f
    } else {
        convert_decimal(&text, resolve, a.max_exponent).map_err(|e| fail(Code::Invalid, e.to_string()))?
    };
    let exact_text = write_certificate(&f.graph_key, &f.bundle);
    match &a.output {
        Some(path) => std::fs::write(path, exact_text).with_context(|| format!("writing {}", path.display()))?,
        None => out.write_all(exact_text.as_bytes())?,
    }
    Ok(Code::Ok)
}

/// DOT text for strategy `index` (1-based): arcs point from parent to
/// child, nodes show the exact decimal weight and the root is double-circled.
pub fn strategy_dot(key: &str, bundle: &CertificateBundle, index: usize) -> String {
    let g = bundle.graph();
    let s = &bundle.strategies()[index - 1];
    let root = g.label(bundle.root());
    let mut d = format!("digraph tree_{index} {{\n  label=\"{key} root {root}, strategy {index}\";\n");
    let _ = writeln!(d, "  \"{root}\" [label=\"{root}\", shape=doublecircle, style=filled, fillcolor=lightgray];");
    let arcs = s.arcs();
    for &(_, c, w) in &arcs {
        let _ = writeln!(d, "  \"{0}\" [label=\"{0}\\n{1}\"];", g.label(c), w.to_decimal());
    }
    for &(p, c, _) in &arcs {
        let _ = writeln!(d, "  \"{}\" -> \"{}\";", g.label(p), g.label(c));
    }
    d.push_str("}\n");
    d
}

pub fn cmd_dot(a: &DotArgs, out: &mut dyn Write) -> Result<Code> {
    let f = load_certificate(&a.certificate)?;
    let (report, result) = verify_report(&f.graph_key, &f.bundle);
    if result.is_none() {
        return Err(fail(Code::Invalid, format!("refusing to draw an invalid certificate:\n{report}")));
    }
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for i in 1..=f.bundle.len() {
        let dot = strategy_dot(&f.graph_key, &f.bundle, i);
        match &a.out {
            Some(dir) => {
                let path = dir.join(format!("tree_{i}.dot"));
                std::fs::write(&path, dot).with_context(|| format!("writing {}", path.display()))?;
                writeln!(out, "{}", path.display())?;
            }
            None => out.write_all(dot.as_bytes())?,
        }
    }
    Ok(Code::Ok)
}

pub fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<Code> {
    let g = Arc::new(load_graph(&a.model.graph, None)?);
    let root = root_index(&g, a.model.root.as_deref())?;
    let r = resolve_params(&g, root, &a.model)?;
    if let Some(note) = &r.note {
        writeln!(out, "{note}")?;
    }
    let model = build_model(Arc::clone(&g), root, r.params).map_err(|e| fail(Code::Usage, e.to_string()))?;
    writeln!(out, "{} model, graph {}, root {}, ell = {}", r.params.variant, g.name(), g.label(root), r.params.ell)?;
    write!(out, "{}", model_stats(&model))?;
    Ok(Code::Ok)
}

/// Fills `{model}` and `{solution}` in a solver template. Paths are single-quoted for `sh`.
pub fn solver_command(template: &str, model: &Path, solution: &Path) -> String {
    let quote = |p: &Path| format!("'{}'", p.display().to_string().replace('\'', r"'\''"));
    template.replace("{model}", &quote(model)).replace("{solution}", &quote(solution))
}

fn run_solver(template: &str, model: &Path, solution: &Path, log: &Path) -> Result<()> {
    let cmd = solver_command(template, model, solution);
    let _ = std::fs::remove_file(solution);
    let output = Command::new("sh").arg("-c").arg(&cmd).output().map_err(|e| fail(Code::Solver, format!("running `{cmd}`: {e}")))?;
    let mut log_text = format!("$ {cmd}\nexit status: {}\n--- stdout\n", output.status);
    log_text.push_str(&String::from_utf8_lossy(&output.stdout));
    log_text.push_str("--- stderr\n");
    log_text.push_str(&String::from_utf8_lossy(&output.stderr));
    std::fs::write(log, log_text).with_context(|| format!("writing {}", log.display()))?;
    if !output.status.success() {
        return Err(fail(Code::Solver, format!("solver exited with {}; log: {}", output.status, log.display())));
    }
    if !solution.is_file() {
        return Err(fail(Code::Solver, format!("solver wrote no solution file; log: {}", log.display())));
    }
    Ok(())
}

/// Outcome of one single-root bound run.
pub struct RootRun {
    pub root: usize,
    pub report: String,
    pub code: Code,
}

fn bound_root(a: &BoundArgs, solver: Option<&str>, g: &Arc<Graph>, root: usize) -> Result<RootRun> {
    let r = resolve_params(g, root, &a.model)?;
    let p = r.params;
    let dir = a.out.join(sanitize(g.name())).join(sanitize(g.label(root)));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut report = String::new();
    let _ = writeln!(report, "graph {}, root {}: {} model, T = {}, ell = {}", g.name(), g.label(root), p.variant, p.t, p.ell);
    if let Some(note) = &r.note {
        let _ = writeln!(report, "{note}");
    }

    let model = build_model(Arc::clone(g), root, p).map_err(|e| fail(Code::Usage, e.to_string()))?;
    let model_path = dir.join("model.lp");
    std::fs::write(&model_path, emit_lp(&model)).with_context(|| format!("writing {}", model_path.display()))?;
    let stats = model_stats(&model);
    let _ = writeln!(report, "model: {} variables, {} constraints -> {}", stats.variable_count, stats.constraint_count, model_path.display());

    let use_solver = solver.filter(|_| !a.heuristic);
    let bundle = match use_solver {
        Some(template) => {
            let sol_path = dir.join("solution.sol");
            run_solver(template, &model_path, &sol_path, &dir.join("solver.log"))?;
            let text = std::fs::read_to_string(&sol_path)?;
            let sol = parse_solution(&model, &text).map_err(|e| fail(Code::Solver, e.to_string()))?;
            let ex = extract_strategies(&model, &sol, a.max_exponent)
                .map_err(|e| fail(Code::Invalid, format!("extraction failed: {e}")))?;
            let _ = writeln!(report, "method: solver, status {}", sol.status);
            if let Some(claim) = ex.claimed_bound {
                let _ = writeln!(report, "solver objective implies floor(z/T) + 1 = {claim}");
            }
            if ex.dropped_zero_weight > 0 {
                let _ = writeln!(report, "dropped {} tree vertices whose weight rounds to 0", ex.dropped_zero_weight);
            }
            if ex.dropped_empty > 0 {
                let _ = writeln!(report, "omitted {} strategies with no positive weight", ex.dropped_empty);
            }
            ex.bundle
        }
        None if a.no_heuristic => {
            return Err(fail(Code::Usage, "no generation method: no solver configured and --no-heuristic given"));
        }
        None => {
            let _ = writeln!(report, "method: heuristic, seed {}", a.seed);
            heuristic_generate(Arc::clone(g), root, p, a.seed).map_err(|e| anyhow!(e))?
        }
    };

    let cert_path = dir.join("bundle.cert");
    std::fs::write(&cert_path, write_certificate(g.name(), &bundle))
        .with_context(|| format!("writing {}", cert_path.display()))?;
    // Verify what was written, not what is in memory.
    let reread = load_certificate(&cert_path)?;
    let (text, result) = verify_report(&reread.graph_key, &reread.bundle);
    let _ = writeln!(report, "certificate: {}", cert_path.display());
    report.push_str(&text);
    std::fs::write(dir.join("report.txt"), &report)?;
    Ok(RootRun { root, report, code: if result.is_some() { Code::Ok } else { Code::Invalid } })
}

pub fn cmd_bound(a: &BoundArgs, cfg: &FileConfig, out: &mut dyn Write) -> Result<Code> {
    let g = Arc::new(load_graph(&a.model.graph, None)?);
    g.require_connected().map_err(|e| fail(Code::Usage, e.to_string()))?;
    let roots: Vec<usize> = match a.roots.as_deref() {
        Some("all") => (0..g.len()).collect(),
        Some(other) => bail!(fail(Code::Usage, format!("--roots accepts only `all`, got `{other}`"))),
        None => vec![root_index(&g, a.model.root.as_deref())?],
    };
    let solver = cfg.solver_cmd(a.solver_cmd.as_deref());
    let runs = par::map(Execution::Parallel, &roots, |&r| bound_root(a, solver.as_deref(), &g, r));
    let mut code = Code::Ok;
    let mut first_err = None;
    let failed = runs.iter().filter(|r| r.is_err()).count();
    for run in runs {
        match run {
            Ok(run) => {
                out.write_all(run.report.as_bytes())?;
                code = code.max(run.code);
            }
            Err(e) => {
                if roots.len() > 1 {
                    writeln!(out, "error: {e:#}")?;
                }
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) if roots.len() == 1 => Err(e),
        Some(e) => Err(fail(exit_code(&e), format!("{failed} of {} roots failed; first: {e:#}", roots.len()))),
        None => Ok(code),
    }
}
