use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use qldpc_tbf::code::{self, validate_css, CssCode};
use qldpc_tbf::collective::{resolve_ensemble, Classifier, Ensemble, Outcome, PreparedEnsemble};
use qldpc_tbf::gf2::{syndrome, BitVec};
use qldpc_tbf::setgen::{self, classify_supports, GenSetConfig};
use qldpc_tbf::sim::{self, SweepRow};
use qldpc_tbf::tanner::{build_graph, enumerate_cycles, TannerGraph};
use qldpc_tbf::trapping::{self, classify, Growth, TrappingSet, DEFAULT_MAX_SIZE, MAX_SYMMETRIC_SIZE};
use qldpc_tbf::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "qtbf", version, about = "Two-bit bit-flipping decoders for quantum LDPC codes")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or validate a code.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Cycle and trapping-set analysis.
    #[command(subcommand)]
    Tsa(TsaCmd),
    /// Decode syndromes (or errors) read from a file.
    Decode(DecodeArgs),
    /// Greedy decoder-set generation over trapping-set supports.
    Genset(GensetArgs),
    /// Monte-Carlo FER sweep over the binary symmetric channel.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct CodeArg {
    /// Code spec file (TOML) or a builtin name (`b1`).
    #[arg(long)]
    code: String,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Write H_X and H_Z.
    Build {
        #[command(flatten)]
        code: CodeArg,
        /// Output directory (default: H_Z to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Dense)]
        format: MatrixFormat,
    },
    /// Check commutation and report degrees and dimension.
    Validate {
        #[command(flatten)]
        code: CodeArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Dense,
    Mtx,
}

#[derive(Subcommand)]
enum TsaCmd {
    /// Grow structures from the short cycles and list them.
    Census {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        max_size: usize,
        /// Largest zero-syndrome structure grown from 8-cycles.
        #[arg(long, default_value_t = MAX_SYMMETRIC_SIZE)]
        stabilizer_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a parent structure to a terminal one.
    Expand {
        #[command(flatten)]
        code: CodeArg,
        /// File whose first non-comment line lists the parent's variables.
        #[arg(long)]
        parent: PathBuf,
        #[arg(long, value_enum, default_value_t = GrowthArg::Closure)]
        growth: GrowthArg,
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        max_size: usize,
        /// Grow in the whole graph even when the parent sits in one column block.
        #[arg(long)]
        full_graph: bool,
        /// Emit every structure on the path, not only the last.
        #[arg(long)]
        path: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the cycles of one length.
    Cycles {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GrowthArg {
    FirstChild,
    Union,
    Closure,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, default_value = "D1")]
    ensemble: String,
    /// One syndrome per line as a 0/1 string.
    #[arg(long, conflicts_with = "errors", required_unless_present = "errors")]
    syndrome: Option<PathBuf>,
    /// One error per line as a 0/1 string; syndromes are computed and
    /// outcomes classified.
    #[arg(long)]
    errors: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    /// Channel prior used by min-sum members.
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GensetArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Target weight.
    #[arg(long)]
    t: usize,
    /// One support per line (census output is accepted).
    #[arg(long)]
    supports: PathBuf,
    /// Patterns per support and weight (default: all).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    /// Chosen set as an ensemble file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Selection trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Comma-separated ensembles (builtin, decoder name or file).
    #[arg(long, value_delimiter = ',', default_value = "D1")]
    ensemble: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop a point after this many frame errors; 0 disables.
    #[arg(long, default_value_t = 100)]
    early_stop_frames: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Companion plot-data file (p, then one FER column per ensemble).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    NotAchieved(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Code(c) => cmd_code(c),
        Command::Tsa(c) => cmd_tsa(c),
        Command::Decode(a) => cmd_decode(a),
        Command::Genset(a) => cmd_genset(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NotAchieved(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(4)
        }
    }
}

fn load_code(reference: &str) -> CliResult<CssCode> {
    match reference.to_ascii_lowercase().as_str() {
        "b1" => Ok(code::b1()),
        _ => {
            let path = Path::new(reference);
            if !path.exists() {
                return Err(Failure::Config(format!("code `{reference}` is neither a builtin nor a file")));
            }
            code::load_code_spec(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
        }
    }
}

/// `qtbf <version> seed=<seed> config=<hash>`; the hash covers every flag
/// that can change the output.
fn header(seed: Option<u64>, config: &[(&str, String)]) -> String {
    let mut canon = String::new();
    for (k, v) in config {
        let _ = writeln!(canon, "{k}={v}");
    }
    let digest = Sha256::digest(canon.as_bytes());
    let hash: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("qtbf {VERSION} seed={seed} config={hash}")
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Variable list of one support line; a leading `(a,b)` label is skipped.
fn parse_support(line: &str) -> Result<Vec<usize>, Error> {
    let body = match line.strip_prefix('(') {
        Some(rest) => rest.split_once(')').map_or("", |(_, tail)| tail),
        None => line,
    };
    TrappingSet::parse_line(body)
}

fn structure_line(ts: &TrappingSet) -> String {
    format!("({},{}) {}", ts.a, ts.b, ts.to_line())
}

fn cmd_code(cmd: CodeCmd) -> CliResult {
    match cmd {
        CodeCmd::Build { code, out, format } => {
            let c = load_code(&code.code)?;
            eprintln!(
                "{}: n={} H_X {}x{} H_Z {}x{}",
                c.name,
                c.n,
                c.hx.rows(),
                c.hx.cols(),
                c.hz.rows(),
                c.hz.cols()
            );
            let write = |m: &qldpc_tbf::gf2::BinaryMatrix, w: &mut dyn Write| -> CliResult {
                match format {
                    MatrixFormat::Dense => m.write_dense(w)?,
                    MatrixFormat::Mtx => m.write_coordinate(w)?,
                }
                Ok(())
            };
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let ext = match format {
                        MatrixFormat::Dense => "txt",
                        MatrixFormat::Mtx => "mtx",
                    };
                    for (name, m) in [("hx", &c.hx), ("hz", &c.hz)] {
                        let path = dir.join(format!("{name}.{ext}"));
                        let mut f = io::BufWriter::new(fs::File::create(&path)?);
                        write(m, &mut f)?;
                        f.flush()?;
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = io::BufWriter::new(stdout.lock());
                    write(&c.hz, &mut lock)?;
                    lock.flush()?;
                }
            }
            Ok(())
        }
        CodeCmd::Validate { code } => {
            let c = load_code(&code.code)?;
            let report = validate_css(&c);
            let k = c.n - c.hx.rank() - c.hz.rank();
            let mut text = format!("# {}\n", header(None, &[("cmd", "code validate".into()), ("code", code.code.clone())]));
            let _ = writeln!(text, "code: {}", c.name);
            let _ = writeln!(text, "n: {}", c.n);
            let _ = writeln!(text, "k: {k}");
            if let Some(expected) = c.k {
                let _ = writeln!(text, "k (declared): {expected}");
            }
            let _ = writeln!(text, "{report}");
            let ok = report.passed() && c.k.is_none_or(|e| e == k);
            text.push_str(if ok { "pass\n" } else { "fail\n" });
            emit(None, &text)?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Config(format!("{} failed validation", c.name)))
            }
        }
    }
}

fn cmd_tsa(cmd: TsaCmd) -> CliResult {
    match cmd {
        TsaCmd::Census {
            code,
            max_size,
            stabilizer_size,
            out,
        } => {
            let c = load_code(&code.code)?;
            let g = build_graph(&c.hz);
            let census = trapping::census(&g, &c, max_size, stabilizer_size)?;
            let cfg = [
                ("cmd", "tsa census".to_string()),
                ("code", code.code.clone()),
                ("max-size", max_size.to_string()),
                ("stabilizer-size", stabilizer_size.to_string()),
            ];
            let mut text = format!("# {}\n", header(None, &cfg));
            for structures in census.from_six_cycles.values() {
                for ts in structures {
                    let _ = writeln!(text, "{}", structure_line(ts));
                }
            }
            for ts in &census.symmetric_stabilizers {
                let _ = writeln!(text, "{}", structure_line(ts));
            }
            eprintln!("6-cycles: {}  8-cycles: {}", census.six_cycles, census.eight_cycles);
            for l in census.summary_lines() {
                eprintln!("{l}");
            }
            emit(out.as_deref(), &text)
        }
        TsaCmd::Expand {
            code,
            parent,
            growth,
            max_size,
            full_graph,
            path,
            out,
        } => {
            let c = load_code(&code.code)?;
            let g = build_graph(&c.hz);
            let text = read(&parent)?;
            let (line_no, line) = data_lines(&text)
                .next()
                .ok_or_else(|| Failure::Config(format!("{}: no support line", parent.display())))?;
            let vars = parse_support(line).map_err(|e| Failure::Config(format!("{}:{line_no}: {e}", parent.display())))?;
            if let Some(&v) = vars.iter().find(|&&v| v >= c.n) {
                return Err(Failure::Config(format!("variable {v} out of range (n = {})", c.n)));
            }
            let graph = if full_graph { g } else { block_graph(&g, &c, &vars) };
            let root = classify(&graph, &vars)?;
            let steps = match growth {
                GrowthArg::FirstChild => trapping::grow(&graph, &root, max_size, Growth::FirstChild)?,
                GrowthArg::Union => trapping::grow(&graph, &root, max_size, Growth::Union)?,
                GrowthArg::Closure => trapping::grow_to_closure(&graph, &root, max_size)?,
            };
            let labels: Vec<String> = steps.iter().map(|t| t.to_string()).collect();
            eprintln!("{}", labels.join(" -> "));
            let cfg = [
                ("cmd", "tsa expand".to_string()),
                ("code", code.code.clone()),
                ("parent", root.to_line()),
                ("growth", format!("{growth:?}")),
                ("max-size", max_size.to_string()),
                ("full-graph", full_graph.to_string()),
            ];
            let mut text = format!("# {}\n", header(None, &cfg));
            let shown: &[TrappingSet] = if path { &steps } else { &steps[steps.len() - 1..] };
            for ts in shown {
                let _ = writeln!(text, "{}", structure_line(ts));
            }
            emit(out.as_deref(), &text)
        }
        TsaCmd::Cycles { code, length, out } => {
            if length < 4 || length % 2 == 1 {
                return Err(Failure::Config(format!("cycle length {length} must be even and at least 4")));
            }
            let c = load_code(&code.code)?;
            let g = build_graph(&c.hz);
            let cycles = enumerate_cycles(&g, length);
            let cfg = [
                ("cmd", "tsa cycles".to_string()),
                ("code", code.code.clone()),
                ("length", length.to_string()),
            ];
            let mut text = format!("# {}\n", header(None, &cfg));
            for cy in &cycles {
                let _ = writeln!(text, "{}", cy.to_line());
            }
            eprintln!("{} cycles of length {length}", cycles.len());
            emit(out.as_deref(), &text)
        }
    }
}

/// The Tanner graph restricted to the column block holding all of `vars`,
/// or the whole graph when they straddle the boundary.
fn block_graph(g: &TannerGraph, c: &CssCode, vars: &[usize]) -> TannerGraph {
    let b = c.circulant_boundary.min(c.n);
    if vars.iter().all(|&v| v < b) {
        g.column_restricted(0..b)
    } else if vars.iter().all(|&v| v >= b) {
        g.column_restricted(b..c.n)
    } else {
        g.clone()
    }
}

fn cmd_decode(a: DecodeArgs) -> CliResult {
    let c = load_code(&a.code.code)?;
    let ens = resolve_ensemble(&a.ensemble)?;
    let prepared = PreparedEnsemble::new(&ens, &c, a.p)?;
    let classifier = Classifier::new(Arc::new(c.clone()));
    if a.max_iters == 0 {
        return Err(Failure::Config("--max-iters must be at least 1".into()));
    }
    let (input, known_errors) = match (&a.syndrome, &a.errors) {
        (Some(p), _) => (p.clone(), false),
        (None, Some(p)) => (p.clone(), true),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let text = read(&input)?;
    let mut rows = Vec::new();
    for (line_no, line) in data_lines(&text) {
        let v = BitVec::parse(line).map_err(|e| Failure::Config(format!("{}:{line_no}: {e}", input.display())))?;
        let (e, s) = if known_errors {
            if v.len() != c.n {
                return Err(Failure::Config(format!("{}:{line_no}: error has {} bits, expected {}", input.display(), v.len(), c.n)));
            }
            let s = syndrome(&c.hz, &v)?;
            (Some(v), s)
        } else {
            if v.len() != c.hz.rows() {
                return Err(Failure::Config(format!(
                    "{}:{line_no}: syndrome has {} bits, expected {}",
                    input.display(),
                    v.len(),
                    c.hz.rows()
                )));
            }
            (None, v)
        };
        let results = prepared.run(&s, a.max_iters)?;
        for r in &results {
            if r.converged && syndrome(&c.hz, &r.estimate)? != s {
                return Err(Failure::Invariant("a member reported convergence with a wrong syndrome".into()));
            }
        }
        let (winner, verdict) = match &e {
            Some(e) => {
                let o = Outcome::from_results(&results, e, &classifier)?;
                (o.winner, Some(o.verdict))
            }
            // fewest iterations among converged members, earliest on ties
            None => (
                results
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.converged)
                    .min_by_key(|(i, r)| (r.iterations, *i))
                    .map(|(i, _)| i),
                None,
            ),
        };
        let (estimate, iterations) = match winner {
            Some(i) => (results[i].estimate.clone(), results[i].iterations),
            None => (results[0].estimate.clone(), results.iter().map(|r| r.iterations).max().unwrap_or(0)),
        };
        rows.push(DecodeRow {
            index: rows.len(),
            converged: winner.is_some(),
            iterations,
            winner: winner.map(|i| ens.members[i].name.clone()),
            verdict: verdict.map(|v| format!("{v:?}")),
            estimate,
        });
    }
    let cfg = [
        ("cmd", "decode".to_string()),
        ("code", a.code.code.clone()),
        ("ensemble", a.ensemble.clone()),
        ("input", text.clone()),
        ("inputs-are-errors", known_errors.to_string()),
        ("max-iters", a.max_iters.to_string()),
        ("p", a.p.to_string()),
    ];
    let head = header(None, &cfg);
    let converged = rows.iter().filter(|r| r.converged).count();
    eprintln!("{converged}/{} syndromes matched by {}", rows.len(), ens.name);
    let text = match a.format {
        Format::Csv => {
            let mut t = format!("# {head}\nindex,converged,iterations,winner,verdict,estimate\n");
            for r in &rows {
                let _ = writeln!(
                    t,
                    "{},{},{},{},{},{}",
                    r.index,
                    r.converged,
                    r.iterations,
                    r.winner.as_deref().unwrap_or(""),
                    r.verdict.as_deref().unwrap_or(""),
                    r.estimate
                );
            }
            t
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "index": r.index,
                        "converged": r.converged,
                        "iterations": r.iterations,
                        "winner": r.winner,
                        "verdict": r.verdict,
                        "estimate": r.estimate.to_string(),
                    })
                })
                .collect();
            json_text(serde_json::json!({ "header": head, "results": items }))
        }
    };
    emit(a.out.as_deref(), &text)
}

struct DecodeRow {
    index: usize,
    converged: bool,
    iterations: usize,
    winner: Option<String>,
    verdict: Option<String>,
    estimate: BitVec,
}

fn json_text(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_genset(a: GensetArgs) -> CliResult {
    if a.t == 0 {
        return Err(Failure::Config("--t must be at least 1".into()));
    }
    if a.max_iters == 0 {
        return Err(Failure::Config("--max-iters must be at least 1".into()));
    }
    let c = load_code(&a.code.code)?;
    let text = read(&a.supports)?;
    let mut sets = Vec::new();
    for (line_no, line) in data_lines(&text) {
        let vars = parse_support(line).map_err(|e| Failure::Config(format!("{}:{line_no}: {e}", a.supports.display())))?;
        if let Some(&v) = vars.iter().find(|&&v| v >= c.n) {
            return Err(Failure::Config(format!("{}:{line_no}: variable {v} out of range", a.supports.display())));
        }
        sets.push(vars);
    }
    if sets.is_empty() {
        return Err(Failure::Config(format!("{}: no supports", a.supports.display())));
    }
    let supports = classify_supports(&c, &sets);
    let pinned = supports.iter().filter(|s| s.reduction == setgen::Reduction::Pinned).count();
    eprintln!("{} supports ({pinned} symmetry-reduced)", supports.len());
    let report = setgen::generate_set(
        &c,
        &supports,
        GenSetConfig {
            target: a.t,
            max_iters: a.max_iters,
            budget: a.budget,
        },
        &setgen::all_candidates(),
    )?;
    let cfg = [
        ("cmd", "genset".to_string()),
        ("code", a.code.code.clone()),
        ("t", a.t.to_string()),
        ("supports", text.clone()),
        ("budget", format!("{:?}", a.budget)),
        ("max-iters", a.max_iters.to_string()),
    ];
    let head = header(None, &cfg);
    let mut set_text = format!("# {head}\n# achieved weight {}", report.achieved);
    if report.budget_limited {
        set_text.push_str(" (on a budget-limited pattern subset)");
    }
    let _ = writeln!(set_text, "\nname genset-t{}", a.t);
    for f in &report.trace.chosen {
        let _ = writeln!(set_text, "f {f}");
    }
    emit(a.out.as_deref(), &set_text)?;
    if let Some(p) = &a.trace {
        let csv = format!("# {head}\n{}", setgen::trace_csv(&report));
        emit(Some(p), &csv)?;
    }
    for st in &report.trace.steps {
        let chosen = st.chosen.map_or_else(|| "none".to_string(), |f| f.to_string());
        eprintln!("weight {}: {} failing -> chose {chosen} -> {} failing", st.weight, st.failures_before, st.failures_after);
    }
    eprintln!("chosen {} decoders, achieved weight {}", report.trace.chosen.len(), report.achieved);
    if report.achieved < a.t {
        return Err(Failure::NotAchieved(format!("target weight {} not achieved (reached {})", a.t, report.achieved)));
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    if a.max_iters == 0 {
        return Err(Failure::Config("--max-iters must be at least 1".into()));
    }
    if a.trials == 0 {
        return Err(Failure::Config("--trials must be at least 1".into()));
    }
    for &p in &a.p {
        sim::ChannelSpec::new(p)?;
    }
    let c = load_code(&a.code.code)?;
    let ensembles: Vec<Ensemble> = a.ensemble.iter().map(|e| resolve_ensemble(e)).collect::<Result<_, _>>()?;
    let early = (a.early_stop_frames > 0).then_some(a.early_stop_frames);
    let rows: Vec<SweepRow> = sim::sweep(&c, &ensembles, &a.p, a.trials, a.max_iters, a.seed, early)?;
    for r in &rows {
        if r.stats.frame_errors() > r.stats.trials() {
            return Err(Failure::Invariant("more frame errors than trials".into()));
        }
        eprintln!(
            "{:>8} p={:<8} trials={:<8} FER={:.3e} [{:.2e}, {:.2e}] avg-iters={:.2}",
            r.ensemble,
            r.p,
            r.stats.trials(),
            r.stats.fer,
            r.stats.wilson.0,
            r.stats.wilson.1,
            r.stats.avg_iterations
        );
    }
    let cfg = [
        ("cmd", "simulate".to_string()),
        ("code", a.code.code.clone()),
        ("ensemble", a.ensemble.join(",")),
        ("p", a.p.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")),
        ("trials", a.trials.to_string()),
        ("max-iters", a.max_iters.to_string()),
        ("seed", a.seed.to_string()),
        ("early-stop-frames", a.early_stop_frames.to_string()),
    ];
    let head = vec![header(Some(a.seed), &cfg)];
    let text = match a.format {
        Format::Csv => sim::sweep_csv(&rows, &head),
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "ensemble": r.ensemble,
                        "p": r.p,
                        "trials": r.stats.trials(),
                        "frameErrors": r.stats.frame_errors(),
                        "logicalErrors": r.stats.logical_errors(),
                        "FER": r.stats.fer,
                        "ciLo": r.stats.wilson.0,
                        "ciHi": r.stats.wilson.1,
                        "avgIterations": r.stats.avg_iterations,
                    })
                })
                .collect();
            json_text(serde_json::json!({ "header": head[0], "rows": items }))
        }
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.plot {
        emit(Some(p), &sim::plot_data(&rows, &head))?;
    }
    Ok(())
}
