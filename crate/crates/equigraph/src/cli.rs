//! Document formats and the command-line surface behind the `equigraph`
//! binary.
//!
//! Everything on disk is UTF-8 JSON text with explicit `k` (torus rank) and
//! `n` (half the dimension); neither is ever inferred from the data, because
//! the dimension decides which reduction engine is legal. Three document
//! kinds:
//!
//! * graph documents `{k, n, vertices: [{id, sign}], edges: [{u, v, label}]}`
//!   with signs written `1`/`-1` and labels as length-`k` integer arrays;
//! * collection documents `{k, n, points: [{sign, weights}]}` — weights may
//!   be written non-canonically and are canonicalized on load;
//! * trace documents `{"input-hash", steps, snapshots, …}` as written by
//!   `reduce`; `input-hash` is the hex SHA-256 of the input document's bytes,
//!   so a trace can be matched to the exact file it reduced.
//!
//! Subcommands: `gen` (catalog models, graph or collection form), `verify`
//! (validator report), `reduce` (`--dim 4` on graphs, `--dim 6
//! --level graph|data`), `dot` (Graphviz export), and `roundtrip` (seeded
//! generate→reduce cycles fanned out over threads, merged in seed order).
//! `roundtrip` takes its base seed from `--seed`, falling back to the
//! `EQUIGRAPH_SEED` environment variable, then to 0.
//!
//! Exit codes: 0 success; 2 validation failure; 3 input not reducible / not
//! realizable; 4 I/O, syntax, schema, or usage error.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{canonical_weight, WeightVec};
use crate::fpdata::{screen, FixedPointCollection};
use crate::models::{model_graph, ModelId};
use crate::multigraph::{validate_graph, SignedMultigraph};
use crate::reduce4::{generate4, reduce4, Reduce4Error, Snapshot4};
use crate::reduce6::{reduce6_data, reduce6_graph, Reduce6Error, Snapshot6};

// ---------------------------------------------------------------------------
// Errors and exit codes.

/// Everything that can go wrong on the command line, sorted by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad subcommand, or unusable parameter text.
    Usage(String),
    /// Reading or writing a file failed.
    Io { path: PathBuf, source: std::io::Error },
    /// The input is not well-formed JSON.
    Syntax {
        line: usize,
        column: usize,
        detail: String,
    },
    /// Well-formed JSON that does not satisfy the document schema. `path`
    /// locates the offending field (for example `vertices[2].sign`).
    Schema { path: String, detail: String },
    /// A validator or structural check failed; the list names the failures.
    Validation(Vec<String>),
    /// The reduction engine proved, or could not refute, that the input is
    /// not reachable by the calculus: no trace exists.
    NotReduced(String),
}

impl CliError {
    /// The process exit code this error maps to.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotReduced(_) => 3,
            CliError::Usage(_)
            | CliError::Io { .. }
            | CliError::Syntax { .. }
            | CliError::Schema { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => {
                write!(f, "{}: {source}", path.display())
            }
            CliError::Syntax {
                line,
                column,
                detail,
            } => write!(f, "syntax error at line {line} column {column}: {detail}"),
            CliError::Schema { path, detail } => {
                write!(f, "schema violation at `{path}`: {detail}")
            }
            CliError::Validation(failures) => {
                write!(f, "validation failed: {}", failures.join("; "))
            }
            CliError::NotReduced(detail) => write!(f, "{detail}"),
        }
    }
}

impl std::error::Error for CliError {}

// ---------------------------------------------------------------------------
// Documents.

/// A parsed input document: the two kinds the subcommands consume.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Document {
    Graph(SignedMultigraph),
    Collection(FixedPointCollection),
}

/// Parse one JSON document, deciding its kind by shape: a `points` field
/// means a collection, `vertices`/`edges` mean a graph.
///
/// Syntax errors report line and column; schema violations report the path
/// of the offending field. Collection weights are canonicalized on load;
/// graph labels are kept exactly as written (label orientation is data).
pub fn parse_document(text: &str) -> Result<Document, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(syntax_error)?;
    let Some(map) = value.as_object() else {
        return Err(CliError::Schema {
            path: ".".to_string(),
            detail: "a document is a JSON object".to_string(),
        });
    };
    if map.contains_key("points") {
        typed::<FixedPointCollection>(text).map(Document::Collection)
    } else if map.contains_key("vertices") || map.contains_key("edges") {
        typed::<SignedMultigraph>(text).map(Document::Graph)
    } else {
        Err(CliError::Schema {
            path: ".".to_string(),
            detail: "expected a graph document (vertices, edges) or a collection \
                     document (points)"
                .to_string(),
        })
    }
}

fn syntax_error(e: serde_json::Error) -> CliError {
    CliError::Syntax {
        line: e.line(),
        column: e.column(),
        detail: e.to_string(),
    }
}

/// Deserialize with a field path attached to any schema error. The text has
/// already passed a plain JSON parse, so remaining failures are data errors.
fn typed<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Schema {
        path: e.path().to_string(),
        detail: e.into_inner().to_string(),
    })
}

/// Serialize a document in the canonical on-disk form (pretty JSON, stable
/// field order, trailing newline). `parse_document` inverts this exactly.
#[must_use]
pub fn document_to_text(doc: &Document) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
    text.push('\n');
    text
}

/// A reduction trace tied to the exact input it reduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument<T> {
    /// Hex SHA-256 of the input document's bytes.
    #[serde(rename = "input-hash")]
    pub input_hash: String,
    #[serde(flatten)]
    pub trace: T,
}

/// Hex SHA-256 of a document's bytes, as stored in trace files.
#[must_use]
pub fn input_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(2 * digest.len());
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Serialize a trace together with the hash of the document it reduces.
#[must_use]
pub fn trace_to_text<T: Serialize>(input_text: &str, trace: &T) -> String {
    let doc = TraceDocument {
        input_hash: input_hash(input_text),
        trace,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("traces serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// DOT export.

/// Render a graph as Graphviz DOT text: one node per vertex labeled
/// `id,sign`, one undirected edge per stored edge labeled with the canonical
/// class of its weight. Vertices print in id order and edges in stored
/// order, so equal graphs render byte-identically.
#[must_use]
pub fn dot_export(g: &SignedMultigraph) -> String {
    let mut out = String::from("graph {\n");
    for (id, sign) in g.vertices() {
        out.push_str(&format!("  \"{id}\" [label=\"{id},{sign}\"];\n"));
    }
    for e in g.edges() {
        let (class, _) = canonical_weight(e.label());
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{class}\"];\n",
            e.u(),
            e.v()
        ));
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// The argument grammar.

#[derive(Parser)]
#[command(
    name = "equigraph",
    version,
    about = "Signed labeled multigraphs of torus actions: models, validators, reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog model as a document.
    ///
    /// Models: `sphere W1 [W2 …]`, `cpn A1 A2 [A3 …]`, `zn N A B C`,
    /// `z2-sharp-z2bar A E`. Each parameter is a comma-separated integer
    /// vector of length k (plain integers for k = 1); zn's first parameter
    /// is the integer N of the underlying family.
    Gen {
        /// Model name: sphere, cpn, zn, or z2-sharp-z2bar.
        model: String,
        /// Model parameters, one vector per argument. A parameter with a
        /// leading minus sign must follow a bare `--`.
        params: Vec<String>,
        /// Build the orientation-reversed model.
        #[arg(long)]
        reversed: bool,
        /// Emit the graph itself or its fixed point collection.
        #[arg(long, value_enum, default_value = "graph")]
        level: Level,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a document and print the full check report.
    Verify {
        /// Graph or collection document.
        input: PathBuf,
    },
    /// Reduce a document to the empty graph or collection, writing the trace.
    Reduce {
        /// Dimension of the calculus: 4 or 6.
        #[arg(long)]
        dim: u8,
        /// Reduce the graph structure or just its fixed point data (dim 6).
        #[arg(long, value_enum, default_value = "graph")]
        level: Level,
        /// Graph document (collection document for --dim 6 --level data).
        input: PathBuf,
        /// Trace output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one DOT file per snapshot into this directory
        /// (--dim 6 --level graph only).
        #[arg(long, value_name = "DIR")]
        emit_dot_every_step: Option<PathBuf>,
    },
    /// Export a graph document as Graphviz DOT text.
    Dot {
        /// Graph document.
        input: PathBuf,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded generate→reduce cycles and report each outcome.
    Roundtrip {
        /// Number of cycles; cycle i uses seed BASE+i.
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Base seed (default: $EQUIGRAPH_SEED, then 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Torus rank per cycle; `both` alternates 1, 2, 1, …
        #[arg(long, value_enum, default_value = "both")]
        k: KChoice,
        /// Construction steps per cycle (default varies 5..=12 with the
        /// cycle index).
        #[arg(long)]
        steps: Option<usize>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Level {
    Graph,
    Data,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

// ---------------------------------------------------------------------------
// Entry points.

/// Run one command line. Diagnostics go to stderr; `out` receives whatever
/// the subcommand prints or would write to a file when `--out` is omitted.
/// Returns the process exit code.
pub fn run_command<W: Write>(argv: &[String], out: &mut W) -> i32 {
    match run(argv, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_command`] with the error kept structured, for callers that want to
/// inspect it rather than map it to an exit code.
pub fn run<W: Write>(argv: &[String], out: &mut W) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            write_out(out, &e.to_string())?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cli.command {
        Command::Gen {
            model,
            params,
            reversed,
            level,
            out: out_path,
        } => cmd_gen(&model, &params, reversed, level, out_path.as_deref(), out),
        Command::Verify { input } => cmd_verify(&input, out),
        Command::Reduce {
            dim,
            level,
            input,
            out: out_path,
            emit_dot_every_step,
        } => cmd_reduce(
            dim,
            level,
            &input,
            out_path.as_deref(),
            emit_dot_every_step.as_deref(),
            out,
        ),
        Command::Dot { input, out: out_path } => cmd_dot(&input, out_path.as_deref(), out),
        Command::Roundtrip {
            count,
            seed,
            k,
            steps,
            jobs,
        } => cmd_roundtrip(count, seed, k, steps, jobs, out),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing.

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_out<W: Write>(out: &mut W, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Send `text` to `--out` when given, to the command's stream otherwise.
fn emit<W: Write>(out_path: Option<&Path>, out: &mut W, text: &str) -> Result<(), CliError> {
    match out_path {
        Some(path) => write_file(path, text),
        None => write_out(out, text),
    }
}

fn graph_input(doc: Document, wanted_by: &str) -> Result<SignedMultigraph, CliError> {
    match doc {
        Document::Graph(g) => Ok(g),
        Document::Collection(_) => Err(CliError::Schema {
            path: ".".to_string(),
            detail: format!("{wanted_by} needs a graph document, got a collection"),
        }),
    }
}

// ---------------------------------------------------------------------------
// gen.

fn parse_vector(text: &str) -> Result<WeightVec, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<i64>, _>>()
        .map_err(|e| CliError::Usage(format!("parameter `{text}`: {e}")))?;
    WeightVec::from_i64s(&coords)
        .map_err(|e| CliError::Usage(format!("parameter `{text}`: {e}")))
}

fn parse_scalar(text: &str) -> Result<i64, CliError> {
    text.trim()
        .parse::<i64>()
        .map_err(|e| CliError::Usage(format!("parameter `{text}`: {e}")))
}

fn build_model(model: &str, params: &[String], reversed: bool) -> Result<ModelId, CliError> {
    let arity = |wanted: &str| {
        CliError::Usage(format!(
            "model `{model}` takes {wanted}, got {} parameter(s)",
            params.len()
        ))
    };
    match model {
        "sphere" => {
            if params.is_empty() {
                return Err(arity("at least one label"));
            }
            let weights = params.iter().map(|p| parse_vector(p)).collect::<Result<_, _>>()?;
            Ok(ModelId::Sphere { weights, reversed })
        }
        "cpn" => {
            if params.is_empty() {
                return Err(arity("at least one weight"));
            }
            let a = params.iter().map(|p| parse_vector(p)).collect::<Result<_, _>>()?;
            Ok(ModelId::CPn { a, reversed })
        }
        "zn" => {
            if params.len() != 4 {
                return Err(arity("N and three weights"));
            }
            Ok(ModelId::Zn {
                n: parse_scalar(&params[0])?,
                a: parse_vector(&params[1])?,
                b: parse_vector(&params[2])?,
                c: parse_vector(&params[3])?,
                reversed,
            })
        }
        "z2-sharp-z2bar" => {
            if params.len() != 2 {
                return Err(arity("two weights"));
            }
            Ok(ModelId::Z2SharpZ2Bar {
                a: parse_vector(&params[0])?,
                e: parse_vector(&params[1])?,
                reversed,
            })
        }
        other => Err(CliError::Usage(format!(
            "unknown model `{other}`; expected sphere, cpn, zn, or z2-sharp-z2bar"
        ))),
    }
}

fn cmd_gen<W: Write>(
    model: &str,
    params: &[String],
    reversed: bool,
    level: Level,
    out_path: Option<&Path>,
    out: &mut W,
) -> Result<(), CliError> {
    let id = build_model(model, params, reversed)?;
    let graph = model_graph(&id).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let doc = match level {
        Level::Graph => Document::Graph(graph),
        Level::Data => Document::Collection(
            graph
                .collection()
                .map_err(|e| CliError::Validation(vec![e.to_string()]))?,
        ),
    };
    emit(out_path, out, &document_to_text(&doc))
}

// ---------------------------------------------------------------------------
// verify.

fn cmd_verify<W: Write>(input: &Path, out: &mut W) -> Result<(), CliError> {
    let doc = parse_document(&read_input(input)?)?;
    let mut failures: Vec<String> = Vec::new();
    let mut report = String::new();
    let screening = match &doc {
        Document::Graph(g) => {
            let graph_report = validate_graph(g, false);
            if graph_report.violations.is_empty() {
                report.push_str("structure: ok\n");
            } else {
                for v in &graph_report.violations {
                    report.push_str(&format!("structure: fail — {v}\n"));
                }
                failures.push("structure".to_string());
            }
            graph_report.screening
        }
        Document::Collection(c) => Some(screen(c)),
    };
    if let Some(screening) = screening {
        for v in &screening.verdicts {
            let state = if v.pass { "ok" } else { "fail" };
            report.push_str(&format!("{}: {state} — {}\n", v.check, v.reason));
            if !v.pass {
                failures.push(v.check.to_string());
            }
        }
    }
    let pass = failures.is_empty();
    report.push_str(if pass { "verdict: pass\n" } else { "verdict: fail\n" });
    write_out(out, &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Validation(failures))
    }
}

// ---------------------------------------------------------------------------
// reduce.

fn reduce4_error(e: Reduce4Error) -> CliError {
    match e {
        Reduce4Error::NotDescribable(_) => CliError::NotReduced(e.to_string()),
        _ => CliError::Validation(vec![e.to_string()]),
    }
}

fn reduce6_error(e: Reduce6Error) -> CliError {
    match e {
        Reduce6Error::NotRealizable(_) => CliError::NotReduced(e.to_string()),
        _ => CliError::Validation(vec![e.to_string()]),
    }
}

fn cmd_reduce<W: Write>(
    dim: u8,
    level: Level,
    input: &Path,
    out_path: Option<&Path>,
    dot_dir: Option<&Path>,
    out: &mut W,
) -> Result<(), CliError> {
    if dot_dir.is_some() && (dim != 6 || level != Level::Graph) {
        return Err(CliError::Usage(
            "--emit-dot-every-step applies to --dim 6 --level graph only".to_string(),
        ));
    }
    let text = read_input(input)?;
    let doc = parse_document(&text)?;
    match (dim, level) {
        (4, Level::Graph) => {
            let g = graph_input(doc, "reduce --dim 4")?;
            let trace = reduce4(&g).map_err(reduce4_error)?;
            emit(out_path, out, &trace_to_text(&text, &trace))
        }
        (4, Level::Data) => Err(CliError::Usage(
            "the dimension-4 engine reduces graphs; use --level graph".to_string(),
        )),
        (6, Level::Graph) => {
            let g = graph_input(doc, "reduce --dim 6 --level graph")?;
            let trace = reduce6_graph(&g).map_err(reduce6_error)?;
            if let Some(dir) = dot_dir {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
                for (i, snap) in trace.snapshots.iter().enumerate() {
                    if let Snapshot6::Graph(h) = snap {
                        write_file(&dir.join(format!("step-{i:03}.dot")), &dot_export(h))?;
                    }
                }
            }
            emit(out_path, out, &trace_to_text(&text, &trace))
        }
        (6, Level::Data) => {
            let c = match doc {
                Document::Collection(c) => c,
                Document::Graph(_) => {
                    return Err(CliError::Schema {
                        path: ".".to_string(),
                        detail: "reduce --dim 6 --level data needs a collection document, \
                                 got a graph"
                            .to_string(),
                    })
                }
            };
            let trace = reduce6_data(&c).map_err(reduce6_error)?;
            emit(out_path, out, &trace_to_text(&text, &trace))
        }
        _ => Err(CliError::Usage(format!(
            "--dim must be 4 or 6, got {dim}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// dot.

fn cmd_dot<W: Write>(input: &Path, out_path: Option<&Path>, out: &mut W) -> Result<(), CliError> {
    let g = graph_input(parse_document(&read_input(input)?)?, "dot")?;
    emit(out_path, out, &dot_export(&g))
}

// ---------------------------------------------------------------------------
// roundtrip.

struct Cycle {
    seed: u64,
    k: usize,
    ok: bool,
    note: String,
}

fn run_cycle(index: usize, base_seed: u64, k: usize, steps: usize) -> Cycle {
    let seed = base_seed.wrapping_add(index as u64);
    let fail = |note: String| Cycle {
        seed,
        k,
        ok: false,
        note,
    };
    let (graph, _) = match generate4(k, seed, steps) {
        Ok(pair) => pair,
        Err(e) => return fail(format!("generation failed: {e}")),
    };
    let trace = match reduce4(&graph) {
        Ok(trace) => trace,
        Err(e) => return fail(format!("reduction failed: {e}")),
    };
    if trace.snapshots.last().map_or(true, |s| s.vertex_count() != 0) {
        return fail("reduction stopped short of the empty graph".to_string());
    }
    for (i, snap) in trace.snapshots.iter().enumerate() {
        let Snapshot4::Signed(h) = snap else {
            return fail(format!("snapshot {i} is not a signed graph"));
        };
        if !validate_graph(h, false).pass {
            return fail(format!("snapshot {i} fails validation"));
        }
    }
    Cycle {
        seed,
        k,
        ok: true,
        note: format!(
            "{} vertices reduced in {} steps",
            graph.vertex_count(),
            trace.steps.len()
        ),
    }
}

fn cmd_roundtrip<W: Write>(
    count: usize,
    seed: Option<u64>,
    k: KChoice,
    steps: Option<usize>,
    jobs: Option<usize>,
    out: &mut W,
) -> Result<(), CliError> {
    let base_seed = match seed {
        Some(s) => s,
        None => match std::env::var("EQUIGRAPH_SEED") {
            Ok(text) => text.parse::<u64>().map_err(|e| {
                CliError::Usage(format!("EQUIGRAPH_SEED=`{text}`: {e}"))
            })?,
            Err(_) => 0,
        },
    };
    let jobs = jobs
        .unwrap_or_else(|| {
            thread::available_parallelism().map_or(1, std::num::NonZeroUsize::get)
        })
        .clamp(1, count.max(1));
    let cycle_k = |i: usize| match k {
        KChoice::One => 1,
        KChoice::Two => 2,
        KChoice::Both => 1 + i % 2,
    };
    let cycle_steps = |i: usize| steps.unwrap_or(5 + i % 8);

    // Fan the independent cycles out by index stride; collecting per worker
    // and splicing by index keeps the report identical for any job count.
    let mut cycles: Vec<Option<Cycle>> = Vec::new();
    cycles.resize_with(count, || None);
    let batches: Vec<Vec<(usize, Cycle)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|worker| {
                scope.spawn(move || {
                    (worker..count)
                        .step_by(jobs)
                        .map(|i| (i, run_cycle(i, base_seed, cycle_k(i), cycle_steps(i))))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("roundtrip worker panicked"))
            .collect()
    });
    for batch in batches {
        for (i, cycle) in batch {
            cycles[i] = Some(cycle);
        }
    }

    let mut failures = 0usize;
    let mut report = String::new();
    for cycle in cycles.into_iter().flatten() {
        let state = if cycle.ok {
            "ok"
        } else {
            failures += 1;
            "FAIL"
        };
        report.push_str(&format!(
            "seed {} k={}: {state} — {}\n",
            cycle.seed, cycle.k, cycle.note
        ));
    }
    report.push_str(&format!("roundtrip: {count} cycles, {failures} failures\n"));
    write_out(out, &report)?;
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::NotReduced(format!(
            "{failures} of {count} roundtrip cycles failed"
        )))
    }
}
