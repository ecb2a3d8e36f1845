//! The `flowcob` command-line tool.
//!
//! Exit codes: 0 success, 1 domain-invalid input (a JSON report goes to
//! standard output), 2 malformed input or usage error. Output files are
//! written to a temporary file and renamed into place.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{verify_theorems, CensusError};
use crate::cobordism::{reduce, replay_states, CobordismError, Strategy};
use crate::dot::{field_graph_dot, map_dot, skeleton_dot};
use crate::field_graph::{
    derive_sink_skeleton, derive_source_skeleton, reconstruct_field_graph, validate_field_graph, FieldGraph,
    SkeletonMap, SkeletonRole,
};
use crate::io::{to_pretty_json, write_atomic, FieldGraphFile, IoError, MapFile, SkeletonFile};
use crate::periodic::{reduce_sphere_full, validate_structure, PeriodicError, StructureFile};
use crate::surface_map::{map_isomorphic, CombinatorialMap};
use crate::torus_mcg::{decompose, evaluate, Matrix2, TorusError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "flowcob", version, about = "Field graphs, skeletons and cobordisms of surface vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoleArg {
    Sink,
    Source,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Phased,
    Interleaved,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a field graph file.
    Validate { input: PathBuf },
    /// Counts, genus and face degrees of a map, field graph or skeleton file.
    Invariants { input: PathBuf },
    /// Derive the sink (default) or source skeleton of a field graph.
    Derive {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "sink")]
        role: RoleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the field graph of a skeleton.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a skeleton to one sink and one source.
    Reduce {
        input: PathBuf,
        /// Write the move trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "phased")]
        strategy: StrategyArg,
        /// Write the terminal skeleton.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual of a map or skeleton file.
    Dual {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test two maps (or skeletons, marks included) for isomorphism.
    Iso { a: PathBuf, b: PathBuf },
    /// Exhaustive census with theorem checks.
    Census {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        max_edges: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Where a failing instance is written.
        #[arg(long, default_value = ".")]
        counterexample_dir: PathBuf,
    },
    /// Decompose a torus marking "a,b;c,d" into Dehn twists.
    TorusWord {
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Reduce a sphere periodic structure.
    ReducePeriodic {
        input: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Export a map, field graph or skeleton file as DOT.
    Dot {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A command's result: what to print, and the exit code.
struct Outcome {
    code: i32,
    stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout }
    }

    fn json<T: Serialize>(code: i32, value: &T) -> Self {
        Outcome { code, stdout: to_pretty_json(value) }
    }
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Invalid(Value),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

fn invalid(kind: &str, detail: impl ToString) -> Failure {
    Failure::Invalid(json!({"valid": false, "error": kind, "detail": detail.to_string()}))
}

/// What a JSON input file holds, by its keys.
enum Input {
    Map(CombinatorialMap),
    Field(FieldGraph),
    Skeleton(SkeletonMap),
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = crate::io::read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn load_any(path: &Path) -> Result<Input, Failure> {
    let v = read_json(path)?;
    let has = |k: &str| v.get(k).is_some();
    if has("kinds") {
        Ok(Input::Field(parse::<FieldGraphFile>(path, v)?.to_field_graph()?))
    } else if has("role") || has("marked_vertices") || has("marked_faces") {
        Ok(Input::Skeleton(parse::<SkeletonFile>(path, v)?.to_skeleton()?))
    } else {
        Ok(Input::Map(parse::<MapFile>(path, v)?.to_map()?))
    }
}

fn load_field(path: &Path) -> Result<FieldGraph, Failure> {
    Ok(parse::<FieldGraphFile>(path, read_json(path)?)?.to_field_graph()?)
}

/// Skeleton files; a bare map file is read as an unmarked sink skeleton.
fn load_skeleton(path: &Path) -> Result<SkeletonMap, Failure> {
    match load_any(path)? {
        Input::Skeleton(s) => Ok(s),
        Input::Map(m) => Ok(SkeletonMap::sink(m)),
        Input::Field(_) => Err(Failure::Malformed(format!("{}: expected a skeleton, got a field graph", path.display()))),
    }
}

fn emit(out: &Option<PathBuf>, body: String) -> Result<Outcome, Failure> {
    match out {
        Some(p) => {
            write_atomic(p, body.as_bytes())?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(body)),
    }
}

fn map_invariants(m: &CombinatorialMap) -> Value {
    let mut degrees: Vec<usize> = m.faces().iter().map(Vec::len).collect();
    degrees.sort_unstable();
    json!({
        "V": m.num_vertices(),
        "E": m.num_edges(),
        "F": m.num_faces(),
        "euler_characteristic": m.euler_characteristic(),
        "genus": m.genus(),
        "face_degrees": degrees,
    })
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate { input } => {
            let report = validate_field_graph(&load_field(input)?);
            let code = if report.valid { EXIT_OK } else { EXIT_INVALID };
            Ok(Outcome::json(code, &report))
        }
        Command::Invariants { input } => {
            let v = match load_any(input)? {
                Input::Map(m) => map_invariants(&m),
                Input::Skeleton(s) => {
                    let mut v = map_invariants(&s.map);
                    v["marked_vertices"] = json!(s.marked_vertices);
                    v["marked_faces"] = json!(s.marked_faces);
                    v
                }
                Input::Field(fg) => {
                    let mut v = map_invariants(fg.map());
                    let c = fg.counts();
                    v["U"] = json!(c.sources);
                    v["I"] = json!(c.sinks);
                    v["A"] = json!(c.saddles);
                    v["poincare_hopf_residual"] = json!(crate::field_graph::poincare_hopf_residual(&fg));
                    v
                }
            };
            Ok(Outcome::json(EXIT_OK, &v))
        }
        Command::Derive { input, role, out } => {
            let fg = load_field(input)?;
            let derived = match role {
                RoleArg::Sink => derive_sink_skeleton(&fg),
                RoleArg::Source => derive_source_skeleton(&fg),
            }
            .map_err(|e| invalid("derive", e))?;
            emit(out, to_pretty_json(&SkeletonFile::from(&derived.skeleton)))
        }
        Command::Reconstruct { input, out } => {
            let s = load_skeleton(input)?;
            let fg = reconstruct_field_graph(&s).map_err(|e| invalid("reconstruct", e))?;
            emit(out, to_pretty_json(&FieldGraphFile::from(&fg)))
        }
        Command::Reduce { input, trace, strategy, out } => {
            let s = load_skeleton(input)?;
            if s.role != SkeletonRole::SinkSkeleton {
                return Err(invalid("reduce", CobordismError::WrongRole));
            }
            let strategy = match strategy {
                StrategyArg::Phased => Strategy::Phased,
                StrategyArg::Interleaved => Strategy::Interleaved,
            };
            let t = reduce(&s, strategy).map_err(|e| invalid("reduce", e))?;
            let states = replay_states(&s, &t).map_err(|e| invalid("reduce", e))?;
            let terminal = states.last().expect("non-empty");
            if let Some(p) = trace {
                write_atomic(p, t.to_jsonl().as_bytes())?;
            }
            if let Some(p) = out {
                write_atomic(p, to_pretty_json(&SkeletonFile::from(terminal)).as_bytes())?;
            }
            Ok(Outcome::json(
                EXIT_OK,
                &json!({
                    "steps": t.len(),
                    "expected_steps": s.map.num_vertices() + s.map.num_faces() - 2,
                    "genus": s.map.genus(),
                    "terminal": map_invariants(&terminal.map),
                }),
            ))
        }
        Command::Dual { input, out } => {
            let body = match load_any(input)? {
                Input::Map(m) => to_pretty_json(&MapFile::from(&m.dual())),
                Input::Skeleton(s) => {
                    let role = match s.role {
                        SkeletonRole::SinkSkeleton => SkeletonRole::SourceSkeleton,
                        SkeletonRole::SourceSkeleton => SkeletonRole::SinkSkeleton,
                    };
                    // vertices and faces trade places, marks with them
                    let d = SkeletonMap {
                        map: s.map.dual(),
                        role,
                        marked_vertices: Default::default(),
                        marked_faces: Default::default(),
                    };
                    let vertex_of_face =
                        |f: usize| s.map.face_darts(f).first().map_or(0, |&x| d.map.vertex_of(x));
                    let face_of_vertex =
                        |v: usize| s.map.vertex_darts(v).first().map_or(0, |&x| d.map.face_of(crate::surface_map::alpha(x)));
                    let d = SkeletonMap {
                        marked_vertices: s.marked_faces.iter().map(|&f| vertex_of_face(f)).collect(),
                        marked_faces: s.marked_vertices.iter().map(|&v| face_of_vertex(v)).collect(),
                        ..d
                    };
                    to_pretty_json(&SkeletonFile::from(&d))
                }
                Input::Field(_) => return Err(Failure::Malformed("dual expects a map or skeleton file".into())),
            };
            emit(out, body)
        }
        Command::Iso { a, b } => {
            let (a, b) = (load_skeleton(a)?, load_skeleton(b)?);
            let marked = a.is_marked() || b.is_marked();
            let iso = if marked {
                if a.canonical_form() == b.canonical_form() {
                    let (ca, cb) = (a.dart_colors(), b.dart_colors());
                    crate::surface_map::colored_isomorphism(&a.map, &b.map, Some((&ca, &cb)))
                        .or_else(|| (a.map.num_darts() == 0).then(|| crate::surface_map::DartBijection { mapping: vec![] }))
                } else {
                    None
                }
            } else {
                map_isomorphic(&a.map, &b.map)
            };
            Ok(Outcome::json(
                EXIT_OK,
                &json!({"isomorphic": iso.is_some(), "mapping": iso.map(|i| i.mapping)}),
            ))
        }
        Command::Census { genus, max_edges, out, jobs, counterexample_dir } => {
            let run = || verify_theorems(*genus, *max_edges, counterexample_dir);
            let result = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads((*n).max(1))
                    .build()
                    .map_err(|e| Failure::Malformed(e.to_string()))?
                    .install(run),
                None => run(),
            };
            match result {
                Ok(report) => emit(out, to_pretty_json(&report)),
                Err(e @ CensusError::BudgetExceeded { .. }) => Err(Failure::Malformed(e.to_string())),
                Err(e) => Err(invalid("census", e)),
            }
        }
        Command::TorusWord { target } => {
            let m: Matrix2 = target.parse().map_err(|e: TorusError| Failure::Malformed(e.to_string()))?;
            let word = decompose(&m).map_err(|e| invalid("torus-word", e))?;
            let product = evaluate(&word).map_err(|e| invalid("torus-word", e))?;
            Ok(Outcome::json(
                EXIT_OK,
                &json!({
                    "target": m,
                    "word": word.to_string(),
                    "letters": word,
                    "length": word.len(),
                    "product": product,
                    "verified": product == m,
                }),
            ))
        }
        Command::ReducePeriodic { input, trace } => {
            let p = parse::<StructureFile>(input, read_json(input)?)?.to_structure()?;
            let report = validate_structure(&p);
            if !report.valid {
                return Ok(Outcome::json(EXIT_INVALID, &report));
            }
            let r = reduce_sphere_full(&p).map_err(|e| match e {
                PeriodicError::Invalid(report) => Failure::Invalid(serde_json::to_value(report).expect("serializes")),
                other => invalid("reduce-periodic", other),
            })?;
            if let Some(path) = trace {
                write_atomic(path, r.trace.to_jsonl().as_bytes())?;
            }
            Ok(Outcome::json(
                EXIT_OK,
                &json!({"orbits": p.orbits.len(), "swallows": r.swallows, "steps": r.trace.len()}),
            ))
        }
        Command::Dot { input, out } => {
            let body = match load_any(input)? {
                Input::Map(m) => map_dot(&m),
                Input::Field(fg) => field_graph_dot(&fg),
                Input::Skeleton(s) => skeleton_dot(&s),
            };
            emit(out, body)
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("FLOWCOB_COLOR").map_or(true, |v| v != "0") && std::io::stderr().is_terminal()
}

fn status_line(code: i32, msg: &str) -> String {
    let (tag, ansi) = match code {
        EXIT_OK => ("ok", "32"),
        EXIT_INVALID => ("invalid", "33"),
        _ => ("error", "31"),
    };
    if color_enabled() {
        format!("\x1b[{ansi}m{tag}\x1b[0m {msg}")
    } else {
        format!("{tag} {msg}")
    }
}

/// Runs a parsed command, writing results to `stdout` and diagnostics to
/// `stderr`. Returns the exit code.
pub fn run_with(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (code, body) = match execute(&cli.command) {
        Ok(o) => (o.code, o.stdout),
        Err(Failure::Invalid(v)) => (EXIT_INVALID, to_pretty_json(&v)),
        Err(Failure::Malformed(msg)) => {
            let _ = writeln!(stderr, "{}", status_line(EXIT_MALFORMED, &msg));
            return EXIT_MALFORMED;
        }
    };
    let _ = stdout.write_all(body.as_bytes());
    if code != EXIT_OK {
        let _ = writeln!(stderr, "{}", status_line(code, "input is not valid"));
    }
    code
}

/// Entry point for the binary: parses `args` and runs.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    run_with(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("flowcob").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    fn write(dir: &Path, name: &str, v: &impl Serialize) -> String {
        let p = dir.join(name);
        std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
        p.display().to_string()
    }

    #[test]
    fn torus_word_accepts_negative_entries() {
        let (code, out) = run_capture(&["torus-word", "--target", "0,1;-1,0"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verified"], json!(true));
        assert_eq!(run_capture(&["torus-word", "--target", "2,0;0,1"]).0, EXIT_INVALID);
        assert_eq!(run_capture(&["torus-word", "--target", "nope"]).0, EXIT_MALFORMED);
    }

    #[test]
    fn malformed_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, "{ not json").unwrap();
        assert_eq!(run_capture(&["validate", p.to_str().unwrap()]).0, EXIT_MALFORMED);
        assert_eq!(run_capture(&["validate", "/nonexistent/x.json"]).0, EXIT_MALFORMED);
        let m = write(dir.path(), "m.json", &json!({"n_darts": 2, "alpha": [0, 1], "sigma": [0, 1]}));
        assert_eq!(run_capture(&["invariants", &m]).0, EXIT_MALFORMED);
    }

    #[test]
    fn dual_of_marked_skeleton_swaps_marks() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(
            dir.path(),
            "s.json",
            &json!({"n_darts": 2, "alpha": [1, 0], "sigma": [1, 0], "marked_faces": [1]}),
        );
        let (code, out) = run_capture(&["dual", &f]);
        assert_eq!(code, EXIT_OK);
        let s = serde_json::from_str::<SkeletonFile>(&out).unwrap().to_skeleton().unwrap();
        assert_eq!(s.role, SkeletonRole::SourceSkeleton);
        assert_eq!(s.marked_vertices.len(), 1);
        assert!(s.marked_faces.is_empty());
    }
}
