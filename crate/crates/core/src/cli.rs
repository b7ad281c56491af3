//! Command line front end. [`run_command`] does all the work and returns the
//! exit code with the text meant for standard output and standard error, so
//! the binary is a thin wrapper and tests can call it directly.
//!
//! Exit codes: 0 success or criterion satisfied, 1 criterion not satisfied,
//! 2 usage, parse or validation error, 3 size cap exceeded.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::criteria::{self, AdjustmentVerdict, ListOptions, Witness};
use crate::error::Error;
use crate::graph::{Graph, NodeSet};
use crate::io::{self, GraphDocument};
use crate::paths::Path;
use crate::{mec, oracle, Limits};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "causal-adjust",
    version,
    about = "Covariate adjustment sets for DAGs, CPDAGs, MAGs and PAGs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Graph file in the `.cg` format
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Largest graph on which paths are enumerated
    #[arg(long, value_name = "N")]
    max_nodes: Option<usize>,
    /// Report elapsed_ms as 0 so output is byte-for-byte reproducible
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct Query {
    /// Treatment nodes, comma separated
    #[arg(short = 'X', value_name = "NODES")]
    x: Option<String>,
    /// Outcome nodes, comma separated
    #[arg(short = 'Y', value_name = "NODES")]
    y: Option<String>,
}

#[derive(Debug, Args)]
struct Adjust {
    /// Adjustment set, comma separated; `-Z ""` is the empty set
    #[arg(short = 'Z', value_name = "NODES")]
    z: Option<String>,
}

#[derive(Debug, Args)]
struct Listing {
    /// Only inclusion-minimal sets
    #[arg(long)]
    minimal: bool,
    /// Largest set size to report
    #[arg(long, value_name = "K")]
    max_size: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the graph is a valid member of its class
    Validate(#[command(flatten)] Common),
    /// Decide amenability of the graph relative to (X, Y)
    Amenable {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
    },
    /// Print the forbidden set relative to (X, Y)
    Forbidden {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
    },
    /// Test Z against the generalized adjustment criterion
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[command(flatten)]
        adjust: Adjust,
    },
    /// Test Z against the generalized back-door criterion, or list all passing sets
    Backdoor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[command(flatten)]
        adjust: Adjust,
        /// Search the whole subset lattice instead of testing one Z
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        listing: Listing,
    },
    /// List every adjustment set
    List {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[command(flatten)]
        listing: Listing,
    },
    /// Enumerate the DAGs or MAGs a CPDAG or PAG represents
    Mec(#[command(flatten)] Common),
    /// Project a DAG onto its observed nodes
    Project {
        #[command(flatten)]
        common: Common,
        /// Latent nodes, comma separated
        #[arg(long, value_name = "NODES")]
        latent: String,
    },
    /// Compare true effects with adjusted estimates in random linear models
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[command(flatten)]
        adjust: Adjust,
        /// Random models per member DAG
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Amenable { .. } => "amenable",
            Command::Forbidden { .. } => "forbidden",
            Command::Check { .. } => "check",
            Command::Backdoor { .. } => "backdoor",
            Command::List { .. } => "list",
            Command::Mec(_) => "mec",
            Command::Project { .. } => "project",
            Command::Verify { .. } => "verify",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Validate(c) | Command::Mec(c) => c,
            Command::Amenable { common, .. }
            | Command::Forbidden { common, .. }
            | Command::Check { common, .. }
            | Command::Backdoor { common, .. }
            | Command::List { common, .. }
            | Command::Project { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command; `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CommandOutput {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let start = Instant::now();
    let common = cli.command.common();
    let mut limits = Limits::default();
    if let Some(n) = common.max_nodes {
        limits.max_path_nodes = n;
    }
    match execute(&cli.command, &limits) {
        Ok(Outcome {
            graph,
            ok,
            result,
            witness,
        }) => {
            let elapsed = if common.no_timing {
                0
            } else {
                start.elapsed().as_millis() as u64
            };
            let mut out = json!({
                "format": FORMAT_VERSION,
                "command": cli.command.name(),
                "graph_class": graph.class().keyword(),
                "result": result,
                "elapsed_ms": elapsed,
            });
            if let Some(w) = witness {
                out["witness"] = w;
            }
            CommandOutput {
                code: if ok { 0 } else { 1 },
                stdout: format!("{out}\n"),
                stderr: String::new(),
            }
        }
        Err(Failure(msg, code)) => CommandOutput {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

struct Outcome {
    graph: Graph,
    ok: bool,
    result: Value,
    witness: Option<Value>,
}

struct Failure(String, i32);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::SizeCapExceeded { .. }) {
            3
        } else {
            2
        };
        Failure(e.to_string(), code)
    }
}

fn load(common: &Common, limits: &Limits) -> Result<GraphDocument, Failure> {
    let text = std::fs::read_to_string(&common.graph)
        .map_err(|e| Failure(format!("cannot read {}: {e}", common.graph.display()), 2))?;
    Ok(io::parse_graph_with_limits(&text, limits)?)
}

/// A node list from the flag if given, else from the file's query block.
fn node_set(
    doc: &GraphDocument,
    flag: Option<&String>,
    from_file: impl Fn(&io::Query) -> Option<&Vec<String>>,
    what: &str,
) -> Result<Option<NodeSet>, Failure> {
    if let Some(list) = flag {
        return Ok(Some(io::parse_node_list(&doc.graph, list)?));
    }
    match doc.query.as_ref().and_then(from_file) {
        Some(names) => Ok(Some(doc.graph.node_set(names)?)),
        None if what == "Z" => Ok(None),
        None => Err(Failure(
            format!("no {what} given: pass -{what} or add it to the query block"),
            2,
        )),
    }
}

fn xy(doc: &GraphDocument, q: &Query) -> Result<(NodeSet, NodeSet), Failure> {
    let x = node_set(doc, q.x.as_ref(), |q| q.x.as_ref(), "X")?.unwrap_or_default();
    let y = node_set(doc, q.y.as_ref(), |q| q.y.as_ref(), "Y")?.unwrap_or_default();
    Ok((x, y))
}

fn z_of(doc: &GraphDocument, a: &Adjust) -> Result<Option<NodeSet>, Failure> {
    node_set(doc, a.z.as_ref(), |q| q.z.as_ref(), "Z")
}

fn names(g: &Graph, s: NodeSet) -> Value {
    json!(g.set_names(s))
}

fn path_json(g: &Graph, p: &Path) -> Value {
    json!(p.names(g))
}

fn verdict_json(g: &Graph, v: &AdjustmentVerdict) -> (Value, Option<Value>) {
    let result = json!({
        "passed": v.passed,
        "failed_condition": v.failed_condition.map(|c| c.to_string()),
    });
    let witness = v.witness.as_ref().map(|w| match w {
        Witness::Path(p) => json!({ "path": path_json(g, p) }),
        Witness::Node(n) => json!({ "node": g.name(*n) }),
    });
    (result, witness)
}

fn set_list(g: &Graph, sets: &[NodeSet]) -> Value {
    Value::Array(sets.iter().map(|&s| names(g, s)).collect())
}

fn edge_list(g: &Graph) -> Value {
    Value::Array(g.edges().iter().map(|e| json!(g.format_edge(e))).collect())
}

fn execute(cmd: &Command, limits: &Limits) -> Result<Outcome, Failure> {
    let doc = load(cmd.common(), limits)?;
    let g = &doc.graph;
    let outcome = |ok, result, witness| Outcome {
        graph: g.clone(),
        ok,
        result,
        witness,
    };
    match cmd {
        Command::Validate(_) => Ok(outcome(
            true,
            json!({ "valid": true, "nodes": g.len(), "edges": g.edge_count() }),
            None,
        )),
        Command::Amenable { query, .. } => {
            let (x, y) = xy(&doc, query)?;
            let w = criteria::amenability_witness(g, x, y)?;
            Ok(outcome(
                w.is_none(),
                json!({ "amenable": w.is_none() }),
                w.map(|p| json!({ "path": path_json(g, &p) })),
            ))
        }
        Command::Forbidden { query, .. } => {
            let (x, y) = xy(&doc, query)?;
            let f = criteria::forbidden_set_with_limits(g, x, y, limits)?;
            Ok(outcome(
                true,
                json!({ "forbidden": names(g, f.nodes) }),
                None,
            ))
        }
        Command::Check { query, adjust, .. } => {
            let (x, y) = xy(&doc, query)?;
            let z = z_of(&doc, adjust)?.unwrap_or_default();
            let v = criteria::satisfies_gac_with_limits(g, x, y, z, limits)?;
            let (result, witness) = verdict_json(g, &v);
            Ok(outcome(v.passed, result, witness))
        }
        Command::Backdoor {
            query,
            adjust,
            all,
            listing,
            ..
        } => {
            let (x, y) = xy(&doc, query)?;
            match (z_of(&doc, adjust)?, all) {
                (Some(z), false) => {
                    let v =
                        criteria::satisfies_generalized_backdoor_with_limits(g, x, y, z, limits)?;
                    let (result, witness) = verdict_json(g, &v);
                    Ok(outcome(v.passed, result, witness))
                }
                _ => {
                    let opts = ListOptions {
                        minimal_only: listing.minimal,
                        max_size: listing.max_size,
                    };
                    let sets = criteria::list_backdoor_sets_with_limits(g, x, y, opts, limits)?;
                    Ok(outcome(true, set_list(g, &sets), None))
                }
            }
        }
        Command::List { query, listing, .. } => {
            let (x, y) = xy(&doc, query)?;
            let opts = ListOptions {
                minimal_only: listing.minimal,
                max_size: listing.max_size,
            };
            let sets = criteria::list_adjustment_sets_with_limits(g, x, y, opts, limits)?;
            Ok(outcome(true, set_list(g, &sets), None))
        }
        Command::Mec(_) => {
            let members = match g.class() {
                crate::GraphClass::Cpdag => mec::enumerate_dags_with_limits(g, limits)?.members,
                crate::GraphClass::Pag => mec::enumerate_mags_with_limits(g, limits)?.members,
                _ => vec![g.clone()],
            };
            let listed: Vec<Value> = members.iter().map(edge_list).collect();
            Ok(outcome(
                true,
                json!({ "size": members.len(), "members": listed }),
                None,
            ))
        }
        Command::Project { latent, .. } => {
            let hidden = io::parse_node_list(g, latent)?;
            let mag = mec::latent_project_with_limits(g, g.all_nodes() - hidden, limits)?;
            let text = io::serialize(&GraphDocument {
                graph: mag.clone(),
                query: None,
            });
            Ok(outcome(
                true,
                json!({ "nodes": mag.names(), "edges": edge_list(&mag), "graph": text }),
                None,
            ))
        }
        Command::Verify {
            query,
            adjust,
            trials,
            seed,
            ..
        } => {
            let (x, y) = xy(&doc, query)?;
            let z = z_of(&doc, adjust)?.unwrap_or_default();
            let gac = criteria::satisfies_gac_with_limits(g, x, y, z, limits)?;
            let mut per_outcome = Vec::new();
            let mut worst = 0.0f64;
            let mut members = 0;
            for target in y {
                let reports =
                    oracle::verify_adjustment_with_limits(g, x, target, z, *trials, *seed, limits)?;
                let gap = reports.iter().map(|r| r.max_abs_gap).fold(0.0, f64::max);
                members = reports.iter().map(|r| r.member + 1).max().unwrap_or(0);
                worst = worst.max(gap);
                per_outcome.push(
                    json!({ "y": g.name(target), "max_abs_gap": gap, "reports": reports.len() }),
                );
            }
            Ok(outcome(
                true,
                json!({
                    "gac_passed": gac.passed,
                    "members": members,
                    "trials": trials,
                    "max_abs_gap": worst,
                    "outcomes": per_outcome,
                }),
                None,
            ))
        }
    }
}
