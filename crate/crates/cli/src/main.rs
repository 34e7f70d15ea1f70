//! `kweb` — invariants of graph algebras from directed multigraph files.
//!
//! Exit codes: 0 success, 1 mathematically distinguished (Distinguished or
//! AmplifiedNonIsomorphic verdicts, non-isomorphic classification), 2 input
//! errors, 3 strictness or bound errors, 70 internal invariant failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kweb_core::classify::are_lpa_isomorphic_amplified;
use kweb_core::moves;
use kweb_core::{
    build_kweb, compare_kwebs, enumerate_lattice, CompareOptions, Config, Error, Graph, Verdict,
};

const DEFAULT_CANONICAL_BOUND: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Dot,
    Text,
}

#[derive(Parser)]
#[command(
    name = "kweb",
    about = "Ideal-related K-theory invariants of graph algebras",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Upgrade the Condition (K) and convention warnings to errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Output format; defaults to text for validate/move and json elsewhere.
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// Override the size bound of the command (vertex count).
    #[arg(long, global = true)]
    bound: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph file and report its basic structure.
    Validate { file: PathBuf },
    /// Emit the lattice of saturated hereditary vertex sets.
    Lattice { file: PathBuf },
    /// Emit the full ideal-related K-theory invariant.
    Kweb { file: PathBuf },
    /// Compare the invariants of two graphs.
    Compare {
        file1: PathBuf,
        file2: PathBuf,
        /// Additionally require an isomorphism matching the unit classes.
        #[arg(long)]
        unit: bool,
    },
    /// Apply a graph move and emit the resulting graph.
    ///
    /// Moves: amplify, transitive-closure, amplified-transitive-closure,
    /// move-t <v0,v1,...,vk>, remove-source <v>.
    #[command(name = "move")]
    Move {
        file: PathBuf,
        name: String,
        args: Vec<String>,
    },
    /// Decide isomorphism of the Leavitt path algebras of the amplifications.
    #[command(name = "classify-amplified")]
    ClassifyAmplified { file1: PathBuf, file2: PathBuf },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::NoSuchVertex(_)
        | Error::NotHereditary
        | Error::InvalidKey(_)
        | Error::IllDefinedHom
        | Error::HomMismatch(_)
        | Error::MoveHypothesis(_)
        | Error::NotASource(_) => 2,
        Error::BoundExceeded { .. }
        | Error::ConditionK
        | Error::ConventionViolation { .. }
        | Error::IsoSearchBudget => 3,
        Error::Internal(_) => 70,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: exit_code_for(&err),
            message: err.to_string(),
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(Graph::parse(&text)?)
}

fn unsupported_output(what: &str) -> Failure {
    Failure {
        code: 2,
        message: format!("--output {what} is not supported for this command"),
    }
}

fn config_with(cli: &Cli) -> Config {
    let mut cfg = Config::from_env();
    cfg.strict_condition_k = cli.strict;
    if let Some(b) = cli.bound {
        cfg.max_vertices = b;
        cfg.lattice_enum_bound = b;
    }
    cfg
}

fn cmd_validate(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let g = read_graph(file)?;
    let condition_k = g.satisfies_condition_k();
    if cli.strict && !condition_k {
        return Err(Failure {
            code: 3,
            message: "graph fails Condition (K) and strict mode is enabled".into(),
        });
    }
    let names = |vs: Vec<usize>| -> Vec<String> {
        vs.into_iter().map(|v| g.label(v).to_string()).collect()
    };
    match cli.output.unwrap_or(Output::Text) {
        Output::Dot => print!("{}", g.to_dot()),
        Output::Json => {
            let report = json!({
                "vertices": g.n(),
                "edges": g.edge_count().to_string(),
                "sinks": names(g.sinks()),
                "infiniteEmitters": names(g.infinite_emitters()),
                "rowFinite": g.is_row_finite(),
                "amplified": g.is_amplified(),
                "conditionK": condition_k,
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Output::Text => {
            let fmt = |vs: Vec<usize>| -> String {
                if vs.is_empty() {
                    "(none)".to_string()
                } else {
                    names(vs).join(" ")
                }
            };
            println!("vertices: {}", g.n());
            println!("edges: {}", g.edge_count());
            println!("sinks: {}", fmt(g.sinks()));
            println!("infinite emitters: {}", fmt(g.infinite_emitters()));
            println!(
                "row-finite: {}",
                if g.is_row_finite() { "yes" } else { "no" }
            );
            println!("amplified: {}", if g.is_amplified() { "yes" } else { "no" });
            println!("condition (K): {}", if condition_k { "yes" } else { "no" });
        }
    }
    Ok(())
}

fn cmd_lattice(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let g = read_graph(file)?;
    let cfg = config_with(cli);
    let lattice = enumerate_lattice(&g, cfg.lattice_enum_bound)?;
    if cli.strict && !lattice.condition_k() {
        return Err(Error::ConditionK.into());
    }
    match cli.output.unwrap_or(Output::Json) {
        Output::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&lattice.to_json(&g)).unwrap()
            );
        }
        Output::Text => {
            println!("elements: {}", lattice.len());
            for (i, e) in lattice.elements().iter().enumerate() {
                let mut labels: Vec<&str> = e.iter().map(|v| g.label(v)).collect();
                labels.sort_unstable();
                println!("  [{i}] {{{}}}", labels.join(","));
            }
            println!(
                "condition (K): {}",
                if lattice.condition_k() { "yes" } else { "no" }
            );
        }
        Output::Dot => return Err(unsupported_output("dot")),
    }
    Ok(())
}

fn cmd_kweb(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let g = read_graph(file)?;
    let cfg = config_with(cli);
    let web = build_kweb(&g, &cfg)?;
    match cli.output.unwrap_or(Output::Json) {
        Output::Json => {
            println!("{}", serde_json::to_string_pretty(&web.to_json()).unwrap());
        }
        Output::Text => {
            let v = web.to_json();
            println!("lattice elements: {}", web.lattice().len());
            for (key, entry) in v["groups"].as_object().unwrap() {
                println!(
                    "  {key}: free_rank {} torsion {:?}",
                    entry["free_rank"],
                    entry["torsion"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|t| t.as_str().unwrap().to_string())
                        .collect::<Vec<_>>()
                );
            }
        }
        Output::Dot => return Err(unsupported_output("dot")),
    }
    Ok(())
}

fn cmd_compare(cli: &Cli, file1: &Path, file2: &Path, unit: bool) -> Result<u8, Failure> {
    let g1 = read_graph(file1)?;
    let g2 = read_graph(file2)?;
    let cfg = config_with(cli);
    let w1 = build_kweb(&g1, &cfg)?;
    let w2 = build_kweb(&g2, &cfg)?;
    let opts = CompareOptions {
        require_unit: unit,
        iso_search_bound: cfg.iso_search_bound,
        classify_bound: cli.bound.unwrap_or(DEFAULT_CANONICAL_BOUND),
        force_general: false,
    };
    let verdict = compare_kwebs(&w1, &w2, &opts)?;
    match cli.output.unwrap_or(Output::Json) {
        Output::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&verdict.to_json(&g1, &g2)).unwrap()
            );
        }
        Output::Text => match &verdict {
            Verdict::Distinguished { witness } => println!("Distinguished: {witness}"),
            Verdict::Consistent { unit_matched, .. } => match unit_matched {
                Some(m) => println!("Consistent (unit matched: {m})"),
                None => println!("Consistent"),
            },
            Verdict::AmplifiedIsomorphic { .. } => println!("AmplifiedIsomorphic"),
            Verdict::AmplifiedNonIsomorphic => println!("AmplifiedNonIsomorphic"),
        },
        Output::Dot => return Err(unsupported_output("dot")),
    }
    Ok(if verdict.is_negative() { 1 } else { 0 })
}

fn cmd_move(cli: &Cli, file: &Path, name: &str, args: &[String]) -> Result<(), Failure> {
    let g = read_graph(file)?;
    let bad_args = |msg: &str| Failure {
        code: 2,
        message: msg.to_string(),
    };
    let vertex = |label: &str| -> Result<usize, Failure> {
        g.index_of(label)
            .ok_or_else(|| Error::NoSuchVertex(label.to_string()).into())
    };
    let result = match name {
        "amplify" => moves::amplify(&g),
        "transitive-closure" => moves::transitive_closure_graph(&g),
        "amplified-transitive-closure" => moves::amplified_transitive_closure(&g),
        "move-t" => {
            let path_arg = args
                .first()
                .ok_or_else(|| bad_args("move-t requires a comma-separated vertex path"))?;
            let path: Vec<usize> = path_arg
                .split(',')
                .map(|s| vertex(s.trim()))
                .collect::<Result<_, _>>()?;
            moves::move_t(&g, &path)?
        }
        "remove-source" => {
            let label = args
                .first()
                .ok_or_else(|| bad_args("remove-source requires a vertex label"))?;
            moves::remove_source(&g, vertex(label)?)?
        }
        other => {
            return Err(bad_args(&format!(
                "unknown move {other}; expected amplify, transitive-closure, \
                 amplified-transitive-closure, move-t or remove-source"
            )))
        }
    };
    match cli.output.unwrap_or(Output::Text) {
        Output::Text => print!("{}", result.serialize()),
        Output::Dot => print!("{}", result.to_dot()),
        Output::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "graph": result.serialize() })).unwrap()
            );
        }
    }
    Ok(())
}

fn cmd_classify(cli: &Cli, file1: &Path, file2: &Path) -> Result<u8, Failure> {
    let g1 = read_graph(file1)?;
    let g2 = read_graph(file2)?;
    let bound = cli.bound.unwrap_or(DEFAULT_CANONICAL_BOUND);
    let decision = are_lpa_isomorphic_amplified(&g1, &g2, bound)?;
    match cli.output.unwrap_or(Output::Json) {
        Output::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&decision.to_json(&g1, &g2)).unwrap()
            );
        }
        Output::Text => {
            println!(
                "L_C(amplification) isomorphic: {}",
                if decision.isomorphic { "yes" } else { "no" }
            );
        }
        Output::Dot => return Err(unsupported_output("dot")),
    }
    Ok(if decision.isomorphic { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Validate { file } => cmd_validate(cli, file).map(|()| 0),
        Command::Lattice { file } => cmd_lattice(cli, file).map(|()| 0),
        Command::Kweb { file } => cmd_kweb(cli, file).map(|()| 0),
        Command::Compare { file1, file2, unit } => cmd_compare(cli, file1, file2, *unit),
        Command::Move { file, name, args } => cmd_move(cli, file, name, args).map(|()| 0),
        Command::ClassifyAmplified { file1, file2 } => cmd_classify(cli, file1, file2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
