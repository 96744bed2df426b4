use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use bcidx_core::format::{parse_goal_file, parse_proof_file, parse_terms_file, render_proof_file, Decls};
use bcidx_core::length::length_of;
use bcidx_core::proof::{check_proof, eliminate_restr, ProofVerdict};
use bcidx_core::rewrite::normalize;
use bcidx_core::search::{candidate_pool, search_with_hints, SearchBudget, SearchError, SearchStats};
use bcidx_core::term::order::CanonicalOrder;
use bcidx_core::term::sexp::parse_all;
use bcidx_core::term::term_from_sexp;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bcidx", version, about = "Check and search proofs in the indistinguishability logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Order on if-free conditionals, one term per line, smallest first.
    #[arg(long, global = true, value_name = "FILE")]
    order: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of every term in a terms file.
    Normalize { file: PathBuf },
    /// Check a proof file.
    Check { file: PathBuf },
    /// Search for a proof of a goal file.
    Search {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_depth: usize,
        #[arg(long, default_value_t = 4096)]
        max_candidates: usize,
        /// Seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        /// Case studies allowed on one branch; defaults to |B| + 1.
        #[arg(long)]
        max_nested_cs: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Extra case-study conditionals, over the goal's declarations.
        #[arg(long, value_name = "FILE")]
        hints: Option<PathBuf>,
        /// Write the proof here instead of standard output.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Remove every Restr node from a proof.
    RestrElim {
        file: PathBuf,
        #[arg(short, value_name = "FILE")]
        o: Option<PathBuf>,
    },
    /// Print the candidate set of a goal, one term per line.
    Candidates {
        file: PathBuf,
        #[arg(long, default_value_t = 4096)]
        max_candidates: usize,
    },
    /// Print the length of every term in a terms file.
    Length { file: PathBuf },
}

/// Input errors map to exit code 2.
struct Malformed(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Malformed {
    fn from(e: E) -> Self {
        Malformed(e.into())
    }
}

enum Outcome {
    Ok,
    Rejected,
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn write_out(target: Option<&Path>, content: &str) -> Result<()> {
    match target {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn order(common: &Common, d: &Decls) -> Result<CanonicalOrder> {
    match &common.order {
        Some(p) => Ok(CanonicalOrder::from_order_file(&read(p)?, &d.sig).with_context(|| format!("{}", p.display()))?),
        None => Ok(CanonicalOrder::default()),
    }
}

fn emit_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
}

fn parsed<T>(p: &Path, r: Result<T, impl std::error::Error + Send + Sync + 'static>) -> Result<T> {
    r.with_context(|| format!("{}", p.display()))
}

fn not_found(kind: &str, stats: &SearchStats, json: bool) -> Result<Outcome, Malformed> {
    if json {
        emit_json(json!({ "result": kind, "explored": stats.nodes, "depth": stats.depth, "candidates": stats.candidates }));
    } else {
        println!("{kind}: {} nodes explored, depth {}", stats.nodes, stats.depth);
    }
    Ok(Outcome::Rejected)
}

fn run(cli: Cli) -> Result<Outcome, Malformed> {
    let common = &cli.common;
    let json = common.format == Format::Json;
    match &cli.command {
        Command::Normalize { file } => {
            let (d, terms) = parsed(file, parse_terms_file(&read(file)?))?;
            let o = order(common, &d)?;
            let nfs = terms.iter().map(|t| normalize(t, &o).map(|n| n.to_string())).collect::<Result<Vec<_>, _>>()?;
            if json {
                emit_json(json!({ "normal_forms": nfs }));
            } else {
                for n in nfs {
                    println!("{n}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Check { file } => {
            let (d, der) = parsed(file, parse_proof_file(&read(file)?))?;
            let o = order(common, &d)?;
            let verdict = check_proof(&der, &o, &d.lengths);
            match &verdict {
                ProofVerdict::Accept if json => emit_json(json!({ "verdict": "accept" })),
                ProofVerdict::Accept => println!("accept"),
                ProofVerdict::Reject { path, rule, error } if json => emit_json(json!({
                    "verdict": "reject",
                    "path": path,
                    "rule": rule,
                    "failure": error.kind.name(),
                    "message": error.message,
                })),
                ProofVerdict::Reject { path, rule, error } => println!("reject at {path:?} ({rule}): {error}"),
            }
            Ok(if verdict.is_accept() { Outcome::Ok } else { Outcome::Rejected })
        }
        Command::Search { file, max_depth, max_candidates, timeout, max_nested_cs, jobs, hints, emit } => {
            let (d, goal) = parsed(file, parse_goal_file(&read(file)?))?;
            let o = order(common, &d)?;
            let hints = match hints {
                Some(h) => {
                    let forms = parsed(h, parse_all(&read(h)?))?;
                    parsed(h, forms.iter().map(|s| term_from_sexp(s, &d.sig)).collect::<Result<Vec<_>, _>>())?
                }
                None => Vec::new(),
            };
            let budget = SearchBudget {
                max_depth: *max_depth,
                max_candidates: *max_candidates,
                timeout: Duration::from_secs(*timeout),
                max_nested_cs: *max_nested_cs,
                jobs: (*jobs).max(1),
            };
            match search_with_hints(&goal, &budget, &o, &d.lengths, &hints) {
                Ok(r) => {
                    let text = render_proof_file(&d, &r.proof);
                    if json {
                        let mut v = json!({
                            "result": "found",
                            "height": r.proof.height(),
                            "nodes": r.proof.node_count(),
                            "explored": r.stats.nodes,
                            "depth": r.stats.depth,
                            "candidates": r.stats.candidates,
                        });
                        match emit {
                            Some(p) => write_out(Some(p), &text)?,
                            None => v["proof"] = Value::String(text),
                        }
                        emit_json(v);
                    } else {
                        write_out(emit.as_deref(), &text)?;
                        if emit.is_some() {
                            println!("found: height {}, {} nodes", r.proof.height(), r.proof.node_count());
                        }
                    }
                    Ok(Outcome::Ok)
                }
                Err(SearchError::NotFound(stats)) => not_found("not-found", &stats, json),
                Err(SearchError::Timeout(stats)) => not_found("timeout", &stats, json),
                Err(e) => Err(e.into()),
            }
        }
        Command::RestrElim { file, o } => {
            let (d, der) = parsed(file, parse_proof_file(&read(file)?))?;
            let out = eliminate_restr(&der).with_context(|| format!("{}", file.display()))?;
            write_out(o.as_deref(), &render_proof_file(&d, &out))?;
            Ok(Outcome::Ok)
        }
        Command::Candidates { file, max_candidates } => {
            let (d, goal) = parsed(file, parse_goal_file(&read(file)?))?;
            let o = order(common, &d)?;
            let b = candidate_pool(&goal, &o, *max_candidates)?;
            let terms: Vec<String> = b.terms.iter().map(|t| t.to_string()).collect();
            if json {
                emit_json(json!({ "candidates": terms }));
            } else {
                for t in terms {
                    println!("{t}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Length { file } => {
            let (d, terms) = parsed(file, parse_terms_file(&read(file)?))?;
            let ls: Vec<Option<String>> = terms.iter().map(|t| length_of(t, &d.lengths).map(|l| l.to_string())).collect();
            if json {
                emit_json(json!({ "lengths": ls }));
            } else {
                for l in ls {
                    println!("{}", l.as_deref().unwrap_or("undefined"));
                }
            }
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Err(Malformed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
