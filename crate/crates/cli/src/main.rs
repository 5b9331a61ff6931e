//! `flowmc`: check Flow-CTL* properties of Petri nets with transits.
//!
//! Exit codes: 0 holds, 1 violated, 2 inconclusive, 3 input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use flowmc_core::engine::{check_reduction, reduce, witness_text, CheckOptions, EngineError};
use flowmc_core::frontend::{
    assumption_template, building_to_pnwt, parse_layout, property_template, Assumption,
    LayoutError, TemplateError, PROPERTY_TEMPLATES,
};
use flowmc_core::logic::{parse_flow, ParseError};
use flowmc_core::net::{parse_net_text, print_net_text, NetError, PetriNetWithTransits};
use flowmc_core::oracle::{oracle_check, OracleError, OracleVerdict};

const HEADER: &str = "format-version 1\n";

#[derive(Parser)]
#[command(name = "flowmc", version, about = "Flow-CTL* model checking for safe Petri nets with transits")]
struct Cli {
    /// Threads used to build flow automata.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a net satisfies a formula.
    Check(CheckArgs),
    /// Translate a building layout into a net.
    Encode {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a property or assumption formula from a template.
    Template {
        #[arg(long)]
        name: String,
        /// Net file, needed by the assumption templates.
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long, num_args = 0..)]
        args: Vec<String>,
    },
    /// Search all runs up to a length bound for a violation.
    Oracle {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        bound: usize,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// Write the chain Kripke structure of each flow subformula to DIR.
    #[arg(long, value_name = "DIR")]
    dump_kripke: Option<PathBuf>,
    /// Write the Büchi automaton of each flow subformula to DIR.
    #[arg(long, value_name = "DIR")]
    dump_nba: Option<PathBuf>,
    /// Write the composed inhibitor net to DIR.
    #[arg(long, value_name = "DIR")]
    dump_mcnet: Option<PathBuf>,
    /// Write the rewritten LTL formula to DIR.
    #[arg(long, value_name = "DIR")]
    dump_ltl: Option<PathBuf>,
    /// Cross-check the verdict with the bounded oracle.
    #[arg(long, value_name = "K")]
    oracle_bound: Option<usize>,
    #[arg(long, value_name = "N")]
    state_cap: Option<usize>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Net { path: PathBuf, source: NetError },
    #[error("formula: {0}")]
    Parse(#[from] ParseError),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("template: {0}")]
    Template(#[from] TemplateError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("engine and oracle disagree: {0}")]
    Disagreement(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(e) => e.exit_code() as u8,
            CliError::Disagreement(_) | CliError::Oracle(OracleError::Replay(_)) => 2,
            _ => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(dir: &Path, file: &str, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.join(file),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(file), text).map_err(io)
}

fn load_net(path: &Path) -> Result<PetriNetWithTransits, CliError> {
    parse_net_text(&read(path)?)
        .and_then(|b| b.build_transits())
        .map_err(|source| CliError::Net {
            path: path.to_path_buf(),
            source,
        })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check(a) => check(a, cli.workers),
        Command::Encode { layout, out } => {
            let enc = building_to_pnwt(&parse_layout(&read(&layout)?)?)?;
            let text = format!("{HEADER}{}{}", enc.name_table(), print_net_text(&enc.net));
            fs::write(&out, text).map_err(|source| CliError::Io { path: out, source })?;
            Ok(0)
        }
        Command::Template { name, net, args } => {
            let text = match name.as_str() {
                "interleaving_max" | "concurrency_max" | "weak_fair" | "strong_fair" => {
                    let Some(path) = net else {
                        return Err(CliError::Template(TemplateError::Unknown(format!(
                            "{name} (needs --net)"
                        ))));
                    };
                    let net = load_net(&path)?;
                    let arg = || args.first().cloned().unwrap_or_default();
                    let kind = match name.as_str() {
                        "interleaving_max" => Assumption::InterleavingMax,
                        "concurrency_max" => Assumption::ConcurrencyMax,
                        "weak_fair" => Assumption::WeakFair(arg()),
                        _ => Assumption::StrongFair(arg()),
                    };
                    assumption_template(&kind, &net)?.to_string()
                }
                _ if PROPERTY_TEMPLATES.contains(&name.as_str()) => {
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    property_template(&name, &args)?.to_string()
                }
                _ => return Err(TemplateError::Unknown(name).into()),
            };
            println!("{text}");
            Ok(0)
        }
        Command::Oracle {
            net,
            formula,
            bound,
        } => {
            let net = load_net(&net)?;
            let psi = parse_flow(&formula)?;
            match oracle_check(&net, &psi, bound)? {
                OracleVerdict::Violation(lasso) => {
                    println!("result: violated");
                    print!("{}", witness_text(&net, &lasso));
                    Ok(1)
                }
                v @ OracleVerdict::NoViolationUpTo(_) => {
                    println!("result: {v}");
                    Ok(0)
                }
            }
        }
    }
}

fn check(a: CheckArgs, workers: usize) -> Result<u8, CliError> {
    let net = load_net(&a.net)?;
    let text = match (&a.formula, &a.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let psi = parse_flow(text.trim())?;
    let mut opts = CheckOptions {
        workers: workers.max(1),
        ..CheckOptions::default()
    };
    if let Some(cap) = a.state_cap {
        opts.state_cap = cap;
    }
    let r = reduce(&net, &psi, &opts)?;
    for (i, fa) in r.automata.iter().enumerate() {
        if let Some(dir) = &a.dump_kripke {
            write(dir, &format!("kripke_{i}.txt"), &fa.kripke.dump())?;
        }
        if let Some(dir) = &a.dump_nba {
            let letters: Vec<String> = (0..fa.kripke.letters())
                .map(|l| fa.kripke.letter_name(l).to_string())
                .collect();
            write(dir, &format!("nba_{i}.txt"), &fa.nba.dump(&letters))?;
        }
    }
    if let Some(dir) = &a.dump_mcnet {
        write(dir, "mcnet.txt", &format!("{HEADER}{}", print_net_text(&r.mcnet)))?;
    }
    if let Some(dir) = &a.dump_ltl {
        let full = r.meta.macros().expand(&r.formula);
        write(dir, "ltl.txt", &format!("{HEADER}{full}\n"))?;
    }
    let v = check_reduction(&net, &r, &opts)?;
    let mut out = String::new();
    writeln!(out, "result: {}", if v.holds { "holds" } else { "violated" }).unwrap();
    if let Some(w) = &v.witness {
        out.push_str(&witness_text(&net, &w.original));
    }
    let s = &v.stats;
    writeln!(
        out,
        "stats: subnets={} mc_places={} mc_transitions={} product_states={} graph_nodes={} tableau_states={}",
        s.flow.len(),
        s.mc_places,
        s.mc_transitions,
        s.product_states,
        s.graph_nodes,
        s.tableau_states
    )
    .unwrap();
    if let Some(k) = a.oracle_bound {
        let o = oracle_check(&net, &psi, k)?;
        writeln!(out, "oracle: {o}").unwrap();
        if v.holds {
            if let OracleVerdict::Violation(l) = &o {
                print!("{out}");
                return Err(CliError::Disagreement(witness_text(&net, l)));
            }
        }
    }
    print!("{out}");
    Ok(if v.holds { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
