use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use weakgrade_cli::commands::{self, parse_ladder, CommandResult, Method, Settings};
use weakgrade_cli::docs::{read_json, GradingDoc};

/// Gradings on matrix algebras and twisted group algebras.
#[derive(Parser)]
#[command(name = "weakgrade", version)]
struct Cli {
    /// Coset budget for Todd-Coxeter enumeration.
    #[arg(long, global = true)]
    max_cosets: Option<usize>,
    /// Total node budget of the regrading search.
    #[arg(long, global = true)]
    limit_nodes: Option<u64>,
    /// Comma-separated target groups for the regrading search, e.g. `C2,C3,S3`.
    #[arg(long, global = true)]
    ladder: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Universal group presentation of a grading and its coset-enumeration verdict.
    UniversalGroup { grading: PathBuf },
    /// Regrade by a finite group and print a certificate.
    Regrade(RegradeArgs),
    /// Decide weak equivalence of two gradings.
    WeakEquiv { a: PathBuf, b: PathBuf },
    /// List the coarsenings of a grading, or build the one generated by `--glue`.
    Coarsenings {
        grading: PathBuf,
        /// Symbols to identify, as `label=label`.
        #[arg(long, value_parser = parse_glue)]
        glue: Vec<(String, String)>,
    },
    /// Elementary grading over free words encoding a presentation.
    FromPresentation {
        presentation: PathBuf,
        /// Also write the grading document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Twisted group algebras of finite abelian groups.
    #[command(subcommand)]
    Twisted(TwistedCommand),
    /// Re-check a regrading certificate.
    Verify {
        #[arg(long)]
        grading: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Args)]
struct RegradeArgs {
    #[arg(long)]
    grading: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    method: Method,
    /// Check every coarsening as well.
    #[arg(long)]
    hereditary: bool,
    /// Also write the certificate document here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TwistedCommand {
    /// Radical of the bicharacter, dimension of the center and the largest central order.
    Center { bicharacter: PathBuf },
    /// Wedderburn block sizes over an algebraically closed field.
    Blocks { bicharacter: PathBuf },
    /// Whether two cocycles on an abelian group are cohomologous.
    Cohomologous { a: PathBuf, b: PathBuf },
    /// Search for a Condition (*) witness between two `M(γ, σ)` documents.
    ConditionStar { a: PathBuf, b: PathBuf },
}

fn parse_glue(s: &str) -> Result<(String, String), String> {
    let (a, b) = s.split_once('=').ok_or_else(|| format!("expected `a=b`, got {s:?}"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

fn settings(cli: &Cli) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(m) = cli.max_cosets {
        s.max_cosets = m;
        s.budget.max_cosets = m;
    }
    if let Some(n) = cli.limit_nodes {
        s.budget.node_limit = Some(n);
    }
    if let Some(l) = &cli.ladder {
        s.budget.ladder = parse_ladder(l)?;
        if s.budget.ladder.is_empty() {
            return Err(anyhow!("--ladder is empty"));
        }
    }
    Ok(s)
}

fn write_doc<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: &Cli) -> Result<CommandResult> {
    let settings = settings(cli)?;
    match &cli.command {
        Command::UniversalGroup { grading } => commands::universal_group(&read_json(grading)?, &settings),
        Command::Regrade(args) => {
            let doc: GradingDoc = read_json(&args.grading)?;
            let result = commands::regrade(&doc, args.method, args.hereditary, &settings)?;
            if let (Some(path), commands::Status::Ok, false) = (&args.output, result.status, args.hereditary) {
                write_doc(path, &result.payload)?;
            }
            Ok(result)
        }
        Command::WeakEquiv { a, b } => commands::weak_equiv(&read_json(a)?, &read_json(b)?, &settings),
        Command::Coarsenings { grading, glue } => commands::coarsenings(&read_json(grading)?, glue, &settings),
        Command::FromPresentation { presentation, output } => {
            let (result, doc) = commands::from_presentation(&read_json(presentation)?)?;
            if let Some(path) = output {
                write_doc(path, &doc)?;
            }
            Ok(result)
        }
        Command::Twisted(t) => match t {
            TwistedCommand::Center { bicharacter } => commands::twisted_center(&read_json(bicharacter)?),
            TwistedCommand::Blocks { bicharacter } => commands::twisted_blocks(&read_json(bicharacter)?),
            TwistedCommand::Cohomologous { a, b } => commands::twisted_cohomologous(&read_json(a)?, &read_json(b)?),
            TwistedCommand::ConditionStar { a, b } => {
                commands::twisted_condition_star(&read_json(a)?, &read_json(b)?)
            }
        },
        Command::Verify { grading, certificate } => {
            commands::verify(&read_json(grading)?, &read_json(certificate)?, &settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).unwrap_or_else(|e| CommandResult::error(&e));
    let doc = json!({ "status": result.status, "payload": result.payload });
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    let _ = writeln!(std::io::stdout(), "{text}");
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    ExitCode::from(result.status.exit_code() as u8)
}
