use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shiq::engine::{to_dot, SolveReport};
use shiq::model::extract_model;
use shiq::parse::{parse_concept, parse_kb};
use shiq::{
    reduce_abox_consistency, reduce_concept_sat, reduce_subsumption, solve, ReducedProblem,
    SolveOptions,
};

#[derive(Parser)]
#[command(name = "shiq", version, about = "Decide SHIQ knowledge base queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Is the knowledge base consistent?
    Consistent {
        file: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Is a concept satisfiable with respect to the terminology?
    Sat {
        file: PathBuf,
        #[arg(long)]
        concept: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Is `--sub` subsumed by `--super` with respect to the terminology?
    Subsumes {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long = "super")]
        sup: String,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Write one line per rule application.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final forest in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the extracted model when the final forest has no blocked node.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = SolveOptions::default().max_nodes)]
    max_nodes: usize,
    /// Shuffle the alternatives of every choice point with this seed.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn concept(text: &str, flag: &str) -> Result<shiq::Concept, Failure> {
    parse_concept(text).map_err(|e| Failure::Input(format!("--{flag}: {e}")))
}

fn run(problem: &ReducedProblem, flags: &RunFlags) -> Result<SolveReport, Failure> {
    let opts = SolveOptions {
        max_nodes: flags.max_nodes,
        seed: flags.seed,
        record_trace: flags.trace.is_some(),
        ..SolveOptions::default()
    };
    let report = solve(problem, &opts).map_err(|e| Failure::Internal(e.to_string()))?;
    if let Some(path) = &flags.trace {
        let text: String = report.trace.iter().map(|r| format!("{r}\n")).collect();
        write(path, &text)?;
    }
    let forest = report.outcome.forest();
    if let (Some(path), Some(f)) = (&flags.dot, forest) {
        write(path, &to_dot(f))?;
    }
    if let (Some(path), Some(f)) = (&flags.model, forest) {
        match extract_model(f, problem) {
            Ok(i) => write(path, &i.to_text())?,
            Err(e) => eprintln!("no model written: {e}"),
        }
    }
    Ok(report)
}

fn dispatch(cli: Cli) -> Result<(&'static str, bool), Failure> {
    let load = |file: &Path| {
        let text = read(file)?;
        parse_kb(&text).map_err(|e| Failure::Input(format!("{}:{e}", file.display())))
    };
    match cli.command {
        Command::Consistent { file, run: flags } => {
            let kb = load(&file)?;
            let consistent = run(&reduce_abox_consistency(&kb), &flags)?.outcome.is_consistent();
            Ok(if consistent {
                ("CONSISTENT", true)
            } else {
                ("INCONSISTENT", false)
            })
        }
        Command::Sat {
            file,
            concept: c,
            run: flags,
        } => {
            let kb = load(&file)?;
            let c = concept(&c, "concept")?;
            let problem = reduce_concept_sat(&c, &kb).map_err(|e| Failure::Input(e.to_string()))?;
            let sat = run(&problem, &flags)?.outcome.is_consistent();
            Ok(if sat { ("SAT", true) } else { ("UNSAT", false) })
        }
        Command::Subsumes {
            file,
            sub,
            sup,
            run: flags,
        } => {
            let kb = load(&file)?;
            let (c, d) = (concept(&sub, "sub")?, concept(&sup, "super")?);
            let problem =
                reduce_subsumption(&c, &d, &kb).map_err(|e| Failure::Input(e.to_string()))?;
            let subsumed = !run(&problem, &flags)?.outcome.is_consistent();
            Ok(if subsumed { ("YES", true) } else { ("NO", false) })
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok((word, positive)) => {
            println!("{word}");
            ExitCode::from(if positive { 0 } else { 1 })
        }
        Err(failure) => {
            match &failure {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
