use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use taskdecomp::io::{
    emit_dot, parse_model, serialize_automaton, team_report_text, ModelDocument, ReportDocument,
};
use taskdecomp::{
    bisimilar, check_decomposable, compose_all, diagnose, format_word, interleave,
    project_automaton, synthesize_controllers, verify_team, word, AgentPlant, Automaton,
    CheckOptions, Event, LocalController, TeamCheck,
};

#[derive(Parser)]
#[command(name = "taskdecomp", version, about = "Decompose global task automata into local tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bisimulation,
    Simulation,
}

#[derive(clap::Args)]
struct CheckArgs {
    model: PathBuf,
    /// How often a branch may reuse one transition when checking DC3.
    #[arg(long, default_value_t = 1)]
    bound: usize,
    /// Also build the composed projections and compare directly.
    #[arg(long)]
    oracle: bool,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Check decomposability; exits 0 if decomposable, 1 if not.
    Check(CheckArgs),
    /// Write the local task of every agent to `<dir>/<name>-p<i>.aut`.
    Decompose {
        model: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Print the local task of one agent.
    Project {
        model: PathBuf,
        #[arg(long)]
        agent: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the parallel composition of the given automata.
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exits 0 if the two automata are bisimilar, 1 if not.
    Bisim { left: PathBuf, right: PathBuf },
    /// List the interleavings of two strings that synchronize on shared events.
    Interleave {
        left: String,
        right: String,
        /// Local events of the left string (defaults to its own events).
        #[arg(long)]
        left_events: Option<String>,
        #[arg(long)]
        right_events: Option<String>,
    },
    /// Compose controllers with plants and check the result against the task.
    VerifyTeam {
        model: PathBuf,
        /// One controller file per agent, in agent order (default: projections).
        #[arg(long, num_args = 1..)]
        controllers: Vec<PathBuf>,
        /// One plant file per agent, in agent order (default: unrestricted).
        #[arg(long, num_args = 1..)]
        plants: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Bisimulation)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Suggest event-sharing changes; exits 0 if the model is decomposable
    /// with them applied, 1 if not.
    Diagnose(CheckArgs),
    /// Print the task automaton as a Graphviz digraph.
    ExportDot { model: PathBuf },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ModelDocument, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_automaton(path: &Path) -> Result<Automaton, Failure> {
    Ok(load(path)?.automaton)
}

fn print_automaton(name: &str, a: &Automaton, format: Format) -> Result<(), Failure> {
    match format {
        Format::Text => print!("{}", serialize_automaton(name, a)),
        Format::Dot => print!("{}", emit_dot(a)),
        Format::Json => println!("{}", serde_json::to_string_pretty(a)?),
    }
    Ok(())
}

fn check(args: &CheckArgs, with_diagnosis: bool) -> Outcome {
    if args.format == Format::Dot {
        return Err(Failure("dot output is only available for automata".into()));
    }
    let doc = load(&args.model)?;
    let options = CheckOptions {
        bound: args.bound,
        oracle: args.oracle,
        parallel: !args.sequential,
    };
    let report = check_decomposable(&doc.automaton, &doc.distribution, options)?;
    let diagnosis = if with_diagnosis {
        Some(diagnose(&doc.automaton, &doc.distribution, &report)?)
    } else {
        None
    };
    let verdict = match &diagnosis {
        Some(d) => d.decomposable_after,
        None => report.overall,
    };
    let disagreement = report.oracle_agrees == Some(false);
    let document = ReportDocument {
        model: doc.name,
        report,
        diagnosis,
    };
    match args.format {
        Format::Json => println!("{}", document.to_json()),
        _ => print!("{}", document.to_text()),
    }
    if disagreement {
        return Err(Failure("condition checks and direct check disagree".into()));
    }
    Ok(verdict)
}

fn event_set(list: Option<&str>, fallback: &[Event]) -> BTreeSet<Event> {
    match list {
        Some(text) => word(text).into_iter().collect(),
        None => fallback.iter().cloned().collect(),
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check(args) => check(&args, false),
        Command::Diagnose(args) => check(&args, true),
        Command::Decompose { model, out_dir } => {
            let doc = load(&model)?;
            fs::create_dir_all(&out_dir)?;
            for c in synthesize_controllers(&doc.automaton, &doc.distribution)? {
                let name = format!("{}-p{}", doc.name, c.agent);
                let path = out_dir.join(format!("{name}.aut"));
                fs::write(&path, serialize_automaton(&name, &c.model))
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Project {
            model,
            agent,
            format,
        } => {
            let doc = load(&model)?;
            let local = project_automaton(&doc.automaton, doc.distribution.agent(agent)?);
            print_automaton(&format!("{}-p{agent}", doc.name), &local, format)?;
            Ok(true)
        }
        Command::Compose { files, format } => {
            let automata = files
                .iter()
                .map(|p| load_automaton(p))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Automaton> = automata.iter().collect();
            print_automaton("composition", &compose_all(&refs)?, format)?;
            Ok(true)
        }
        Command::Bisim { left, right } => {
            let a = load_automaton(&left)?;
            let b = load_automaton(&right)?;
            match bisimilar(&a, &b) {
                Some(w) => {
                    println!("bisimilar ({} related pairs)", w.pairs.len());
                    Ok(true)
                }
                None => {
                    println!("not bisimilar");
                    if let Some(s) = taskdecomp::equivalence::language_difference(&a, &b) {
                        println!("distinguishing string: {}", format_word(&s));
                    }
                    Ok(false)
                }
            }
        }
        Command::Interleave {
            left,
            right,
            left_events,
            right_events,
        } => {
            let s = word(&left);
            let t = word(&right);
            let e1 = event_set(left_events.as_deref(), &s);
            let e2 = event_set(right_events.as_deref(), &t);
            for w in interleave(&s, &t, &e1, &e2)? {
                println!("{}", format_word(&w));
            }
            Ok(true)
        }
        Command::VerifyTeam {
            model,
            controllers,
            plants,
            mode,
            format,
        } => {
            let doc = load(&model)?;
            let controllers = if controllers.is_empty() {
                synthesize_controllers(&doc.automaton, &doc.distribution)?
            } else {
                controllers
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        Ok(LocalController {
                            agent: k + 1,
                            model: load_automaton(p)?,
                        })
                    })
                    .collect::<Result<Vec<_>, Failure>>()?
            };
            let plants = plants
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    Ok(AgentPlant {
                        agent: k + 1,
                        model: load_automaton(p)?,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let mode = match mode {
                Mode::Bisimulation => TeamCheck::Bisimulation,
                Mode::Simulation => TeamCheck::Simulation,
            };
            let report = verify_team(
                &doc.automaton,
                &doc.distribution,
                &controllers,
                (!plants.is_empty()).then_some(plants.as_slice()),
                mode,
            )?;
            match format {
                Format::Text => print!("{}", team_report_text(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Dot => print!("{}", emit_dot(&report.closed_loop)),
            }
            Ok(report.verdict.holds())
        }
        Command::ExportDot { model } => {
            print!("{}", emit_dot(&load(&model)?.automaton));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
