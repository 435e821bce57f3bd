use std::collections::BTreeMap;
use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gqlengine_cli::generate::{generate, GeneratorConfig};
use gqlengine_cli::params::is_parameter_name;
use gqlengine_cli::{export_bundle, load_bundle, Format, Session, SessionConfig};

#[derive(Parser)]
#[command(name = "gqlsh", version, about = "Graph query shell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive shell; statements end with `;` or an empty line.
    Repl(SessionArgs),
    /// Run a script and exit.
    Run {
        script: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Load a bundle and write it back out.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded synthetic financial graph as a bundle.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SessionArgs {
    /// Bundle directory; an empty graph when omitted.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Parameter value, as name=value; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    /// Print traversal counters after each statement.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value_t = Format::Aligned)]
    format: Format,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let k = k.trim_start_matches('$');
    if !is_parameter_name(k) {
        return Err(format!("invalid parameter name {k:?}"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl SessionArgs {
    fn config(self) -> SessionConfig {
        SessionConfig {
            graph: self.graph,
            params: self.params.into_iter().collect::<BTreeMap<_, _>>(),
            stats: self.stats,
            format: self.format,
        }
    }
}

fn open(args: SessionArgs) -> Result<Session, ExitCode> {
    Session::open(args.config()).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Repl(args) => {
            let mut session = match open(args) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            let mut input = stdin.lock();
            let mut out = io::stdout().lock();
            let mut err = io::stderr().lock();
            match session.repl(&mut input, &mut out, &mut err, prompt) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Run { script, session } => {
            let text = match std::fs::read_to_string(&script) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", script.display());
                    return ExitCode::from(2);
                }
            };
            let mut session = match open(session) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let mut out = io::stdout().lock();
            let result = session.run_script(&text, &mut out);
            let _ = out.flush();
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Export { graph, out } => {
            let result = load_bundle(&graph).and_then(|b| export_bundle(&b.store, &out));
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Generate { seed, out } => {
            let store = generate(&GeneratorConfig::mini(seed));
            match export_bundle(&store, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
