use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ca2om_core::carm::RequirementsModel;
use ca2om_core::diag::Diagnostic;
use ca2om_core::emit::{emit_model, parse_formats, EmitConfig};
use ca2om_core::pipeline::{self, Options, Output};
use clap::{Args, Parser, Subcommand};

const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Derives OO-Method conceptual models from Communication Analysis
/// requirements models.
#[derive(Debug, Parser)]
#[command(name = "ca2om", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the requirements model and print its diagnostics.
    Validate(ModelArgs),
    /// Derive the Object Model and the state-transition diagrams.
    Derive {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma list of outputs: json, dot, trace.
        #[arg(long, default_value = "json,dot,trace")]
        format: String,
        #[arg(short, long, env = "CA2OM_OUT_DIR", default_value = "out")]
        out_dir: PathBuf,
        /// Print the event processing order, one event id per line.
        #[arg(long)]
        dump_order: bool,
    },
    /// Print every trace link whose source or derived element is ELEMENT.
    Trace {
        /// Element path, e.g. `TREAT 1`, `MEDICAL_TREATMENT.comments`.
        element: String,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// `.carm` files; all of them form one model.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(short, long)]
    annotations: Option<PathBuf>,
    /// Derive only this process, extended with the events preceding it.
    #[arg(short, long)]
    process: Option<String>,
    /// Turn every analyst fallback into an error.
    #[arg(long)]
    strict: bool,
    /// Add self-loops for edit and shared services.
    #[arg(long)]
    self_loops: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Diagnostics,
    Other(String),
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))
}

fn report(diags: &[Diagnostic]) {
    let mut err = std::io::stderr().lock();
    for d in diags {
        let _ = writeln!(err, "{d}");
    }
}

fn load(args: &ModelArgs) -> Result<RequirementsModel, Failure> {
    let mut sources = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        sources.push((path.display().to_string(), read(path)?));
    }
    let annotations = match &args.annotations {
        Some(path) => Some((path.display().to_string(), read(path)?)),
        None => None,
    };
    let refs: Vec<(&str, &str)> = sources.iter().map(|(n, t)| (n.as_str(), t.as_str())).collect();
    let model = pipeline::load(&refs, annotations.as_ref().map(|(n, t)| (n.as_str(), t.as_str()))).map_err(|d| {
        report(&d);
        Failure::Diagnostics
    })?;
    if let Some(p) = &args.process {
        if model.process(p).is_none() {
            return Err(Failure::Usage(format!("unknown process `{p}`")));
        }
    }
    Ok(model)
}

fn derive(args: &ModelArgs) -> Result<Output, Failure> {
    let model = load(args)?;
    let options = Options {
        strict: args.strict,
        self_loops: args.self_loops,
        process: args.process.clone(),
    };
    match pipeline::derive(&model, &options) {
        Ok(out) => {
            report(&out.diagnostics);
            Ok(out)
        }
        Err(diags) => {
            report(&diags);
            Err(Failure::Diagnostics)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(args) => derive(&args).map(drop),
        Command::Derive {
            model,
            format,
            out_dir,
            dump_order,
        } => {
            let formats = parse_formats(&format).map_err(Failure::Usage)?;
            let out = derive(&model)?;
            let cfg = EmitConfig { formats, out_dir };
            emit_model(&out.object_model, &out.diagrams, &out.trace, &cfg).map_err(|e| Failure::Other(e.to_string()))?;
            if dump_order {
                let mut stdout = std::io::stdout().lock();
                for event in &out.order {
                    let _ = writeln!(stdout, "{event}");
                }
            }
            Ok(())
        }
        Command::Trace { element, model } => {
            let out = derive(&model)?;
            let links = out.trace.touching(&element);
            if links.is_empty() {
                return Err(Failure::Other(format!("no trace link touches `{element}`")));
            }
            let mut stdout = std::io::stdout().lock();
            for link in links {
                let _ = writeln!(stdout, "{link}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Diagnostics) => ExitCode::from(EXIT_DIAGNOSTICS),
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DIAGNOSTICS)
        }
    }
}
