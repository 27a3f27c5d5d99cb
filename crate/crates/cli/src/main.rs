//! Target-domain attribution toolkit.
//!
//! Subcommands: `synth` (datasets), `explain` (attribute one signal),
//! `validate` (invariant suite), `eval` (insertion/deletion curves),
//! `demo` (end-to-end walkthrough on the built-in classifier).

mod commands;
mod config;
mod errors;
mod io;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "xdig",
    version,
    about = "Integrated-gradients attributions for time-series models in \
             frequency, component, and seasonal-trend domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attribute a signal in a target domain and write score files.
    Explain(commands::explain::ExplainArgs),
    /// Run the invariant suite; exit 1 if any check fails.
    Validate(commands::validate::ValidateArgs),
    /// Insertion/deletion faithfulness curves vs a random control.
    Eval(commands::eval::EvalArgs),
    /// Generate seeded synthetic datasets.
    Synth(commands::synth::SynthArgs),
    /// Reference-model walkthrough: paired attributions and the
    /// response-vs-attribution sweep.
    Demo(commands::demo::DemoArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Explain(args) => commands::explain::run(args),
        Command::Validate(args) => commands::validate::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Demo(args) => commands::demo::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
