mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use output::{emit, RunManifest};

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = match &cli.command {
        Command::Perturb(p) => Some(p.seed),
        _ => None,
    };
    let mut manifest = RunManifest::new(cli.command.name(), &cli.command, seed);
    let m = &mut manifest;
    let (rendered, out) = match &cli.command {
        Command::SimulateStack(a) => (commands::simulate_stack(a, m)?, &a.output.out),
        Command::FindResonances(a) => (commands::find(a, m)?, &a.output.out),
        Command::PredictResonances(a) => (commands::predict(a, m)?, &a.output.out),
        Command::FsrTable(a) => (commands::fsr_table(a, m)?, &a.output.out),
        Command::FitDispersion(a) => (commands::fit(a, m)?, &a.output.out),
        Command::LossPartition(a) => (commands::loss(a, m)?, &a.output.out),
        Command::FieldProfile(a) => (commands::field(a, m)?, &a.output.out),
        Command::G0Curve(a) => (commands::g0_curve(a, m)?, &a.output.out),
        Command::Perturb(a) => (commands::perturb(a, m)?, &a.output.out),
        Command::CqedRates(a) => (commands::cqed(a, m)?, &a.output.out),
    };
    emit(rendered, &manifest, out.as_deref())
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&e.to_json()).unwrap());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => return fail(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
