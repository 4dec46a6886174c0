mod args;
mod commands;
mod error;
mod inputs;
mod output;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command, Group};
use error::CliError;
use output::{emit, Report};

fn configure_threads() -> Result<(), CliError> {
    match std::env::var("QSW_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Usage(format!("QSW_THREADS must be a positive integer, got {v:?}")))?;
            qsw::par::init_thread_pool(n);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn run_verify(cli: &Cli, group: Option<Group>, corpus: Option<&std::path::Path>) -> Result<(), CliError> {
    let groups: Vec<Group> = group.map_or_else(|| Group::ALL.to_vec(), |g| vec![g]);
    let outcomes = verify::run(&groups, corpus, cli.seed);
    let mut text = String::new();
    let mut first_failure = None;
    for o in &outcomes {
        match &o.result {
            Ok(n) => text.push_str(&format!("{}: pass ({n} checks)\n", o.group.name())),
            Err(cx) => {
                text.push_str(&format!("{}: FAIL ({})\n", o.group.name(), cx.check));
                first_failure.get_or_insert(cx);
            }
        }
    }
    if let Some(cx) = first_failure {
        let body = serde_json::to_string(cx).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push_str(&body);
        text.push('\n');
        emit(&text, cli.out.as_deref())?;
        let detail = match cx.data.get("file") {
            Some(f) => format!("{}: {} ({})", cx.group, cx.check, f.as_str().unwrap_or_default()),
            None => format!("{}: {}", cx.group, cx.check),
        };
        return Err(CliError::Verify(detail));
    }
    emit(&text, cli.out.as_deref())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let report: Report = match &cli.command {
        Command::Eval {
            source,
            strategy,
            advice,
            box_path,
        } => commands::eval(source, strategy.as_deref(), advice.as_deref(), box_path.as_deref())?,
        Command::Equilibria { source, mixed } => commands::equilibria(source, *mixed)?,
        Command::CeCheck { source, advice } => commands::ce_check(source, advice)?,
        Command::Box { action } => commands::box_cmd(action, cli.seed)?,
        Command::Quantum { action } => commands::quantum_cmd(action)?,
        Command::Scan { eta, step, from, to } => commands::scan_cmd(*eta, *step, *from, *to)?,
        Command::Theta0 { eta } => commands::theta0_cmd(*eta)?,
        Command::Fig2 { from, to, points } => commands::fig2(*from, *to, *points)?,
        Command::Verify { group, corpus } => return run_verify(&cli, *group, corpus.as_deref()),
    };
    emit(&report.render(cli.format)?, cli.out.as_deref())
}

/// Negative values such as `--eta -1` reach validation instead of being
/// taken for flags.
fn allow_negatives(cmd: clap::Command) -> clap::Command {
    cmd.allow_negative_numbers(true).mut_subcommands(allow_negatives)
}

fn parse() -> Result<Cli, clap::Error> {
    let mut cmd = allow_negatives(Cli::command());
    let matches = cmd.try_get_matches_from_mut(std::env::args_os())?;
    Cli::from_arg_matches(&matches).map_err(|e| e.format(&mut cmd))
}

fn main() -> ExitCode {
    let cli = match parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("qsw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(2),
    }
}
