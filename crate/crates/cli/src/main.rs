//! `pomdp-voi`: validate models, solve them, evaluate imposed policies and
//! compute value-of-information curves from the command line.
//!
//! Every command writes its output files plus a `<command>.manifest.json`
//! holding all resolved parameters; `rerun` replays a manifest and
//! reproduces byte-identical outputs.

mod args;
mod commands;
mod figures;
mod job;

use std::process::ExitCode;

use clap::Parser;
use pomdp_voi::Error;

use crate::args::Cli;

/// Worker threads for parallel sections; all cores when unset.
const WORKERS_ENV: &str = "POMDP_VOI_WORKERS";

/// Exit codes: parse failures 2, violated invariants 3, numerical failures
/// 4, anything else 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Index { .. }
        | Error::InvalidModel(_)
        | Error::InvalidBelief { .. }
        | Error::ImpossibleObservation { .. }
        | Error::Parameter(_)
        | Error::EmptySet
        | Error::UnreachableEta { .. }
        | Error::ChainRow { .. } => 3,
        Error::Numeric(_) | Error::NotConverged { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn configure_workers() -> pomdp_voi::Result<()> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{WORKERS_ENV}={text:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Parameter(format!("{WORKERS_ENV}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_workers().and_then(|()| commands::run(cli.command, cli.dry_run));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_separate_failure_classes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidModel(vec!["row".into()])), 3);
        assert_eq!(exit_code(&Error::ChainRow { state: 0, sum: 0.5 }), 3);
        assert_eq!(exit_code(&Error::Numeric("singular".into())), 4);
        assert_eq!(exit_code(&Error::NotConverged { iterations: 1, residual: 1.0 }), 4);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("disk"))), 1);
    }
}
