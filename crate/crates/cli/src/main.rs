mod args;
mod commands;
mod inputs;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use roblearn::{Error, ErrorKind};

use args::{Cli, Command};

fn exit_code(e: &Error) -> (u8, &'static str) {
    match e.kind() {
        ErrorKind::Config => (2, "config"),
        ErrorKind::Data => (3, "data"),
        ErrorKind::NotRealizable => (4, "not_realizable"),
        ErrorKind::Optimizer => (5, "optimizer"),
    }
}

fn threads() -> Result<usize, Error> {
    match std::env::var("ROBLEARN_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| Error::InvalidParameter("ROBLEARN_THREADS must be a positive integer".into())),
        Err(_) => Ok(1),
    }
}

fn out_path(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::Certify(c)
        | Command::Attack(c)
        | Command::RermEllipsoid(c)
        | Command::Roboost(c)
        | Command::Uroboost(c)
        | Command::AlphaBoost(c)
        | Command::Robustify(c)
        | Command::Fms(c)
        | Command::CycleRobust(c)
        | Command::OnePass(c)
        | Command::Wm(c)
        | Command::Rejectron(c)
        | Command::Urejectron(c)
        | Command::TransductivePool(c)
        | Command::GenData(c)
        | Command::RcnTrain { cfg: c, .. } => c.out.as_deref(),
    }
}

fn main_inner(cli: &Cli) -> Result<(), Error> {
    let n = threads()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let doc = commands::run(&cli.command)?;
    let text = doc.to_text()?;
    match out_path(&cli.command) {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = exit_code(&e);
            let msg = serde_json::json!({ "error": kind, "code": code, "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
