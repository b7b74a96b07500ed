use std::io;
use std::process::ExitCode;

use clap::Parser;
use xtt::cli::{run, CliConfig};

fn main() -> ExitCode {
    let config = CliConfig::parse();
    let status = run(&config, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(status as u8)
}
