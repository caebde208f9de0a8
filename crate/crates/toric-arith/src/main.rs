use std::process::ExitCode;

use clap::Parser;
use toric_arith::cli::{main_with, Args};

fn main() -> ExitCode {
    main_with(Args::parse())
}
