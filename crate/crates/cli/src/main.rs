use std::io::Write;

use clap::Parser;

use atomata::{emit, execute, Cli};

fn main() {
    let cli = Cli::parse();
    let result = execute(&cli);
    let out = emit(&result, cli.json);
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
