use clap::Parser;
use rlr_cli::{commands, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = commands::run(&cli);
    print!("{}", outcome.render(cli.format));
    std::process::exit(outcome.exit_code());
}
