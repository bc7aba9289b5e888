use clap::Parser;

fn main() {
    let cli = qnd_cli::Cli::parse();
    if let Err(e) = qnd_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
