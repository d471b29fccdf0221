use clap::Parser;

fn main() {
    let cli = ruelle::cli::Cli::parse();
    if let Err(error) = ruelle::cli::run(cli) {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
