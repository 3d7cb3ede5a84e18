use clap::Parser;

fn main() {
    let cli = offres_cli::Cli::parse();
    match offres_cli::run_cli(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
