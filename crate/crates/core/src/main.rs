use clap::Parser;

fn main() {
    let cli = tavis_bell::cli::Cli::parse();
    if let Err(err) = tavis_bell::cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
