use clap::Parser;

fn main() {
    let cli = grit_dbscan_cli::args::Cli::parse();
    std::process::exit(grit_dbscan_cli::run(&cli));
}
