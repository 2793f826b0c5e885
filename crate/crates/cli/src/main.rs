use clap::Parser;

fn main() {
    let cli = sixvertex_cli::Cli::parse();
    std::process::exit(sixvertex_cli::run(&cli));
}
