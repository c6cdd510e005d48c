use clap::Parser;

fn main() {
    let cli = magicfiber_cli::commands::Cli::parse();
    std::process::exit(magicfiber_cli::run(&cli));
}
