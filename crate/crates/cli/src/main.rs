use clap::Parser;

fn main() {
    let cli = hinf_cli::Cli::parse();
    std::process::exit(hinf_cli::run(cli));
}
