use clap::Parser;

fn main() {
    let cli = zeta_forms::cli::Cli::parse();
    let code = zeta_forms::cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
