use clap::Parser;

fn main() {
    let cli = swred::cli::Cli::parse();
    let code = swred::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
