use clap::Parser;

fn main() {
    let cli = rqmc::cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = rqmc::cli::run(&cli, &mut stdout.lock()) {
        eprintln!("rqmc: {e}");
        std::process::exit(1);
    }
}
