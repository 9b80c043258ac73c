use clap::Parser;

fn main() {
    let cli = fpulab_cli::Cli::parse();
    if let Err(err) = fpulab_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(fpulab_cli::exit_code(&err));
    }
}
