use clap::Parser;

fn main() {
    let cli = rwdp::cli::Cli::parse();
    if let Err(err) = rwdp::cli::run(cli) {
        // a closed pipe (e.g. `rwdp ... | head`) is not an error
        if let rwdp::Error::Io(io) = &err {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
