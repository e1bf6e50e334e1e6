use clap::Parser;

fn main() {
    let cli = match itc::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout and succeed; usage errors exit 1 like every other failure.
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = itc::cli::execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
