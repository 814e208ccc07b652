use clap::error::ErrorKind;
use clap::Parser;
use ksbetas_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            // Usage errors are configuration errors.
            let _ = e.print();
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(Some(text)) => println!("{text}"),
        Ok(None) => {}
        Err(e) => {
            eprintln!("ksbetas: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
