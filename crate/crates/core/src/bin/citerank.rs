use clap::Parser;

use citerank::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("citerank: {e}");
            std::process::exit(e.class().exit_code());
        }
    }
}
