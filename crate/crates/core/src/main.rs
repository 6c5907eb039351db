use clap::Parser;

use tailsum::cli::{run, Cli, EXIT_OK, EXIT_USAGE};
use tailsum::mcengine::{threads_from_env, with_threads};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = with_threads(threads_from_env(), || run(cli));
    std::process::exit(code);
}
