use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use gsql_cli::command::is_repl;
use gsql_cli::{cmd_run, repl, Output, Session};

/// GSQL shell. Several commands run in one session when separated by a
/// standalone `;` argument, e.g. `gsql ddl s.ddl ';' install q.gsql ';' call Q 3`.
#[derive(Debug, Parser)]
#[command(name = "gsql", version, after_help = COMMANDS)]
struct Args {
    /// Evaluator worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Emit one JSON object per line instead of text tables.
    #[arg(long)]
    json: bool,
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, required = true)]
    command: Vec<String>,
}

const COMMANDS: &str = "Commands:
  ddl <file>
  load-edges <graph> <tsv> <vtype> <etype>
  load-table <csv> <name>
  install <gsql file>
  call <query> <args...>
  repl
  bench khop|wcc|pagerank --graph <g> [--edges <tsv>] ...

Exit status: 0 ok, 1 user error, 2 internal error.";

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let code = panic::catch_unwind(AssertUnwindSafe(|| session(args))).unwrap_or(2);
    ExitCode::from(code as u8)
}

fn session(args: Args) -> i32 {
    let mut s = Session::default();
    s.threads = args.threads;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let mut out = Output { out: &mut lock, json: args.json };
    for words in args.command.split(|w| w == ";").filter(|c| !c.is_empty()) {
        let code = if is_repl(words) {
            repl(&mut s, std::io::stdin().lock(), &mut out, &mut std::io::stderr())
        } else {
            match cmd_run(&mut s, words, &mut out) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        };
        if code != 0 {
            return code;
        }
    }
    let _ = out.out.flush();
    0
}
