use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hahnforge::dsl::{self, RunConfig, Session};
use hahnforge::hahn::DEFAULT_BUDGET;

#[derive(Parser)]
#[command(name = "hahnforge", version, about = "Exact Hahn series and truncation-closure checks")]
struct Cli {
    /// Steps allowed per command (default: $HAHNFORGE_BUDGET or 100000)
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Terms shown by `show` without an explicit depth
    #[arg(long, global = true, default_value_t = 10)]
    depth: usize,
    /// Emit one JSON record per command
    #[arg(long, global = true)]
    json: bool,
    /// Seed for `selftest`
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program
    Run { file: PathBuf },
    /// Run every .hf file in a directory against its golden output
    Check {
        dir: PathBuf,
        /// Rewrite golden files
        #[arg(long, hide = true)]
        bless: bool,
    },
    /// Read statements from standard input
    Repl,
}

fn budget(flag: Option<u64>) -> Result<u64, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("HAHNFORGE_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| format!("HAHNFORGE_BUDGET: not a number: {v}")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match budget(cli.budget) {
        Ok(b) => RunConfig {
            budget: b,
            depth: cli.depth,
            seed: cli.seed,
        },
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.cmd {
        Cmd::Run { file } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match dsl::run_source(&src, config) {
                Ok(recs) => {
                    print!("{}", dsl::render(&recs, cli.json));
                    if recs.iter().all(|r| r.ok) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("{}:{e}", file.display());
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Check { dir, bless } => match dsl::check_corpus(&dir, &config, cli.json, bless) {
            Ok(results) => {
                let mut ok = true;
                for r in &results {
                    if r.ok {
                        println!("PASS {}", r.name);
                    } else {
                        ok = false;
                        println!("FAIL {}: {}", r.name, r.message);
                    }
                }
                println!("{} of {} passed", results.iter().filter(|r| r.ok).count(), results.len());
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Repl => repl(config, cli.json),
    }
}

fn repl(config: RunConfig, json: bool) -> ExitCode {
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let mut session = Session::new(config);
    let mut buf = String::new();
    let mut failed = false;
    let prompt = |cont: bool| {
        if interactive {
            eprint!("{}", if cont { "...> " } else { "hf> " });
            let _ = std::io::stderr().flush();
        }
    };
    prompt(false);
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        buf.push_str(&line);
        buf.push('\n');
        if !buf.trim_end().ends_with(';') {
            prompt(!buf.trim().is_empty());
            continue;
        }
        match dsl::parse(&buf) {
            Ok(p) => {
                let recs = session.run(&p);
                failed |= recs.iter().any(|r| !r.ok);
                print!("{}", dsl::render(&recs, json));
            }
            Err(e) => {
                failed = true;
                println!("error: {e}");
            }
        }
        buf.clear();
        prompt(false);
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
