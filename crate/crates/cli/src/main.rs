use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thinlab_cli::commands::{self, CliError, Format, RunConfig, EXIT_ERROR};
use thinlab_core::tau::Budget;

#[derive(Parser)]
#[command(
    name = "thinlab",
    version,
    about = "Levels of subsets in the thin-completion hierarchy"
)]
struct Cli {
    /// Session base b0; every geometric base must be a power of it.
    #[arg(long, global = true, default_value_t = 2)]
    base: u32,
    /// Deepest derived-set path the engine may explore.
    #[arg(long, global = true, default_value_t = 32)]
    max_depth: usize,
    /// Largest number of nodes the engine may expand per query.
    #[arg(
        long,
        global = true,
        env = "THINLAB_BUDGET_NODES",
        default_value_t = 100_000
    )]
    max_nodes: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a set expression: exit 0 on a finite level, 3 outside tau*, 4 on budget exhaustion.
    Classify {
        /// Set expression; omit with --batch.
        expr: Option<String>,
        /// Read one expression per line from a file ("-" for stdin) and print JSON lines.
        #[arg(long, conflicts_with = "expr")]
        batch: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    /// Dump the tau-tree of a set expression.
    Tree {
        expr: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = TreeFormat::Text)]
        format: TreeFormat,
    },
    /// Tabulate levels of every subset of a finite group and cross-check the engine.
    Oracle {
        /// z<n> for Z/n, b<d> for (Z/2)^d.
        #[arg(long)]
        group: String,
        /// Ideal of subsets with at most t elements.
        #[arg(long, default_value_t = 0)]
        t: u64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single criterion (1 to 8).
        #[arg(long)]
        criterion: Option<u8>,
        /// Omit the elapsed-time line.
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the escalation chain A, 3A|(3A+1), ... with the level of each iterate.
    Escalate {
        expr: String,
        #[arg(long, default_value_t = 4)]
        steps: u32,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    /// Print searched c(n) and the c(n,k) tower as CSV.
    Ctable {
        #[arg(long, default_value_t = 5)]
        n_max: u64,
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        /// Largest absolute entry in the subset-sum search.
        #[arg(long, default_value_t = 3)]
        entry_bound: u64,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = RunConfig {
        base: cli.base,
        budget: Budget {
            max_depth: cli.max_depth,
            max_nodes: cli.max_nodes,
        },
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match cli.command {
        Command::Classify {
            expr,
            batch,
            format,
        } => {
            let format = match format {
                OutFormat::Text => Format::Text,
                OutFormat::Json => Format::Json,
            };
            match (expr, batch) {
                (_, Some(path)) if path.as_os_str() == "-" => {
                    commands::classify_batch(&mut io::stdin().lock(), &cfg, &mut out)?
                }
                (_, Some(path)) => commands::classify_batch(
                    &mut BufReader::new(File::open(path)?),
                    &cfg,
                    &mut out,
                )?,
                (Some(expr), None) => commands::classify(&expr, format, &cfg, &mut out)?,
                (None, None) => {
                    return Err(CliError::Config(
                        "classify needs an expression or --batch".into(),
                    ))
                }
            }
        }
        Command::Tree {
            expr,
            depth,
            format,
        } => {
            let format = match format {
                TreeFormat::Text => Format::Text,
                TreeFormat::Json => Format::Json,
                TreeFormat::Dot => Format::Dot,
            };
            commands::tree(&expr, depth, format, &cfg, &mut out)?
        }
        Command::Oracle {
            group,
            t,
            out: path,
            format,
        } => {
            let group = commands::parse_group(&group)?;
            let format = match format {
                TableFormat::Csv => Format::Text,
                TableFormat::Json => Format::Json,
            };
            commands::oracle_sweep(
                group,
                t,
                format,
                path.as_deref(),
                &cfg,
                &mut out,
                &mut io::stderr(),
            )?
        }
        Command::Selftest {
            seed,
            criterion,
            no_timing,
        } => commands::selftest(seed, criterion, !no_timing, &cfg, &mut out)?,
        Command::Escalate {
            expr,
            steps,
            format,
        } => {
            let format = match format {
                OutFormat::Text => Format::Text,
                OutFormat::Json => Format::Json,
            };
            commands::escalate(&expr, steps, format, &cfg, &mut out)?
        }
        Command::Ctable {
            n_max,
            k_max,
            entry_bound,
        } => commands::ctable(n_max, k_max, entry_bound, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("thinlab: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
