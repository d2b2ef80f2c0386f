//! `bestmat`: command-line driver for the best matrix search.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bestmat", version, about = "Exhaustive search for circulant best matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
#[group(required = true, multiple = false)]
pub struct OrderArgs {
    /// Order as r, with n = r^2 + r + 1.
    #[arg(long)]
    pub r: Option<u32>,
    /// Order n directly (must be of the form r^2 + r + 1).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Compression factor; defaults to the smallest prime divisor of n (1 if
    /// n is prime).
    #[arg(long)]
    pub d: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "BESTMAT_THREADS")]
    pub threads: Option<usize>,
    /// Tolerance for floating-point spectrum bounds.
    #[arg(long, default_value_t = bestmat::divide::DEFAULT_EPSILON)]
    pub eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: divide, encode, solve, verify and count classes.
    Search {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Output directory for subproblems.txt, solutions.txt, counts.txt
        /// and per-subproblem status files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Reuse finished subproblems recorded in <out>/status.
        #[arg(long)]
        resume: bool,
        /// Time limit per subproblem in seconds.
        #[arg(long, value_name = "SECONDS")]
        limit_per_subproblem: Option<f64>,
    },
    /// Generate the inequivalent subproblems of an order.
    Divide {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Output directory for subproblems.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write one DIMACS CNF file per subproblem.
    Encode {
        /// Subproblem file produced by `divide`.
        subproblems: PathBuf,
        /// Output directory for sub-<index>.cnf files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Encode only the subproblem with this (zero-based) index.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Enumerate the models of DIMACS CNF files.
    Solve {
        /// CNF files; the spectrum callback is active when they carry
        /// `c meta` metadata.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = bestmat::divide::DEFAULT_EPSILON)]
        eps: f64,
        #[arg(long, env = "BESTMAT_THREADS")]
        threads: Option<usize>,
        /// Time limit per file in seconds.
        #[arg(long, value_name = "SECONDS")]
        limit_per_subproblem: Option<f64>,
        /// Stop after the first model of each file.
        #[arg(long)]
        first: bool,
        /// Append verified decoded solutions to this solutions file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress `v` lines.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Check every quadruple of a solutions file exactly.
    Verify {
        solutions: PathBuf,
        /// Also report the number of equivalence classes.
        #[arg(long)]
        classes: bool,
    },
    /// Build and certify Goethals-Seidel skew Hadamard matrices.
    Hadamard {
        solutions: PathBuf,
        /// Output directory for hadamard-<i>.txt and hadamard-<i>.pbm.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search {
            order,
            run,
            out,
            resume,
            limit_per_subproblem,
        } => commands::search(&order, &run, &out, resume, limit_per_subproblem),
        Command::Divide { order, run, out } => commands::divide(&order, &run, &out),
        Command::Encode {
            subproblems,
            out,
            index,
        } => commands::encode(&subproblems, &out, index),
        Command::Solve {
            files,
            eps,
            threads,
            limit_per_subproblem,
            first,
            out,
            quiet,
        } => commands::solve(&commands::SolveArgs {
            files,
            eps,
            threads,
            limit: limit_per_subproblem,
            first,
            out,
            quiet,
        }),
        Command::Verify { solutions, classes } => commands::verify(&solutions, classes),
        Command::Hadamard { solutions, out } => commands::hadamard(&solutions, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            commands::exit_code(&e)
        }
    }
}
