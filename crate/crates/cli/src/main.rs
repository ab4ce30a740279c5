mod commands;
mod input;
mod report;

use std::ops::Range;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "uslsq", version, about = "Semi-Latin squares, block designs and their classification")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print progress and timings to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Rows,
    Columns,
}

#[derive(Subcommand)]
pub enum Command {
    /// Finite field of order q: characteristic, degree, modulus.
    Field {
        #[arg(long)]
        q: u64,
        /// Include the addition and multiplication tables.
        #[arg(long)]
        tables: bool,
    },
    /// The q-1 mutually orthogonal Latin squares of order q.
    Mols {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a square.
    #[command(subcommand)]
    Construct(Construct),
    /// Check the semi-Latin property and uniformity.
    Verify { file: PathBuf },
    /// Pairwise-concurrence counts of a design or of a square's underlying design.
    Eta { file: PathBuf },
    /// Canonical efficiency factors.
    Spectrum { file: PathBuf },
    /// Dual design of a square (cells become treatments).
    Dual {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Underlying block design of a square.
    Underlying {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Designs derived from a uniform square.
    #[command(subcommand)]
    Derive(Derive),
    /// Orthogonal array of an affine resolvable design.
    ToOa {
        /// A design, or a uniform square (its derived design along --axis is used).
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AxisArg::Rows)]
        axis: AxisArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strength of an orthogonal array in "N r s" text format.
    OaStrength { file: PathBuf },
    /// Search for a resolution and test affine resolvability.
    Resolve { file: PathBuf },
    /// Isomorphism test between two squares or two designs.
    Iso { a: PathBuf, b: PathBuf },
    /// Automorphism group order.
    Aut { file: PathBuf },
    /// Canonical certificate.
    Cert { file: PathBuf },
    /// Classify uniform (n x n)/(mu(n-1)) squares up to isomorphism.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mu: u32,
        /// Output directory (checkpoint, index, squares).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to USLSQ_WORKERS or all cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Process only seeds a..b of this run.
        #[arg(long, value_parser = parse_range)]
        seed_range: Option<Range<usize>>,
        /// Minimum number of blocks in a seed.
        #[arg(long, default_value_t = 0)]
        min_depth: usize,
    },
    /// Summarize a finished classification directory.
    Catalog {
        dir: PathBuf,
        /// Include one line per class.
        #[arg(long)]
        entries: bool,
    },
}

#[derive(Subcommand)]
pub enum Construct {
    /// Cellwise union of squares on disjoint treatment sets.
    Superpose {
        /// Square, Latin square or Latin-square-list files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace each treatment by s copies.
    Inflate {
        file: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The ((n+1) x (n+1))/(n(n-2)) square from n-1 MOLS of prime power order n.
    Bars {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum Derive {
    /// Extra treatments per row.
    D1 {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extra treatments per column.
    D2 {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual design plus rows and columns: a BIBD on the cells.
    D3 {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<Range<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..b)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command, cli.verbose) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
