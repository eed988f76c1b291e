use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use partfrac_cli::commands::{self, ExpansionName, Outcome, TableName};
use partfrac_cli::{parse_rows, Format, RunConfig, Status};

/// Partial-fraction coefficients of restricted partition generating functions.
///
/// Exit status: 0 ok, 1 invalid arguments, 2 table mismatch, 3 identity
/// failure, 4 convergence failure, 5 precision exhausted. When several
/// failures occur the largest code is returned.
#[derive(Parser)]
#[command(name = "partfrac", version)]
struct Cli {
    /// Working precision in bits (default depends on the command).
    #[arg(long, global = true, env = "PARTFRAC_PRECISION")]
    precision_bits: Option<u32>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomly placed test points.
    #[arg(long, global = true, default_value_t = 11)]
    seed: u64,
    /// Values of N, e.g. `400,600` or `200:1000:100`.
    #[arg(long, global = true, value_parser = |s: &str| parse_rows(s).map(Rows))]
    rows: Option<Rows>,
    /// Values of sigma, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    sigma: Option<Vec<i64>>,
    /// Order l of the coefficient C_01l.
    #[arg(long, global = true)]
    ell: Option<usize>,
    /// Number of expansion terms.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone)]
struct Rows(Vec<i64>);

#[derive(Subcommand)]
enum Command {
    /// Dilogarithm zeros w(A,B) for all admissible labels with |B| <= max-b.
    Zeros {
        #[arg(long, default_value_t = 3)]
        max_b: i64,
    },
    /// Expansion values against exact values for a reference table.
    Table {
        #[arg(value_enum)]
        name: TableName,
    },
    /// Psi(h/k) and D(h,k) for 1 <= h < k.
    Psi {
        #[arg(default_value_t = 211)]
        k: i64,
    },
    /// Residue sums against partition counts for N <= n-max and each sigma.
    Identity {
        #[arg(long, default_value_t = 25)]
        n_max: i64,
    },
    /// Coefficients of an asymptotic expansion.
    Expansion {
        #[arg(value_enum)]
        name: ExpansionName,
    },
    /// Runs the acceptance criteria; exits 0 only if all pass.
    Verify {
        /// Run only these criteria, e.g. `1,2,8`.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<usize>>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Invalid.code() as u8 } else { 0 });
        }
    };
    let cfg = RunConfig {
        precision: cli.precision_bits,
        format: cli.format,
        seed: cli.seed,
        rows: cli.rows.map(|r| r.0),
        sigma: cli.sigma,
        ell: cli.ell,
        m: cli.m,
    };
    let result = match cli.command {
        Command::Zeros { max_b } if max_b < 0 => {
            Err(partfrac::Error::Domain("--max-b must be nonnegative".into()))
        }
        Command::Zeros { max_b } => commands::zeros(max_b, &cfg),
        Command::Table { name } => commands::table(name, &cfg),
        Command::Psi { k } => commands::psi_table(k, &cfg),
        Command::Identity { n_max } => commands::identity(n_max, &cfg),
        Command::Expansion { name } => commands::expansion(name, &cfg),
        Command::Verify { criteria } => commands::verify(criteria.as_deref(), &cfg),
    };
    let Outcome { report, status } = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Status::of_error(&e).code() as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            report.write(cfg.format, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(cfg.format, &mut lock).and_then(|_| lock.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(Status::Invalid.code() as u8);
    }
    ExitCode::from(status.code() as u8)
}
