//! Command-line front end.
//!
//! Exit codes: 0 ok or exists, 1 proven nonexistent or invalid, 2 unknown
//! or budget exceeded, 3 out of scope, 64 usage, 70 internal failure.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use subsquares::io::{format_grid, outline_from_json, outline_to_json, parse_grid, ConstructionJson};
use subsquares::oracle::{find_realization_bruteforce, OracleOutcome, DEFAULT_BUDGET};
use subsquares::{
    construct, construct_ils, exists, lift, reduce, verify_realization, Error, Existence, LatinSquare, Partition,
    SubsquareCertificate,
};

const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_SCOPE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "subsquares", version, about = "Latin squares with prescribed disjoint subsquares")]
struct Cli {
    /// Report progress and construction steps on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence of a realization ("3,3,3,2,1" or "3^3 2 1").
    Exists { partition: String },
    /// Build and verify a realization.
    Construct {
        partition: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Include the construction trace in JSON output.
        #[arg(long)]
        trace: bool,
    },
    /// Check a square (grid text or construction JSON) against a partition.
    Verify { file: String, partition: String },
    /// Reduce a square modulo row, column and symbol partitions.
    Reduce { file: String, rows: String, cols: String, syms: String },
    /// Lift an outline rectangle (JSON) to a latin square.
    Lift { file: String },
    /// Exhaustive search for a small realization.
    Oracle {
        partition: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Incomplete latin square of order n with the given holes.
    Ils {
        n: usize,
        holes: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_) | Error::InvalidPartition(_) | Error::PartitionSum { .. } => EXIT_USAGE,
            Error::Nonexistent(_) => EXIT_NO,
            Error::NotLatin(_) | Error::NotSubsquare { .. } | Error::NotDisjoint { .. } => EXIT_NO,
            Error::Precondition(_) | Error::Infeasible(_) => EXIT_SCOPE,
            Error::SearchExhausted(_) | Error::Internal(_) => EXIT_INTERNAL,
        };
        Fail(code, e.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn parse_partition(s: &str) -> Result<Partition, Fail> {
    s.parse().map_err(|e: Error| Fail(EXIT_USAGE, format!("{e}")))
}

fn read_input(path: &str) -> Result<String, Fail> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Fail(EXIT_USAGE, format!("cannot read {path}: {e}")))?;
    Ok(text)
}

/// Grid text, or construction JSON with its own certificate.
fn read_square(path: &str) -> Result<(LatinSquare, Option<SubsquareCertificate>), Fail> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        let (sq, cert) = ConstructionJson::from_json(&text)?.decode()?;
        Ok((sq, Some(cert)))
    } else {
        Ok((parse_grid(&text)?, None))
    }
}

fn emit(sq: &LatinSquare, json: ConstructionJson, format: Format) {
    match format {
        Format::Json => println!("{}", json.to_json()),
        Format::Csv => print!("{}", format_grid(sq, ",")),
    }
}

fn run(cli: Cli) -> Outcome {
    let verbose = cli.verbose;
    match cli.command {
        Command::Exists { partition } => {
            let p = parse_partition(&partition)?;
            let e = exists(&p);
            match e {
                Existence::Yes(r) => println!("Yes ({}): {}", r.tag(), r.describe()),
                Existence::No(r) => println!("No ({}): {}", r.tag(), r.describe()),
                Existence::Unknown => println!("Unknown: no known characterization covers {p}"),
            }
            Ok(match e {
                Existence::Yes(_) => 0,
                Existence::No(_) => EXIT_NO,
                Existence::Unknown => EXIT_UNKNOWN,
            })
        }
        Command::Construct { partition, format, trace } => {
            let p = Partition::sorted(parse_partition(&partition)?.parts().to_vec())?;
            let (sq, cert, tr) = construct(&p)?;
            if verbose {
                for step in &tr.steps {
                    eprintln!("{}", serde_json::to_string(step).expect("serializable"));
                }
            }
            let cert = verify_realization(&sq, &p, Some(&cert))
                .map_err(|e| Fail(EXIT_INTERNAL, format!("construction failed verification: {e}")))?;
            let json = ConstructionJson::new(&sq, p.parts(), &cert, trace.then_some(tr))?;
            emit(&sq, json, format);
            Ok(0)
        }
        Command::Verify { file, partition } => {
            let p = parse_partition(&partition)?;
            let (sq, cert) = read_square(&file)?;
            match verify_realization(&sq, &p, cert.as_ref()) {
                Ok(_) => {
                    println!("valid: order {} realizes {p}", sq.order());
                    Ok(0)
                }
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Reduce { file, rows, cols, syms } => {
            let (sq, _) = read_square(&file)?;
            let (p, q, r) = (parse_partition(&rows)?, parse_partition(&cols)?, parse_partition(&syms)?);
            println!("{}", outline_to_json(&reduce(&sq, &p, &q, &r)?));
            Ok(0)
        }
        Command::Lift { file } => {
            let o = outline_from_json(&read_input(&file)?)?;
            let sq = lift(&o)?;
            print!("{}", format_grid(&sq, " "));
            Ok(0)
        }
        Command::Oracle { partition, budget } => {
            let p = parse_partition(&partition)?;
            match find_realization_bruteforce(&p, budget)? {
                OracleOutcome::Found(sq) => {
                    print!("{}", format_grid(&sq, " "));
                    Ok(0)
                }
                OracleOutcome::None => {
                    println!("none: search space exhausted");
                    Ok(EXIT_NO)
                }
                OracleOutcome::BudgetExceeded { nodes } => {
                    println!("budget exceeded after {nodes} nodes");
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Ils { n, holes, format } => {
            let h = parse_partition(&holes)?;
            let (sq, cert) = construct_ils(n, h.parts())?;
            cert.check(&sq).map_err(|e| Fail(EXIT_INTERNAL, format!("construction failed verification: {e}")))?;
            let json = ConstructionJson::new(&sq, h.parts(), &cert, None)?;
            emit(&sq, json, format);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
