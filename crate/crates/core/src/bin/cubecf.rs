use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use cubecf::cf::{expand_sigma, oracle_expand};
use cubecf::criteria::{
    appropriate_basis, appropriate_scan, check_soundness, coeff_range, svp_detect, svp_scan,
    write_appropriate, write_coeff_records, write_detections, Context, DEFAULT_WINDOW,
};
use cubecf::kuzmin::{scan_df, write_csv as write_kuzmin};
use cubecf::selfcheck::SelfCheck;
use cubecf::{Error, Precision};

#[derive(Parser, Debug)]
#[command(
    name = "cubecf",
    version,
    about = "Continued fraction of the cube root of two minus one, and its lattice bases"
)]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(30..=100_000))]
    precision: u32,

    /// Write data to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Partial quotients and convergents b_0..b_N.
    Cf {
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Cross-check against the integer cube-root expansion.
        #[arg(long)]
        oracle: bool,
    },
    /// Coefficient vectors of (0, p, -q) for a range of bases.
    Table1 {
        #[arg(long, default_value_t = BigInt::from(1251), allow_negative_numbers = true)]
        p: BigInt,
        #[arg(long, default_value_t = BigInt::from(4813))]
        q: BigInt,
        #[arg(long, default_value_t = 8, allow_negative_numbers = true)]
        j_lo: i64,
        #[arg(long, default_value_t = 13, allow_negative_numbers = true)]
        j_hi: i64,
    },
    /// Appropriate-basis lengths for the first N convergents.
    Lengths {
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
    },
    /// Shortest-vector detection: a trace for one j, or a scan over a range.
    Svp {
        /// Single index; prints the reduction trace.
        #[arg(long, conflicts_with_all = ["j_lo", "j_hi"])]
        j: Option<i64>,
        #[arg(long, default_value_t = 2)]
        j_lo: i64,
        #[arg(long, default_value_t = 1000)]
        j_hi: i64,
    },
    /// Chi-square test of partial quotients against the Kuzmin law.
    Kuzmin {
        #[arg(long, default_value_t = 20_000)]
        n_samples: usize,
        /// Smallest group count R (df = R - 1).
        #[arg(long, default_value_t = 2)]
        r_min: usize,
        #[arg(long, default_value_t = 41)]
        r_max: usize,
    },
    /// Spectral and bound constants.
    Constants {
        #[arg(long, default_value_t = 6)]
        decimals: usize,
    },
    /// Run the invariant suite.
    Selfcheck {
        #[arg(long, default_value_t = 1000)]
        length_prefix: usize,
    },
}

enum Failure {
    Usage(String),
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            Error::Violation(_) | Error::Io(_) => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Assertion(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Assertion(m)) => {
            eprintln!("failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let prec = Precision::digits(cli.precision);
    let mut data = Vec::new();
    let mut verdict = Ok(());
    match &cli.cmd {
        Cmd::Cf { n_max, oracle } => {
            let e = expand_sigma(*n_max)?;
            if *oracle {
                let o = oracle_expand(*n_max)?;
                let ours = e.quotients();
                if o.quotients.len() < ours.len() || o.quotients[..ours.len()] != ours[..] {
                    verdict = Err(Failure::Assertion(
                        "polynomial and cube-root expansions disagree".into(),
                    ));
                } else {
                    eprintln!(
                        "oracle agrees on {} partial quotients ({} digits)",
                        ours.len(),
                        o.digits
                    );
                }
            }
            e.write_csv(&mut data)?;
        }
        Cmd::Table1 { p, q, j_lo, j_hi } => {
            let ctx = Context::new(prec)?;
            write_coeff_records(&coeff_range(p, q, *j_lo, *j_hi, &ctx)?, &mut data)?;
            if let Ok(a) = appropriate_basis(p, q, DEFAULT_WINDOW, &ctx) {
                eprintln!(
                    "appropriate j = {} with |a'| = {:.6}",
                    a.record.j, a.record.len
                );
            }
        }
        Cmd::Lengths { n_max, window } => {
            let ctx = Context::new(prec)?;
            eprintln!("expanding {n_max} convergents");
            let e = expand_sigma(*n_max)?;
            eprintln!("searching appropriate bases");
            let rows = appropriate_scan(&e, *n_max, *window, &ctx)?;
            let max = rows
                .iter()
                .map(|r| r.record.len.to_f64())
                .fold(0.0, f64::max);
            let ext = rows.iter().filter(|r| r.extended).count();
            eprintln!("max |a'| = {max:.6}; {ext} windows extended");
            write_appropriate(&rows, &mut data)?;
        }
        Cmd::Svp { j: Some(j), .. } => {
            let ctx = Context::new(prec)?;
            let d = svp_detect(*j, &ctx)?;
            d.trace.write_csv(&mut data)?;
            eprintln!(
                "shortest {} -> {}/{}, |a'| = {:.6}, proven = {}, Delta = {}, bound = {}",
                d.a,
                d.p,
                d.q,
                d.len,
                d.proven,
                d.big_delta.to_fixed(6),
                d.b_bound
                    .map_or_else(|| "none".to_string(), |b| b.to_string())
            );
        }
        Cmd::Svp {
            j: None,
            j_lo,
            j_hi,
        } => {
            let ctx = Context::new(prec)?;
            eprintln!("scanning j = {j_lo}..={j_hi}");
            let rows = svp_scan(*j_lo, *j_hi, &ctx)?;
            let misses = rows.iter().filter(|r| r.convergent.is_none()).count();
            let proven = rows.iter().filter(|r| r.detection.proven).count();
            eprintln!("{misses} non-convergents, {proven} proven detections");
            if let Err(e) = check_soundness(&rows) {
                verdict = Err(e.into());
            }
            write_detections(&rows, &mut data)?;
        }
        Cmd::Kuzmin {
            n_samples,
            r_min,
            r_max,
        } => {
            eprintln!("expanding {n_samples} partial quotients");
            let q = expand_sigma((*n_samples).max(1))?.quotients();
            let rows = scan_df(&q, *r_min, *r_max)?;
            for r in rows.iter().filter(|r| !r.valid) {
                eprintln!(
                    "warning: R={} has an expected count of {:.2} < 5",
                    r.r, r.min_expected
                );
            }
            write_kuzmin(&rows, &mut data)?;
        }
        Cmd::Constants { decimals } => {
            let ctx = Context::new(prec)?;
            let (e, c) = (&ctx.eig, &ctx.consts);
            writeln!(data, "name,value")?;
            let rows = [
                ("theta_deg", e.theta_degrees()),
                ("M", e.m.clone()),
                ("rho", e.rho.clone()),
                ("a", c.a.clone()),
                ("b", c.b.clone()),
                ("x0", c.x0.clone()),
                ("x_prime", c.x_prime.clone()),
                ("x_prime_low", c.x_prime_low.clone()),
                ("H_x_prime", c.h_at_x_prime.clone()),
                ("t3_bound", c.t3_bound.clone()),
                ("a2_bound", c.a2_bound.clone()),
            ];
            for (name, v) in rows {
                writeln!(data, "{name},{}", v.to_fixed(*decimals))?;
            }
        }
        Cmd::Selfcheck { length_prefix } => {
            let suite = SelfCheck {
                precision: prec,
                length_prefix: *length_prefix,
                ..SelfCheck::default()
            };
            let results = suite.run();
            writeln!(data, "check,result,detail")?;
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(data, "{},{tag},{}", r.name, r.detail.replace(',', ";"))?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                verdict = Err(Failure::Assertion(format!(
                    "{failed} of {} checks failed",
                    results.len()
                )));
            }
        }
    }
    emit(cli, &data)?;
    verdict
}

fn emit(cli: &Cli, csv: &[u8]) -> io::Result<()> {
    let text = String::from_utf8_lossy(csv);
    let body = match cli.format {
        Format::Csv => text.into_owned(),
        Format::Pretty => pretty(&text),
    };
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(body.as_bytes())?;
            w.flush()
        }
        None => {
            let mut w = io::stdout().lock();
            w.write_all(body.as_bytes())?;
            w.flush()
        }
    }
}

/// Right-aligned columns from CSV text.
fn pretty(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
