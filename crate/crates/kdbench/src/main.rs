//! Thin CLI over the benchmark workbench.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use kdbench::bench::{
    run_benchmark, run_sweep, write_csv, write_plot_data, Algorithm, BenchParams, BenchRecord,
    SweepKind,
};
use kdbench::error::{KdError, Result};
use kdbench::mt::DEFAULT_SEED;
use kdbench::registration::PartitionMode;

#[derive(Debug, Clone, Copy)]
enum AlgorithmArg {
    One(Algorithm),
    All,
}

impl AlgorithmArg {
    fn list(self) -> Vec<Algorithm> {
        match self {
            AlgorithmArg::One(a) => vec![a],
            AlgorithmArg::All => Algorithm::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for AlgorithmArg {
    type Err = KdError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(AlgorithmArg::All)
        } else {
            Ok(AlgorithmArg::One(s.parse()?))
        }
    }
}

/// Accepts a plain integer or a power of two written as `2^20`.
fn parse_n(s: &str) -> Result<usize> {
    let value = if let Some(exp) = s.strip_prefix("2^") {
        let exp: u32 = exp
            .parse()
            .map_err(|e| KdError::InvalidInput(format!("bad exponent in {s:?}: {e}")))?;
        1usize
            .checked_shl(exp)
            .ok_or_else(|| KdError::InvalidInput(format!("2^{exp} overflows usize")))?
    } else {
        s.parse::<usize>()
            .map_err(|e| KdError::InvalidInput(format!("bad n {s:?}: {e}")))?
    };
    if value == 0 {
        return Err(KdError::InvalidInput("n must be >= 1".into()));
    }
    Ok(value)
}

/// An inclusive `a..b` sweep range.
#[derive(Debug, Clone, Copy)]
struct Range {
    lo: usize,
    hi: usize,
}

impl std::str::FromStr for Range {
    type Err = KdError;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| KdError::InvalidInput(format!("range {s:?} is not of the form a..b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| KdError::InvalidInput(format!("bad range bound {t:?}: {e}")))
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            return Err(KdError::InvalidInput(format!(
                "range {s:?} is empty (lower bound exceeds upper)"
            )));
        }
        Ok(Range { lo, hi })
    }
}

/// Benchmark balanced k-d tree construction algorithms.
#[derive(Debug, Parser)]
#[command(name = "kdbench", disable_help_subcommand = true)]
struct Cli {
    /// Algorithm to benchmark: medians, presort, registration, or all.
    #[arg(long, default_value = "all")]
    algorithm: AlgorithmArg,

    /// Dataset size: a plain integer or a power of two such as 2^20.
    #[arg(long, default_value = "2^16", value_parser = parse_n)]
    n: usize,

    /// Tuple dimensionality (>= 2).
    #[arg(long, default_value_t = 3)]
    k: usize,

    /// Thread budget handed to the builders.
    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Timed build repetitions per configuration.
    #[arg(long, default_value_t = 10)]
    iterations: usize,

    /// Dataset generator seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Registration partition mode: single or dual.
    #[arg(long, default_value = "single")]
    mode: PartitionMode,

    /// Allocate auxiliary arrays once, outside the timed region.
    #[arg(long)]
    preallocate: bool,

    /// Sweep one parameter (n, threads, or k) instead of a single run.
    #[arg(long)]
    sweep: Option<SweepKind>,

    /// Inclusive sweep range a..b. For an n sweep the bounds are base-2
    /// exponents (4..8 means n in 16, 32, 64, 128, 256); for threads and
    /// k they are the values themselves.
    #[arg(long)]
    range: Option<Range>,

    /// Write results as CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// Also write plot-ready columns (x then one total-time column per
    /// algorithm) to this path. Requires --sweep.
    #[arg(long)]
    emit_plot_data: Option<std::path::PathBuf>,
}

fn sweep_values(kind: SweepKind, range: Range) -> Result<Vec<usize>> {
    let values: Vec<usize> = match kind {
        SweepKind::N => {
            if range.hi >= usize::BITS as usize {
                return Err(KdError::InvalidInput(format!(
                    "n-sweep exponent {} is too large",
                    range.hi
                )));
            }
            (range.lo..=range.hi).map(|e| 1usize << e).collect()
        }
        SweepKind::Threads | SweepKind::K => (range.lo..=range.hi).collect(),
    };
    if values.iter().any(|&v| v == 0) {
        return Err(KdError::InvalidInput("swept values must be >= 1".into()));
    }
    Ok(values)
}

fn run(cli: &Cli) -> Result<()> {
    let params = BenchParams {
        n: cli.n,
        k: cli.k,
        threads: cli.threads,
        iterations: cli.iterations,
        seed: cli.seed,
        mode: cli.mode,
        preallocate: cli.preallocate,
    };
    let algorithms = cli.algorithm.list();

    let records: Vec<BenchRecord> = match cli.sweep {
        Some(kind) => {
            let range = cli.range.ok_or_else(|| {
                KdError::InvalidInput("--sweep requires --range a..b".into())
            })?;
            run_sweep(&algorithms, &params, kind, &sweep_values(kind, range)?)?
        }
        None => {
            if cli.range.is_some() {
                return Err(KdError::InvalidInput(
                    "--range only applies together with --sweep".into(),
                ));
            }
            let mut out = Vec::with_capacity(algorithms.len());
            for &alg in &algorithms {
                out.push(run_benchmark(alg, &params)?);
            }
            out
        }
    };

    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_csv(&mut w, &records)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write_csv(&mut w, &records)?;
        }
    }

    if let Some(path) = &cli.emit_plot_data {
        let kind = cli.sweep.ok_or_else(|| {
            KdError::InvalidInput("--emit-plot-data requires --sweep".into())
        })?;
        let mut w = BufWriter::new(File::create(path)?);
        write_plot_data(&mut w, &records, kind)?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version by "erroring" with a zero code
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kdbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
