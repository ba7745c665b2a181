//! Benchmark execution: deterministic data generation, per-phase wall-clock
//! timing over repeated builds, mean / sample-standard-deviation statistics,
//! and CSV / plot-data emission.

use std::fmt;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::datagen::{generate_tuples, GenSpec};
use crate::error::{KdError, Result};
use crate::medians::{build_medians_from_sorted, MedianConfig};
use crate::presort::{build_presort_from_arrays, presort_index_arrays_into, IndexArraySet};
use crate::registration::{
    build_final_array, build_tree_from_f, init_registration, partition_all, presort_dense_arrays,
    PartitionMode, RegistrationState,
};
use crate::sort::presort_and_dedup_into;
use crate::tree::{verify_tree, KdTree};
use crate::tuple::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Medians,
    Presort,
    Registration,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Medians,
        Algorithm::Presort,
        Algorithm::Registration,
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::Medians => "medians",
            Algorithm::Presort => "presort",
            Algorithm::Registration => "registration",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = KdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "medians" => Ok(Algorithm::Medians),
            "presort" => Ok(Algorithm::Presort),
            "registration" => Ok(Algorithm::Registration),
            other => Err(KdError::InvalidInput(format!(
                "unknown algorithm {other:?} (expected medians, presort, or registration)"
            ))),
        }
    }
}

/// Mean and sample standard deviation of one timed phase, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    pub mean_s: f64,
    pub sd_s: f64,
}

impl PhaseStats {
    fn from_durations(samples: &[Duration]) -> PhaseStats {
        let secs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        let (mean_s, sd_s) = mean_and_sample_sd(&secs);
        PhaseStats { mean_s, sd_s }
    }
}

/// Mean and sample (n-1 denominator) standard deviation.
pub fn mean_and_sample_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One timed benchmark configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub k: usize,
    pub threads: usize,
    pub mode: PartitionMode,
    pub iterations: usize,
    pub sort: PhaseStats,
    pub build: PhaseStats,
    pub alloc: PhaseStats,
    pub verify: PhaseStats,
    pub total: PhaseStats,
    /// t1 / tn within a thread sweep; 1.0 outside one.
    pub scalability: f64,
}

/// Fixed parameters for a benchmark run.
#[derive(Debug, Clone, Copy)]
pub struct BenchParams {
    pub n: usize,
    pub k: usize,
    pub threads: usize,
    pub iterations: usize,
    pub seed: u64,
    pub mode: PartitionMode,
    pub preallocate: bool,
}

impl BenchParams {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(KdError::InvalidInput("iterations must be >= 1".into()));
        }
        if self.threads == 0 {
            return Err(KdError::InvalidInput("thread budget must be >= 1".into()));
        }
        if self.mode == PartitionMode::Dual && self.threads < 2 {
            return Err(KdError::InvalidInput(
                "dual partition mode requires a thread budget of at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Per-algorithm buffer management and build phases. `alloc` recreates the
/// auxiliary arrays, `sort` fills them, `build` produces the tree.
trait Runner {
    fn alloc(&mut self);
    fn sort(&mut self, threads: usize);
    fn build(&mut self, threads: usize) -> Result<KdTree>;
}

struct MediansRunner {
    ds: Arc<Dataset>,
    cfg: MedianConfig,
    ids: Vec<usize>,
    scratch: Vec<usize>,
}

impl Runner for MediansRunner {
    fn alloc(&mut self) {
        let n = self.ds.len();
        self.ids = Vec::with_capacity(n);
        self.scratch = Vec::with_capacity(n);
    }

    fn sort(&mut self, threads: usize) {
        presort_and_dedup_into(&self.ds, &mut self.ids, &mut self.scratch, threads);
    }

    fn build(&mut self, threads: usize) -> Result<KdTree> {
        build_medians_from_sorted(self.ds.clone(), &mut self.ids, threads, &self.cfg)
    }
}

struct PresortRunner {
    ds: Arc<Dataset>,
    set: IndexArraySet,
}

impl Runner for PresortRunner {
    fn alloc(&mut self) {
        self.set = IndexArraySet::with_capacity(self.ds.len(), self.ds.k());
    }

    fn sort(&mut self, threads: usize) {
        presort_index_arrays_into(&self.ds, &mut self.set, threads)
            .expect("presort over a validated dataset");
    }

    fn build(&mut self, threads: usize) -> Result<KdTree> {
        build_presort_from_arrays(self.ds.clone(), &mut self.set, threads, &mut None)
    }
}

struct RegistrationRunner {
    ds: Arc<Dataset>,
    mode: PartitionMode,
    set: IndexArraySet,
    state: RegistrationState,
}

impl Runner for RegistrationRunner {
    fn alloc(&mut self) {
        let n = self.ds.len();
        self.set = IndexArraySet::with_capacity(n, self.ds.k());
        self.state = init_registration(n).expect("n >= 1");
    }

    fn sort(&mut self, threads: usize) {
        presort_index_arrays_into(&self.ds, &mut self.set, threads)
            .expect("presort over a validated dataset");
    }

    fn build(&mut self, threads: usize) -> Result<KdTree> {
        if self.set.len() != self.ds.len() {
            // duplicates were removed, so addresses are not dense ids;
            // fall back to the dense-mapped pipeline
            let (arrays, dense_to_addr) = presort_dense_arrays(&self.ds, threads)?;
            let mut state = init_registration(dense_to_addr.len())?;
            partition_all(&mut state, &arrays, self.mode)?;
            let f = build_final_array(&state)?;
            let f_addr: Vec<usize> = f.into_iter().map(|d| dense_to_addr[d]).collect();
            return build_tree_from_f(&f_addr, self.ds.clone());
        }
        self.state.reset();
        partition_all(&mut self.state, &self.set.arrays, self.mode)?;
        let f = build_final_array(&self.state)?;
        build_tree_from_f(&f, self.ds.clone())
    }
}

/// Builds the tree `iterations` times on identical generated data,
/// verifying every iteration, and returns per-phase statistics.
pub fn run_benchmark(algorithm: Algorithm, params: &BenchParams) -> Result<BenchRecord> {
    params.validate()?;
    let gen = GenSpec::new(params.n, params.k, params.seed)?;
    let ds = Arc::new(generate_tuples(gen));
    run_benchmark_on(algorithm, ds, params)
}

/// Same as [`run_benchmark`] but over a caller-supplied dataset.
pub fn run_benchmark_on(
    algorithm: Algorithm,
    ds: Arc<Dataset>,
    params: &BenchParams,
) -> Result<BenchRecord> {
    params.validate()?;
    if ds.is_empty() {
        return Err(KdError::InvalidInput("dataset is empty".into()));
    }
    let mut runner: Box<dyn Runner> = match algorithm {
        Algorithm::Medians => Box::new(MediansRunner {
            ds: ds.clone(),
            cfg: MedianConfig::default(),
            ids: Vec::new(),
            scratch: Vec::new(),
        }),
        Algorithm::Presort => Box::new(PresortRunner {
            ds: ds.clone(),
            set: IndexArraySet::with_capacity(0, ds.k()),
        }),
        Algorithm::Registration => Box::new(RegistrationRunner {
            ds: ds.clone(),
            mode: params.mode,
            set: IndexArraySet::with_capacity(0, ds.k()),
            state: init_registration(1).expect("placeholder state"),
        }),
    };

    let mut alloc_samples = Vec::new();
    let mut sort_samples = Vec::with_capacity(params.iterations);
    let mut build_samples = Vec::with_capacity(params.iterations);
    let mut verify_samples = Vec::with_capacity(params.iterations);
    let mut total_samples = Vec::with_capacity(params.iterations);

    if params.preallocate {
        let t = Instant::now();
        runner.alloc();
        alloc_samples.push(t.elapsed());
    }

    for iteration in 0..params.iterations {
        let alloc_d = if params.preallocate {
            Duration::ZERO
        } else {
            let t = Instant::now();
            runner.alloc();
            let d = t.elapsed();
            alloc_samples.push(d);
            d
        };

        let t = Instant::now();
        runner.sort(params.threads);
        let sort_d = t.elapsed();

        let t = Instant::now();
        let tree = runner.build(params.threads)?;
        let build_d = t.elapsed();

        let t = Instant::now();
        let report = verify_tree(&tree);
        let verify_d = t.elapsed();
        if !report.is_valid() {
            let first = &report.violations[0];
            return Err(KdError::Verification(format!(
                "iteration {iteration} of {algorithm} produced an invalid tree \
                 ({} violations; first: {})",
                report.violations.len(),
                first.message
            )));
        }

        sort_samples.push(sort_d);
        build_samples.push(build_d);
        verify_samples.push(verify_d);
        total_samples.push(alloc_d + sort_d + build_d + verify_d);
    }

    Ok(BenchRecord {
        algorithm,
        n: params.n,
        k: params.k,
        threads: params.threads,
        mode: params.mode,
        iterations: params.iterations,
        sort: PhaseStats::from_durations(&sort_samples),
        build: PhaseStats::from_durations(&build_samples),
        alloc: PhaseStats::from_durations(&alloc_samples),
        verify: PhaseStats::from_durations(&verify_samples),
        total: PhaseStats::from_durations(&total_samples),
        scalability: 1.0,
    })
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    N,
    Threads,
    K,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SweepKind::N => "n",
            SweepKind::Threads => "threads",
            SweepKind::K => "k",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SweepKind {
    type Err = KdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepKind::N),
            "threads" => Ok(SweepKind::Threads),
            "k" => Ok(SweepKind::K),
            other => Err(KdError::InvalidInput(format!(
                "unknown sweep {other:?} (expected n, threads, or k)"
            ))),
        }
    }
}

/// One record per grid point per algorithm. For a thread sweep the
/// scalability column is t1/tn per algorithm, with t1 the total mean at
/// the smallest swept thread count.
pub fn run_sweep(
    algorithms: &[Algorithm],
    base: &BenchParams,
    kind: SweepKind,
    values: &[usize],
) -> Result<Vec<BenchRecord>> {
    if values.is_empty() {
        return Err(KdError::InvalidInput("sweep range is empty".into()));
    }
    let mut records = Vec::with_capacity(values.len() * algorithms.len());
    for &v in values {
        for &alg in algorithms {
            let mut params = *base;
            match kind {
                SweepKind::N => params.n = v,
                SweepKind::Threads => params.threads = v,
                SweepKind::K => params.k = v,
            }
            records.push(run_benchmark(alg, &params)?);
        }
    }
    if kind == SweepKind::Threads {
        let base_threads = *values.iter().min().expect("non-empty");
        for alg in algorithms {
            let t1 = records
                .iter()
                .find(|r| r.algorithm == *alg && r.threads == base_threads)
                .map(|r| r.total.mean_s)
                .expect("reference record exists");
            for r in records
                .iter_mut()
                .filter(|r| r.algorithm == *alg)
            {
                r.scalability = t1 / r.total.mean_s;
            }
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "algorithm,n,k,threads,mode,iterations,\
sort_mean_s,sort_sd_s,build_mean_s,build_sd_s,alloc_mean_s,alloc_sd_s,\
verify_mean_s,verify_sd_s,total_mean_s,total_sd_s,scalability";

/// Writes records in the fixed CSV schema. Floats use the shortest
/// round-trip representation so parsing reproduces them exactly.
pub fn write_csv<W: Write>(w: &mut W, records: &[BenchRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.algorithm,
            r.n,
            r.k,
            r.threads,
            r.mode,
            r.iterations,
            r.sort.mean_s,
            r.sort.sd_s,
            r.build.mean_s,
            r.build.sd_s,
            r.alloc.mean_s,
            r.alloc.sd_s,
            r.verify.mean_s,
            r.verify.sd_s,
            r.total.mean_s,
            r.total.sd_s,
            r.scalability,
        )?;
    }
    Ok(())
}

/// Parses a file produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| KdError::InvalidInput("empty CSV".into()))?;
    if header.trim() != CSV_HEADER {
        return Err(KdError::InvalidInput("unexpected CSV header".into()));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 17 {
            return Err(KdError::InvalidInput(format!(
                "line {}: expected 17 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| KdError::InvalidInput(format!("line {}: {e}", lineno + 2)))
        };
        let parse_f64 = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| KdError::InvalidInput(format!("line {}: {e}", lineno + 2)))
        };
        records.push(BenchRecord {
            algorithm: fields[0].parse()?,
            n: parse_usize(fields[1])?,
            k: parse_usize(fields[2])?,
            threads: parse_usize(fields[3])?,
            mode: fields[4].parse()?,
            iterations: parse_usize(fields[5])?,
            sort: PhaseStats {
                mean_s: parse_f64(fields[6])?,
                sd_s: parse_f64(fields[7])?,
            },
            build: PhaseStats {
                mean_s: parse_f64(fields[8])?,
                sd_s: parse_f64(fields[9])?,
            },
            alloc: PhaseStats {
                mean_s: parse_f64(fields[10])?,
                sd_s: parse_f64(fields[11])?,
            },
            verify: PhaseStats {
                mean_s: parse_f64(fields[12])?,
                sd_s: parse_f64(fields[13])?,
            },
            total: PhaseStats {
                mean_s: parse_f64(fields[14])?,
                sd_s: parse_f64(fields[15])?,
            },
            scalability: parse_f64(fields[16])?,
        });
    }
    Ok(records)
}

/// Plot-ready columns: one row per swept value, one total-time column per
/// algorithm, whitespace separated for direct use by plotting tools.
pub fn write_plot_data<W: Write>(
    w: &mut W,
    records: &[BenchRecord],
    kind: SweepKind,
) -> Result<()> {
    let x_of = |r: &BenchRecord| match kind {
        SweepKind::N => r.n,
        SweepKind::Threads => r.threads,
        SweepKind::K => r.k,
    };
    let mut xs: Vec<usize> = Vec::new();
    let mut algs: Vec<Algorithm> = Vec::new();
    for r in records {
        if !xs.contains(&x_of(r)) {
            xs.push(x_of(r));
        }
        if !algs.contains(&r.algorithm) {
            algs.push(r.algorithm);
        }
    }
    write!(w, "# {kind}")?;
    for a in &algs {
        write!(w, " {a}")?;
    }
    writeln!(w)?;
    for &x in &xs {
        write!(w, "{x}")?;
        for &a in &algs {
            let y = records
                .iter()
                .find(|r| x_of(r) == x && r.algorithm == a)
                .map(|r| r.total.mean_s)
                .ok_or_else(|| {
                    KdError::InternalConsistency(format!(
                        "missing record for {a} at {kind} = {x}"
                    ))
                })?;
            write!(w, " {y:?}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
