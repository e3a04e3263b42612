use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use saddlepoint::instances::gen_gap_instance;
use saddlepoint::lifted::{find_unique_nash, NashOptions};
use saddlepoint::minimax::brute_force_unique_nash;
use saddlepoint::psne::find_psne;
use saddlepoint::swordfish::swordfish;
use saddlepoint::trials::{
    generate_instance, lower_median, p95, run_batch, seeded_rng, summarize, Algo, Family,
    TrialRecord, TrialSpec,
};
use saddlepoint::{MatrixInstance, Mode, OracleHandle, Scalar};

const EXIT_VERIFY: u8 = 2;
const EXIT_UNIQUENESS: u8 = 3;
const EXIT_USAGE: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn no_certificate(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VERIFY,
        message: message.into(),
    }
}

fn not_unique(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_UNIQUENESS,
        message: message.into(),
    }
}

#[derive(Parser)]
#[command(name = "saddlepoint", version, about = "Query-efficient saddle point and Nash equilibrium solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a matrix from a file and print the certificate
    Solve(SolveArgs),
    /// Run seeded trial batches and write one CSV row per trial
    Bench(BenchArgs),
    /// Generate an instance file with a ground-truth sidecar
    Gen(GenArgs),
    /// Aggregate a bench CSV into plot-ready tab-separated series
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix file: "rows cols" header line, then one line per row
    #[arg(long)]
    matrix: PathBuf,
    /// One of psne, swordfish, nash, brute
    #[arg(long)]
    algo: String,
    /// Failure probability for the randomized searches
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exact or float; defaults to SADDLEPOINT_MODE, then exact
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: String,
    /// Comma-separated sizes, e.g. 8,16,32
    #[arg(long)]
    n: String,
    /// Support size, where the family needs one
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed0: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Override the family's default algorithm
    #[arg(long)]
    algo: Option<String>,
    /// exact or float; defaults to SADDLEPOINT_MODE, then exact
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    /// Support size, where the family needs one
    #[arg(long)]
    k: Option<usize>,
    /// Gap family only: saddle margin, in (0, 1)
    #[arg(long, default_value = "1/4")]
    delta_gap: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix file to write; the truth sidecar gets ".truth.json" appended
    #[arg(long)]
    out: PathBuf,
    /// exact or float; defaults to SADDLEPOINT_MODE, then exact
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Bench CSV to aggregate
    #[arg(long = "in")]
    input: PathBuf,
    /// Tab-separated output path
    #[arg(long)]
    out: PathBuf,
    /// Confidence used for the randomized-search bound column
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Plotdata(args) => cmd_plotdata(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn resolve_mode(flag: Option<&str>) -> Result<Mode, Failure> {
    let text = match flag {
        Some(text) => text.to_string(),
        None => match std::env::var("SADDLEPOINT_MODE") {
            Ok(text) => text,
            Err(_) => return Ok(Mode::Exact),
        },
    };
    Mode::from_str(&text).map_err(|_| usage(format!("unknown mode \"{text}\" (exact or float)")))
}

fn parse_algo(text: &str) -> Result<Algo, Failure> {
    Algo::from_str(text)
        .map_err(|_| usage(format!("unknown algorithm \"{text}\" (psne, swordfish, nash, brute)")))
}

fn parse_family(text: &str) -> Result<Family, Failure> {
    Family::from_str(text).map_err(|_| usage(format!("unknown family \"{text}\"")))
}

fn default_algo(family: Family) -> Algo {
    match family {
        Family::PlantedPsne | Family::Gap => Algo::Psne,
        Family::PlantedSupport | Family::Thm1Lower | Family::IdentityPerturbed => Algo::Nash,
        Family::RandomUnique => Algo::Brute,
    }
}

fn read_matrix(path: &Path, mode: Mode) -> Result<MatrixInstance, Failure> {
    let file =
        File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))?;
    MatrixInstance::read_from(BufReader::new(file), mode)
        .map_err(|e| usage(format!("cannot parse {}: {e}", path.display())))
}

/// Queries the full row and column of the candidate and certifies the
/// strict saddle inequalities on what came back.
fn certify_strict_saddle(oracle: &mut OracleHandle, i: usize, j: usize) -> bool {
    let (n_rows, n_cols) = (oracle.matrix().n_rows(), oracle.matrix().n_cols());
    let pivot = oracle.query_entry(i, j);
    (0..n_rows).all(|r| r == i || oracle.query_entry(r, j).lt_raw(&pivot))
        && (0..n_cols).all(|c| c == j || oracle.query_entry(i, c).gt_raw(&pivot))
}

fn report_pure(oracle: &mut OracleHandle, i: usize, j: usize) -> Result<(), Failure> {
    if !certify_strict_saddle(oracle, i, j) {
        return Err(no_certificate("no unique PSNE certified"));
    }
    let value = oracle.query_entry(i, j);
    println!(
        "PSNE ({},{})  value {}  queries {}",
        i + 1,
        j + 1,
        value,
        oracle.distinct_query_count()
    );
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let mode = resolve_mode(args.mode.as_deref())?;
    let algo = parse_algo(&args.algo)?;
    if !(args.delta > 0.0 && args.delta < 1.0) {
        return Err(usage("delta must lie in (0, 1)"));
    }
    let matrix = read_matrix(&args.matrix, mode)?;
    if matrix.n_rows() != matrix.n_cols() {
        return Err(usage(format!(
            "need a square matrix, got {}x{}",
            matrix.n_rows(),
            matrix.n_cols()
        )));
    }
    let mut oracle = OracleHandle::new(matrix);
    let mut rng = seeded_rng(args.seed);
    match algo {
        Algo::Psne => {
            let (i, j) = find_psne(&mut oracle, args.delta, &mut rng);
            report_pure(&mut oracle, i, j)
        }
        Algo::Swordfish => match swordfish(&mut oracle) {
            Ok((i, j)) => report_pure(&mut oracle, i, j),
            Err(e) => Err(not_unique(format!("no unique PSNE certified: {e}"))),
        },
        Algo::Nash => {
            match find_unique_nash(&mut oracle, args.delta, &mut rng, &NashOptions::default()) {
                Ok((cert, breakdown)) => {
                    println!("{}", cert.to_json(Some(breakdown.total)));
                    println!(
                        "queries {}  probe {}  pivot {}  verification {}  support {}",
                        breakdown.total,
                        breakdown.probe,
                        breakdown.pivot,
                        breakdown.verification,
                        breakdown.stage_reached
                    );
                    Ok(())
                }
                Err(e) => Err(not_unique(format!("no equilibrium certified: {e}"))),
            }
        }
        Algo::Brute => {
            let (n_rows, n_cols) = (oracle.matrix().n_rows(), oracle.matrix().n_cols());
            for i in 0..n_rows {
                for j in 0..n_cols {
                    oracle.query_entry(i, j);
                }
            }
            match brute_force_unique_nash(oracle.matrix(), true) {
                Ok(cert) => {
                    println!("{}", cert.to_json(Some(oracle.distinct_query_count())));
                    Ok(())
                }
                Err(e) => Err(not_unique(format!("no unique equilibrium: {e}"))),
            }
        }
    }
}

fn bound_for(algo: Algo, n: usize, delta: f64) -> Option<f64> {
    match algo {
        Algo::Swordfish => Some((3 * n - 2) as f64),
        Algo::Psne => Some(8.0 * n as f64 * (4.0 * (n * n) as f64 / delta).log2()),
        Algo::Nash | Algo::Brute => None,
    }
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Failure> {
    let sizes: Result<Vec<usize>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect();
    let sizes = sizes.map_err(|_| usage(format!("bad size list \"{text}\"")))?;
    if sizes.is_empty() || sizes.iter().any(|&n| n == 0) {
        return Err(usage("sizes must be positive"));
    }
    Ok(sizes)
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let mode = resolve_mode(args.mode.as_deref())?;
    let family = parse_family(&args.family)?;
    let algo = match &args.algo {
        Some(text) => parse_algo(text)?,
        None => default_algo(family),
    };
    if family.needs_k() && args.k.is_none() {
        return Err(usage(format!("family {family} needs --k")));
    }
    if args.trials == 0 {
        return Err(usage("need at least one trial"));
    }
    let sizes = parse_sizes(&args.n)?;

    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;
    for &n in &sizes {
        let spec = TrialSpec {
            family,
            n,
            k: args.k,
            algo,
            delta: args.delta,
            mode,
        };
        let records = run_batch(&spec, args.seed0, args.trials);
        for record in &records {
            writer
                .serialize(record)
                .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;
        }
        let bound = bound_for(algo, n, args.delta);
        let summary = summarize(&records, bound);
        let bound_text = bound.map_or_else(|| "-".to_string(), |b| format!("{b:.3}"));
        println!(
            "family={family} n={n} algo={algo} trials={} successes={} rate={:.4} \
             wilson=[{:.4},{:.4}] queries median={} p95={} max={} bound={bound_text} violations={}",
            summary.trials,
            summary.successes,
            summary.success_rate,
            summary.wilson_low,
            summary.wilson_high,
            summary.median_queries,
            summary.p95_queries,
            summary.max_queries,
            summary.bound_violations
        );
    }
    writer
        .flush()
        .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let mode = resolve_mode(args.mode.as_deref())?;
    let family = parse_family(&args.family)?;
    if family.needs_k() && args.k.is_none() {
        return Err(usage(format!("family {family} needs --k")));
    }
    if args.n == 0 {
        return Err(usage("need n >= 1"));
    }
    let mut rng = seeded_rng(args.seed);
    let (matrix, truth) = if family == Family::Gap {
        let width = Scalar::parse(&args.delta_gap, mode)
            .map_err(|e| usage(format!("bad gap width: {e}")))?;
        let one = Scalar::from_int(1, mode);
        if width.is_zero() || width.is_negative() || !width.lt_raw(&one) {
            return Err(usage("gap width must lie in (0, 1)"));
        }
        gen_gap_instance(args.n, &width, mode)
    } else {
        let spec = TrialSpec {
            family,
            n: args.n,
            k: args.k,
            algo: default_algo(family),
            delta: 0.1,
            mode,
        };
        generate_instance(&spec, &mut rng)
    };

    let file = File::create(&args.out)
        .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;
    matrix
        .write_to(BufWriter::new(file))
        .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;

    let mut sidecar_path = args.out.clone().into_os_string();
    sidecar_path.push(".truth.json");
    let sidecar_path = PathBuf::from(sidecar_path);
    let certificate = truth
        .certificate
        .as_ref()
        .map(|cert| {
            serde_json::from_str::<serde_json::Value>(&cert.to_json(None))
                .expect("certificate JSON round-trips")
        })
        .unwrap_or(serde_json::Value::Null);
    let doc = serde_json::json!({
        "family": family.to_string(),
        "n": args.n,
        "k": args.k,
        "seed": args.seed,
        "mode": mode.to_string(),
        "certificate": certificate,
    });
    let sidecar = File::create(&sidecar_path)
        .map_err(|e| usage(format!("cannot write {}: {e}", sidecar_path.display())))?;
    let mut sidecar = BufWriter::new(sidecar);
    serde_json::to_writer_pretty(&mut sidecar, &doc)
        .and_then(|()| writeln!(sidecar).map_err(serde_json::Error::io))
        .map_err(|e| usage(format!("cannot write {}: {e}", sidecar_path.display())))?;
    println!(
        "wrote {} and {}",
        args.out.display(),
        sidecar_path.display()
    );
    Ok(())
}

fn cmd_plotdata(args: &PlotdataArgs) -> Result<(), Failure> {
    let file = File::open(&args.input)
        .map_err(|e| usage(format!("cannot open {}: {e}", args.input.display())))?;
    let mut rows: Vec<TrialRecord> = Vec::new();
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    for row in reader.deserialize() {
        let record: TrialRecord =
            row.map_err(|e| usage(format!("bad row in {}: {e}", args.input.display())))?;
        rows.push(record);
    }

    let mut groups: Vec<((String, String, usize), Vec<usize>)> = Vec::new();
    for row in &rows {
        let key = (row.family.clone(), row.algo.clone(), row.n);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, queries)) => queries.push(row.queries),
            None => groups.push((key, vec![row.queries])),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));

    let out = File::create(&args.out)
        .map_err(|e| usage(format!("cannot write {}: {e}", args.out.display())))?;
    let mut out = BufWriter::new(out);
    let write_failed = |e: std::io::Error| usage(format!("cannot write: {e}"));
    writeln!(out, "family\talgo\tn\tmedian_queries\tp95_queries\tbound").map_err(write_failed)?;
    for ((family, algo, n), queries) in &groups {
        let bound_text = Algo::from_str(algo)
            .ok()
            .and_then(|algo| bound_for(algo, *n, args.delta))
            .map_or_else(String::new, |b| format!("{b:.16e}"));
        writeln!(
            out,
            "{family}\t{algo}\t{n}\t{}\t{}\t{bound_text}",
            lower_median(queries),
            p95(queries)
        )
        .map_err(write_failed)?;
    }
    out.flush().map_err(write_failed)?;
    Ok(())
}
