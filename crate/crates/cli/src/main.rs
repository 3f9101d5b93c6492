use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ftdo::generate::gnm_connected;
use ftdo::persist::{digest_hex, graph_digest, read_oracle, to_bytes};
use ftdo::tables::entry_count;
use ftdo::{verify_instance, BuildOptions, Distance, FailureSet, Graph, Oracle, QueryConfig, VerifyMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Exact distances in weighted graphs under up to d edge failures.
#[derive(Parser)]
#[command(name = "ftdo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a graph and write the oracle file.
    Build(BuildArgs),
    /// Answer one distance query from an oracle file.
    Query(QueryArgs),
    /// Check a freshly built oracle against brute force.
    Verify(VerifyArgs),
    /// Generate a random connected graph.
    Gen(GenArgs),
    /// Measure build cost, file size and query work across budgets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    #[arg(short = 'd', value_parser = clap::value_parser!(u32).range(1..))]
    d: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(short = 'o', long = "oracle")]
    oracle: PathBuf,
    #[arg(short = 's')]
    s: usize,
    #[arg(short = 't')]
    t: usize,
    /// Failed edge given by its endpoints, e.g. `1-2`. Repeatable.
    #[arg(long = "fail", value_parser = parse_pair)]
    fail: Vec<(usize, usize)>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    #[arg(short = 'd', value_parser = clap::value_parser!(u32).range(1..))]
    d: u32,
    /// Every ordered pair against every failure set (the default).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Check this many random instances instead.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gnm,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'm')]
    m: usize,
    #[arg(long)]
    wmax: u64,
    #[arg(long)]
    seed: u64,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dmin: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dmax: u32,
    #[arg(long)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').ok_or_else(|| format!("expected a-b, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn progress_line(done: usize, total: usize) {
    eprint!("\rfailure sets {done}/{total}");
    if done == total {
        eprintln!();
    }
}

fn build(args: BuildArgs) -> Result<ExitCode> {
    let g = load_graph(&args.graph)?;
    let n = g.vertex_count();
    let start = Instant::now();
    let oracle = Oracle::build(
        g,
        args.d as usize,
        args.seed,
        BuildOptions {
            progress: Some(&progress_line),
            ..BuildOptions::default()
        },
    )?;
    let bytes = to_bytes(&oracle)?;
    fs::write(&args.out, &bytes).with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());

    let entries = oracle.tables().len();
    assert_eq!(entries as u128, entry_count(n));
    println!("entries: {entries}");
    println!("failure sets: {}", oracle.tables().catalog().len());
    println!("seed: {}", oracle.seed());
    println!("bytes: {}", bytes.len());
    println!("digest: {}", digest_hex(&graph_digest(oracle.graph())));
    Ok(ExitCode::SUCCESS)
}

fn query(args: QueryArgs) -> Result<ExitCode> {
    let file = fs::File::open(&args.oracle).with_context(|| format!("opening {}", args.oracle.display()))?;
    let oracle = read_oracle(std::io::BufReader::new(file), None)
        .with_context(|| format!("loading {}", args.oracle.display()))?;
    let d = FailureSet::from_endpoints(oracle.graph(), args.fail.iter().copied())?;
    let trace = oracle.query_traced(args.s, args.t, &d, QueryConfig::default())?;
    let distance = trace.distance();
    if args.json {
        let value = match distance {
            Distance::Finite(x) => json!(x),
            Distance::Unreachable => json!("UNREACHABLE"),
        };
        let out = json!({
            "s": args.s,
            "t": args.t,
            "failures": args.fail.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "distance": value,
            "lookups": trace.counters.lookups,
            "depth": trace.max_depth,
            "max_hitset": trace.max_hits,
        });
        println!("{out}");
    } else {
        println!("{distance}");
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = load_graph(&args.graph)?;
    let digest = digest_hex(&graph_digest(&g));
    let oracle = Oracle::build(g, args.d as usize, args.seed, BuildOptions::default())?;
    let mode = match args.samples {
        Some(samples) => VerifyMode::Sampled {
            samples,
            seed: args.seed,
        },
        None => VerifyMode::Exhaustive,
    };
    let start = Instant::now();
    let report = verify_instance(&oracle, mode);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    println!("digest: {digest}");
    println!("{report}");
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let g = match args.model {
        Model::Gnm => gnm_connected(args.n, args.m, args.wmax, args.seed)?,
    };
    fs::write(&args.out, g.emit()).with_context(|| format!("writing {}", args.out.display()))?;
    println!("n={} m={} digest: {}", args.n, args.m, digest_hex(&graph_digest(&g)));
    Ok(ExitCode::SUCCESS)
}

fn binomial(m: usize, k: usize) -> u128 {
    (0..k as u128).fold(1, |acc, i| acc * (m as u128 - i) / (i + 1))
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    if args.dmax < args.dmin {
        bail!("--dmax {} is below --dmin {}", args.dmax, args.dmin);
    }
    let g = load_graph(&args.graph)?;
    let (n, m) = (g.vertex_count(), g.edge_count());
    println!("graph: n={n} m={m} 4n⁴={}", entry_count(n));
    println!(
        "{:>3} {:>10} {:>8} {:>10} {:>10} {:>9} {:>9} {:>8} {:>7} {:>9}",
        "d", "C(m,d)", "sets", "entries", "bytes", "lookups~", "lookups^", "|H|~", "|H|^", "depth^"
    );
    eprintln!("{:>3} {:>12} {:>10} {:>10}", "d", "build ms", "×prev", "C ratio");
    let mut prev: Option<(f64, u128)> = None;
    for d in args.dmin as usize..=args.dmax as usize {
        let start = Instant::now();
        let oracle = Oracle::build(g.clone(), d, args.seed, BuildOptions::default())?;
        let secs = start.elapsed().as_secs_f64();
        let bytes = to_bytes(&oracle)?.len();

        let catalog = oracle.tables().catalog();
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let (mut lookups, mut max_lookups, mut hit_total, mut hitsets, mut max_hits, mut max_depth) =
            (0u64, 0u64, 0usize, 0usize, 0usize, 0usize);
        let queries = if n >= 2 { args.queries } else { 0 };
        for _ in 0..queries {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            let set = catalog.get(rng.gen_range(0..catalog.len()));
            let trace = oracle.query_traced(
                u,
                v,
                set,
                QueryConfig {
                    record_hitsets: true,
                    ..QueryConfig::default()
                },
            )?;
            lookups += trace.counters.lookups;
            max_lookups = max_lookups.max(trace.counters.lookups);
            max_depth = max_depth.max(trace.max_depth);
            for rec in &trace.hitsets {
                hitsets += 1;
                hit_total += rec.outcome.hits.len();
                max_hits = max_hits.max(rec.outcome.hits.len());
            }
        }
        let mean = |total: f64, k: usize| if k == 0 { 0.0 } else { total / k as f64 };
        let c = binomial(m, d);
        println!(
            "{d:>3} {c:>10} {:>8} {:>10} {bytes:>10} {:>9.2} {max_lookups:>9} {:>8.2} {max_hits:>7} {max_depth:>9}",
            catalog.len(),
            oracle.tables().len(),
            mean(lookups as f64, queries),
            mean(hit_total as f64, hitsets),
        );
        let (ratio, c_ratio) = match prev {
            Some((p, pc)) => (format!("{:.2}", secs / p), format!("{:.2}", c as f64 / pc as f64)),
            None => ("-".into(), "-".into()),
        };
        eprintln!("{d:>3} {:>12.2} {ratio:>10} {c_ratio:>10}", secs * 1e3);
        prev = Some((secs, c));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Query(a) => query(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
