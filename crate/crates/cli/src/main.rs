use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use presorted_core::harness::{bench, scaling_report, to_csv, Algorithm, Family, GeneratorSpec};
use presorted_core::io as pio;
use presorted_core::universe::{
    check_counting_bounds, enumerate_universe, refine_regions, Problem,
};
use presorted_core::{
    build_quadrant_tree, convex_hull, pareto_front, quicksort_entropy, timsort_entropy,
    truncated_quicksort, verify_hull, verify_pareto, BenchRecord, CostMeter, RegionKind,
};

#[derive(Parser)]
#[command(name = "presorted", about = "Adaptive sorting, Pareto front and convex hull tools", version)]
struct Cli {
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format for structured results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Sort,
    Pareto,
    Hull,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Sort => Algorithm::Sort,
            AlgoArg::Pareto => Algorithm::Pareto,
            AlgoArg::Hull => Algorithm::Hull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Pareto,
    Hull,
}

#[derive(Subcommand)]
enum Command {
    /// Sort a scalar list (one integer per line; stdin if no file given).
    Sort { input: Option<PathBuf> },
    /// Report quicksort and timsort entropies of a scalar list.
    Entropy { input: Option<PathBuf> },
    /// Compute the Pareto front of a point list with witnesses.
    Pareto {
        input: Option<PathBuf>,
        /// Write the witness list (one index per position, -1 on the front).
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Compute the convex hull of a point list with witnesses.
    Hull {
        input: Option<PathBuf>,
        /// Write the witness list (three indices per position, -1 -1 -1 on the hull).
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Exhaustively enumerate the universe of a small point set and region set.
    Enumerate {
        /// Point list file.
        points: PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Rectangle region file (xmin ymin xmax ymax per line).
        #[arg(long)]
        rects: Option<PathBuf>,
        /// Triangle region file (ax ay bx by cx cy per line).
        #[arg(long)]
        triangles: Option<PathBuf>,
        /// Also verify the counting bounds with exact integer arithmetic.
        #[arg(long)]
        check_bounds: bool,
    },
    /// Refine a rectangle region set along the quadrant recursion tree.
    Refine {
        points: PathBuf,
        #[arg(long)]
        rects: PathBuf,
    },
    /// Generate an input family deterministically from the global seed.
    Gen {
        /// sorted | reversed | interleaved-halves | evens-then-odds | runs:K |
        /// grid-random | circle-arc-clusters:ARCS,SIZE | pareto-regions:K |
        /// hull-regions:K
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Write the region set of geometric families here.
        #[arg(long)]
        regions: Option<PathBuf>,
    },
    /// Generate, run, verify and record instrumented benchmark runs.
    Bench {
        #[arg(long, value_enum)]
        algorithm: AlgoArg,
        /// Family spec, repeatable (same syntax as `gen --family`).
        #[arg(long = "family", required = true)]
        families: Vec<String>,
        /// Input size, repeatable.
        #[arg(long = "n", required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Run independent instances on worker threads (timings stay per-instance).
        #[arg(long)]
        parallel: bool,
    },
    /// Summarize benchmark CSV records into per-family scaling constants.
    Report { input: Option<PathBuf> },
}

enum AppError {
    /// Exit code 1: an algorithm output failed verification.
    Verify(String),
    /// Exit code 2: bad arguments or malformed input.
    Invalid(String),
}

fn invalid<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Invalid(e.to_string())
}

fn read_input(path: &Option<PathBuf>) -> Result<String, AppError> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(invalid),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).map_err(invalid)?;
            Ok(buf)
        }
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), AppError> {
    match output {
        Some(p) => fs::write(p, text).map_err(invalid),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_family(s: &str) -> Result<Family, AppError> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let usize_arg = |a: Option<&str>| -> Result<usize, AppError> {
        a.ok_or_else(|| AppError::Invalid(format!("family {name} needs a :K argument")))?
            .parse()
            .map_err(invalid)
    };
    match name {
        "sorted" => Ok(Family::Sorted),
        "reversed" => Ok(Family::Reversed),
        "interleaved-halves" => Ok(Family::InterleavedHalves),
        "evens-then-odds" => Ok(Family::EvensThenOdds),
        "runs" => Ok(Family::Runs { k: usize_arg(arg)? }),
        "grid-random" => Ok(Family::GridRandom),
        "pareto-regions" => Ok(Family::ParetoRegions { k: usize_arg(arg)? }),
        "hull-regions" => Ok(Family::HullRegions { k: usize_arg(arg)? }),
        "circle-arc-clusters" => {
            let a = arg.ok_or_else(|| {
                AppError::Invalid("circle-arc-clusters needs :ARCS,SIZE".into())
            })?;
            let (arcs, size) = a
                .split_once(',')
                .ok_or_else(|| AppError::Invalid("circle-arc-clusters needs :ARCS,SIZE".into()))?;
            Ok(Family::CircleArcClusters {
                arcs: arcs.parse().map_err(invalid)?,
                cluster_size: size.parse().map_err(invalid)?,
            })
        }
        _ => Err(AppError::Invalid(format!("unknown family {name}"))),
    }
}

fn meter_line(meter: &CostMeter) -> String {
    format!(
        "comparisons={} orientation_tests={} elements_touched={} total={}",
        meter.comparisons,
        meter.orientation_tests,
        meter.elements_touched,
        meter.total()
    )
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, AppError> {
    let mut s = serde_json::to_string_pretty(value).map_err(invalid)?;
    s.push('\n');
    Ok(s)
}

fn parse_bench_csv(text: &str) -> Result<Vec<BenchRecord>, AppError> {
    let mut records = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("family,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(AppError::Invalid(format!("line {}: expected 11 fields", no + 1)));
        }
        let bad = |e: &dyn std::fmt::Display| AppError::Invalid(format!("line {}: {e}", no + 1));
        records.push(BenchRecord {
            family: f[0].to_string(),
            algorithm: f[1].to_string(),
            n: f[2].parse().map_err(|e| bad(&e))?,
            seed: f[3].parse().map_err(|e| bad(&e))?,
            universe_bound_bits: f[4].parse().map_err(|e| bad(&e))?,
            lower_bound_bits: f[5].parse().map_err(|e| bad(&e))?,
            comparisons: f[6].parse().map_err(|e| bad(&e))?,
            orientation_tests: f[7].parse().map_err(|e| bad(&e))?,
            elements_touched: f[8].parse().map_err(|e| bad(&e))?,
            total: f[9].parse().map_err(|e| bad(&e))?,
            wall_ns: f[10].parse().map_err(|e| bad(&e))?,
        });
    }
    Ok(records)
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Sort { input } => {
            let values = pio::read_scalars(&read_input(&input)?).map_err(invalid)?;
            let mut meter = CostMeter::new();
            let out = truncated_quicksort(&values, &mut meter);
            let mut want = values.clone();
            want.sort_unstable();
            if out != want {
                return Err(AppError::Verify("sorted output mismatch".into()));
            }
            eprintln!("{}", meter_line(&meter));
            emit(&cli.output, &pio::write_scalars(&out))
        }
        Command::Entropy { input } => {
            let values = pio::read_scalars(&read_input(&input)?).map_err(invalid)?;
            let qs = quicksort_entropy(&values);
            let ts = timsort_entropy(&values);
            let text = match cli.format {
                Format::Json => json(&serde_json::json!({ "quicksort": qs, "timsort": ts }))?,
                Format::Csv => format!(
                    "# entropy v1\nalgorithm,value_bits,lower_bound_bits,parts\nquicksort,{:.6},{:.6},{}\ntimsort,{:.6},{:.6},{}\n",
                    qs.value_bits, qs.lower_bound_bits, qs.part_sizes.len(),
                    ts.value_bits, ts.lower_bound_bits, ts.part_sizes.len()
                ),
            };
            emit(&cli.output, &text)
        }
        Command::Pareto { input, witnesses } => {
            let inst = pio::read_points(&read_input(&input)?).map_err(invalid)?;
            let mut meter = CostMeter::new();
            let (front, wit) = pareto_front(&inst, &mut meter).map_err(invalid)?;
            verify_pareto(&inst, &front, &wit).map_err(|e| AppError::Verify(e.to_string()))?;
            if let Some(path) = witnesses {
                fs::write(path, pio::write_pareto_witnesses(&wit)).map_err(invalid)?;
            }
            eprintln!("{}", meter_line(&meter));
            let pts = front.indices.iter().map(|&i| inst.points()[i]);
            let text: String = pts.map(|p| format!("{} {}\n", p.x, p.y)).collect();
            emit(&cli.output, &text)
        }
        Command::Hull { input, witnesses } => {
            let inst = pio::read_points(&read_input(&input)?).map_err(invalid)?;
            let mut meter = CostMeter::new();
            let (hull, wit) = convex_hull(&inst, &mut meter).map_err(invalid)?;
            verify_hull(&inst, &hull, &wit).map_err(|e| AppError::Verify(e.to_string()))?;
            if let Some(path) = witnesses {
                fs::write(path, pio::write_hull_witnesses(&wit)).map_err(invalid)?;
            }
            eprintln!("{}", meter_line(&meter));
            let pts = hull.indices.iter().map(|&i| inst.points()[i]);
            let text: String = pts.map(|p| format!("{} {}\n", p.x, p.y)).collect();
            emit(&cli.output, &text)
        }
        Command::Enumerate { points, problem, rects, triangles, check_bounds } => {
            let inst = pio::read_points(&fs::read_to_string(&points).map_err(invalid)?)
                .map_err(invalid)?;
            let problem = match problem {
                ProblemArg::Pareto => Problem::Pareto,
                ProblemArg::Hull => Problem::Hull,
            };
            let regions = match (&rects, &triangles) {
                (Some(_), Some(_)) => {
                    return Err(AppError::Invalid("give either --rects or --triangles".into()))
                }
                (Some(p), None) => {
                    pio::read_rects(&fs::read_to_string(p).map_err(invalid)?).map_err(invalid)?
                }
                (None, Some(p)) => pio::read_triangles(&fs::read_to_string(p).map_err(invalid)?)
                    .map_err(invalid)?,
                (None, None) => presorted_core::RegionSet::empty(match problem {
                    Problem::Pareto => RegionKind::Rectangles,
                    Problem::Hull => RegionKind::Triangles,
                }),
            };
            let census = enumerate_universe(&inst, &regions, problem).map_err(invalid)?;
            let text = if check_bounds {
                let bounds = check_counting_bounds(&inst, &regions, &census).map_err(invalid)?;
                json(&serde_json::json!({ "census": census, "bounds": bounds }))?
            } else {
                json(&census)?
            };
            emit(&cli.output, &text)
        }
        Command::Refine { points, rects } => {
            let inst = pio::read_points(&fs::read_to_string(&points).map_err(invalid)?)
                .map_err(invalid)?;
            let regions = pio::read_rects(&fs::read_to_string(&rects).map_err(invalid)?)
                .map_err(invalid)?;
            let tree = build_quadrant_tree(&inst, &regions).map_err(invalid)?;
            let refined = refine_regions(&inst, &regions, &tree);
            let mut text = String::new();
            for region in &refined.regions {
                let presorted_core::Region::Rect(r) = region else { unreachable!() };
                text.push_str(&format!("{} {} {} {}\n", r.xmin, r.ymin, r.xmax, r.ymax));
            }
            emit(&cli.output, &text)
        }
        Command::Gen { family, n, regions } => {
            let spec = GeneratorSpec { family: parse_family(&family)?, n, seed: cli.seed };
            match spec.generate().map_err(invalid)? {
                presorted_core::Generated::Scalars(v) => emit(&cli.output, &pio::write_scalars(&v)),
                presorted_core::Generated::Geometric { instance, regions: rs } => {
                    if let Some(path) = regions {
                        let mut text = String::new();
                        for region in &rs.regions {
                            match region {
                                presorted_core::Region::Rect(r) => text.push_str(&format!(
                                    "{} {} {} {}\n",
                                    r.xmin, r.ymin, r.xmax, r.ymax
                                )),
                                presorted_core::Region::Triangle(t) => text.push_str(&format!(
                                    "{} {} {} {} {} {}\n",
                                    t.a.x, t.a.y, t.b.x, t.b.y, t.c.x, t.c.y
                                )),
                            }
                        }
                        fs::write(path, text).map_err(invalid)?;
                    }
                    emit(&cli.output, &pio::write_points(&instance))
                }
            }
        }
        Command::Bench { algorithm, families, sizes, repeats, parallel } => {
            let mut specs = Vec::new();
            for f in &families {
                let family = parse_family(f)?;
                for &n in &sizes {
                    specs.push(GeneratorSpec { family: family.clone(), n, seed: cli.seed });
                }
            }
            let algorithm: Algorithm = algorithm.into();
            let records = if parallel {
                let chunks: Vec<Vec<GeneratorSpec>> = specs.chunks(1).map(<[_]>::to_vec).collect();
                let results: Vec<_> = std::thread::scope(|scope| {
                    let handles: Vec<_> = chunks
                        .iter()
                        .map(|c| scope.spawn(move || bench(algorithm, c, repeats)))
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("bench worker")).collect()
                });
                let mut all = Vec::new();
                for r in results {
                    all.extend(r.map_err(classify_bench_error)?);
                }
                all
            } else {
                bench(algorithm, &specs, repeats).map_err(classify_bench_error)?
            };
            let text = match cli.format {
                Format::Csv => to_csv(&records),
                Format::Json => json(&records)?,
            };
            emit(&cli.output, &text)
        }
        Command::Report { input } => {
            let records = parse_bench_csv(&read_input(&input)?)?;
            if records.is_empty() {
                return Err(AppError::Invalid("no benchmark records".into()));
            }
            let rows = scaling_report(&records);
            let text = match cli.format {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("# scaling v1\nfamily,algorithm,max_c,monotone_in_n\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{:.6},{}\n",
                            r.family, r.algorithm, r.max_c, r.monotone_in_n
                        ));
                    }
                    s
                }
            };
            emit(&cli.output, &text)
        }
    }
}

fn classify_bench_error(e: presorted_core::HarnessError) -> AppError {
    match e {
        presorted_core::HarnessError::Verification { .. } => AppError::Verify(e.to_string()),
        other => AppError::Invalid(other.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Verify(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
