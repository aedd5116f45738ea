mod parse;
mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use manta_core::io::{self as mio, to_json, TriangulationFile};
use manta_core::manta::{PDistance, ThetaChoice, DEFAULT_P_MARGIN};
use manta_core::oracle::{brute_force_optimum_with, OracleError};
use manta_core::{
    edge_insertion_algorithm, extract_channel, generate, perturb_general_position, random_general_position,
    verify_proposition, AlgorithmConfig, MantaError, MantaRayInstance, MantaRayParams, Point, PointSet,
    PropositionReport, ScanOrder, Triangulation, DEFAULT_TIE_TOL,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Generation(#[from] MantaError),
    #[error("invalid input: {0:#}")]
    Input(anyhow::Error),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Generation(_) => 2,
            CliError::Input(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "manta", version, about = "Min-max angle triangulation by edge insertion, and the manta ray family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the manta ray triangulation T_n and write it as JSON.
    Generate(GenerateArgs),
    /// Run the edge insertion algorithm on a triangulation or point set.
    Optimize(OptimizeArgs),
    /// Check every statement about T_n over a range of n.
    Verify(VerifyArgs),
    /// Compare the algorithm with brute-force enumeration.
    Oracle(OracleArgs),
    /// Draw a triangulation as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Angles closer than this (radians) count as equal.
    #[arg(long, default_value_t = DEFAULT_TIE_TOL)]
    tie_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InstanceArgs {
    /// Apex angle at O, e.g. 0.78pi or radians.
    #[arg(long, default_value = "0.78pi", value_parser = parse::angle)]
    omega: f64,
    /// Ray angle at A: `auto` or an angle.
    #[arg(long, default_value = "auto", value_parser = parse::auto_angle)]
    theta: parse::Auto,
    /// Height of P above A_n: `auto` or a length.
    #[arg(long, default_value = "auto", value_parser = parse::auto_length)]
    p_distance: parse::Auto,
    #[arg(long, default_value_t = 1.0)]
    base_length: f64,
    /// Angular margin (radians) P must leave below omega.
    #[arg(long, default_value_t = DEFAULT_P_MARGIN)]
    p_margin: f64,
    /// Move the chains into general position by this much, in base lengths.
    #[arg(long)]
    perturb: Option<f64>,
}

impl InstanceArgs {
    fn params(&self, n: usize) -> MantaRayParams {
        MantaRayParams {
            n,
            omega: self.omega,
            theta: self.theta.0.map_or(ThetaChoice::Auto, ThetaChoice::Radians),
            p_distance: self.p_distance.0.map_or(PDistance::Auto, PDistance::Fixed),
            base_length: self.base_length,
            p_margin: self.p_margin,
        }
    }

    fn build(&self, n: usize, common: &Common) -> Result<MantaRayInstance, MantaError> {
        let inst = generate(&self.params(n))?;
        match self.perturb {
            Some(eps) => perturb_general_position(&inst, eps * self.base_length, common.seed, common.tie_tol),
            None => Ok(inst),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Triangulation JSON, or a point file ("x y" per line).
    input: PathBuf,
    /// Where to write the insertion trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "lexicographic")]
    order: Order,
    /// Evaluate the candidates of each round in parallel.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lexicographic,
    Reverse,
}

#[derive(Args)]
struct VerifyArgs {
    /// Values of n: `1..10`, `1..=10` or a single number.
    #[arg(long, default_value = "1..10", value_parser = parse::range)]
    n: std::ops::RangeInclusive<usize>,
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    /// Point file or triangulation JSON; omit to use --random.
    input: Option<PathBuf>,
    /// Number of random point sets (seeds seed, seed+1, ...).
    #[arg(long, conflicts_with = "input")]
    random: Option<usize>,
    /// Size of each random point set.
    #[arg(long, default_value_t = 7)]
    points: usize,
    /// Give up beyond this many triangulations.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RenderArgs {
    /// Triangulation JSON.
    input: PathBuf,
    /// Insert U,V (names or indices) and draw its channel.
    #[arg(long, value_parser = parse::pair)]
    highlight: Option<(String, String)>,
    /// Draw vertex names.
    #[arg(long)]
    labels: bool,
    /// Do not fill the channel polygons.
    #[arg(long)]
    no_shade: bool,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Writes through a temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> CliResult {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, contents)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes()).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Input)
}

enum Input {
    Triangulation(TriangulationFile),
    Points(Vec<Point>),
}

fn load(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    let ctx = |e: mio::IoError| CliError::Input(anyhow::Error::new(e).context(path.display().to_string()));
    if text.trim_start().starts_with('{') {
        mio::parse_triangulation(&text).map(Input::Triangulation).map_err(ctx)
    } else {
        mio::parse_points(&text).map(Input::Points).map_err(ctx)
    }
}

fn input_error(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn degrees(r: f64) -> String {
    format!("{:.6}° ({r:.9} rad)", r.to_degrees())
}

fn cmd_generate(a: GenerateArgs) -> CliResult {
    let inst = a.instance.build(a.n, &a.common)?;
    let file = TriangulationFile::from_triangulation(&inst.triangulation, Some(inst.label_map()));
    let json = to_json(&file);
    let Some(out) = &a.common.out else {
        return emit(None, &json);
    };
    write_atomic(out, &json)?;
    let t = &inst.triangulation;
    #[derive(Serialize)]
    struct Summary<'a> {
        file: &'a Path,
        n: usize,
        vertices: usize,
        edges: usize,
        triangles: usize,
        measure: f64,
        claim_margins: [Option<f64>; 4],
    }
    let summary = Summary {
        file: out,
        n: a.n,
        vertices: t.num_vertices(),
        edges: t.num_edges(),
        triangles: t.triangles().len(),
        measure: t.measure(a.common.tie_tol).max_angle.0,
        claim_margins: inst.angles.margins(),
    };
    match a.common.format {
        Format::Json => emit(None, &to_json(&summary)),
        Format::Text => {
            println!(
                "wrote {}: T_{} with {} vertices, {} edges, {} triangles, measure {}",
                out.display(),
                a.n,
                summary.vertices,
                summary.edges,
                summary.triangles,
                degrees(summary.measure)
            );
            Ok(())
        }
    }
}

fn cmd_optimize(a: OptimizeArgs) -> CliResult {
    let (file, points, initial) = match load(&a.input)? {
        Input::Triangulation(f) => {
            let t = f.to_triangulation().map_err(input_error)?;
            (Some(f), Arc::clone(t.point_set()), Some(t))
        }
        Input::Points(p) => (None, Arc::new(PointSet::new(p).map_err(input_error)?), None),
    };
    let config = AlgorithmConfig {
        tie_tol: a.common.tie_tol,
        max_rounds: a.max_rounds,
        order: match a.order {
            Order::Lexicographic => ScanOrder::Lexicographic,
            Order::Reverse => ScanOrder::Reverse,
        },
        parallel: a.parallel,
    };
    let run = edge_insertion_algorithm(points, initial, &config).map_err(|e| match e {
        manta_core::InsertionError::RoundLimitExceeded(_) => CliError::Verification(e.to_string()),
        e => input_error(e),
    })?;

    let labels = file.as_ref().and_then(|f| f.labels.clone());
    let final_file = TriangulationFile::from_triangulation(&run.final_triangulation, labels);
    if let Some(out) = &a.common.out {
        write_atomic(out, &to_json(&final_file))?;
    }
    if let Some(trace) = &a.trace {
        write_atomic(trace, &to_json(&run.trace))?;
    }
    let before = run.initial.measure(config.tie_tol).max_angle.0;
    let after = run.final_triangulation.measure(config.tie_tol).max_angle.0;
    match a.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                measure_before: f64,
                measure_after: f64,
                trace: &'a [manta_core::TraceEntry],
            }
            emit(None, &to_json(&Summary { measure_before: before, measure_after: after, trace: &run.trace }))
        }
        Format::Text => {
            println!("measure before: {}", degrees(before));
            println!("measure after:  {}", degrees(after));
            println!("insertions: {}", run.trace.len());
            for e in &run.trace {
                let name = |v| final_file.name(v);
                println!(
                    "  {}-{}: {} crossings, {} -> {}",
                    name(e.insert[0]),
                    name(e.insert[1]),
                    e.crossings,
                    degrees(e.measure_before),
                    degrees(e.measure_after)
                );
            }
            Ok(())
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let ns: Vec<usize> = a.n.clone().collect();
    let results: Vec<Result<PropositionReport, MantaError>> = ns
        .par_iter()
        .map(|&n| {
            let inst = a.instance.build(n, &a.common)?;
            verify_proposition(&inst, a.common.tie_tol)
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    for (n, r) in ns.iter().zip(results) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e @ MantaError::PerturbationBreaksClaim(_)) => {
                return Err(CliError::Verification(format!("n = {n}: {e}")))
            }
            Err(e) => return Err(CliError::Generation(e)),
        }
    }
    let json = to_json(&reports);
    if let Some(out) = &a.common.out {
        write_atomic(out, &json)?;
    }
    match a.common.format {
        Format::Json => emit(None, &json)?,
        Format::Text => print!("{}", verify_table(&reports)),
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.verdict).map(|r| r.n.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("verdict false for n = {}", failed.join(", "))))
    }
}

fn verify_table(reports: &[PropositionReport]) -> String {
    let mut s = format!(
        "{:>3} {:>6} {:>9} {:>8} {:>10} {:>12} {:>12} {:>8}\n",
        "n", "edges", "diameter", "d(O,P)", "crossings", "improving", "min margin", "verdict"
    );
    for r in reports {
        let margin = r.claim_margins.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let improving: Vec<String> = r.improving_insertions.iter().map(|[u, v]| format!("{u}-{v}")).collect();
        s.push_str(&format!(
            "{:>3} {:>6} {:>9} {:>8} {:>10} {:>12} {:>12.3e} {:>8}\n",
            r.n,
            format!("{}/{}", r.edge_count, r.expected_edge_count),
            format!("{}/{}", r.diameter, r.expected_diameter),
            r.op_distance,
            format!("{}/{}", r.op_crossings, r.expected_op_crossings),
            if improving.is_empty() { "-".to_string() } else { improving.join(",") },
            margin,
            r.verdict
        ));
    }
    s
}

#[derive(Serialize)]
struct OracleRow {
    set: String,
    points: usize,
    algorithm: f64,
    optimum: f64,
    matches: bool,
}

fn cmd_oracle(a: OracleArgs) -> CliResult {
    let sets: Vec<(String, Arc<PointSet>)> = match (&a.input, a.random) {
        (Some(path), _) => {
            let ps = match load(path)? {
                Input::Triangulation(f) => PointSet::new(f.points()),
                Input::Points(p) => PointSet::new(p),
            }
            .map_err(input_error)?;
            vec![(path.display().to_string(), Arc::new(ps))]
        }
        (None, Some(count)) => {
            if a.points < 3 {
                return Err(CliError::Usage("--points must be at least 3".into()));
            }
            (0..count as u64)
                .map(|k| {
                    let seed = a.common.seed + k;
                    (format!("seed {seed}"), random_general_position(seed, a.points))
                })
                .collect()
        }
        (None, None) => return Err(CliError::Usage("give an input file or --random COUNT".into())),
    };
    let tol = a.common.tie_tol;
    let rows: Vec<Result<OracleRow, CliError>> = sets
        .par_iter()
        .map(|(name, ps)| {
            let run = edge_insertion_algorithm(Arc::clone(ps), None, &AlgorithmConfig { tie_tol: tol, ..Default::default() })
                .map_err(input_error)?;
            let best = brute_force_optimum_with(ps, tol, a.cap).map_err(|e| match e {
                OracleError::CapExceeded(_) => CliError::Verification(e.to_string()),
                e => input_error(e),
            })?;
            let algorithm = run.final_triangulation.measure(tol).max_angle.0;
            let optimum = best.measure(tol).max_angle.0;
            Ok(OracleRow { set: name.clone(), points: ps.len(), algorithm, optimum, matches: (algorithm - optimum).abs() <= tol })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let text = match a.common.format {
        Format::Json => to_json(&rows),
        Format::Text => rows
            .iter()
            .map(|r| {
                format!(
                    "{}: {} points, algorithm {}, optimum {}, {}\n",
                    r.set,
                    r.points,
                    degrees(r.algorithm),
                    degrees(r.optimum),
                    if r.matches { "match" } else { "MISMATCH" }
                )
            })
            .collect(),
    };
    emit(a.common.out.as_deref(), &text)?;
    let bad = rows.iter().filter(|r| !r.matches).count();
    if bad == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{bad} of {} sets differ from the optimum", rows.len())))
    }
}

fn cmd_render(a: RenderArgs) -> CliResult {
    let file = match load(&a.input)? {
        Input::Triangulation(f) => f,
        Input::Points(_) => {
            return Err(input_error(anyhow::anyhow!("{} is not a triangulation file", a.input.display())))
        }
    };
    let t: Triangulation = file.to_triangulation().map_err(input_error)?;
    let channel = match &a.highlight {
        Some((u, v)) => {
            let id = |name: &str| {
                file.resolve(name).ok_or_else(|| CliError::Usage(format!("unknown vertex {name:?}")))
            };
            Some(extract_channel(&t, id(u)?, id(v)?).map_err(input_error)?)
        }
        None => None,
    };
    let opts = svg::RenderOptions {
        labels: a.labels.then_some(&file),
        channel: channel.as_ref(),
        shade: !a.no_shade,
    };
    emit(a.common.out.as_deref(), &svg::render(&t, &opts))
}
