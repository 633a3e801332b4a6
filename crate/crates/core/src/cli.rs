//! Command-line front end. [`run`] takes the argument list and output
//! streams so it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};

use crate::error::{Error, Result};
use crate::generate;
use crate::io::{self, Format, PlyEncoding, TriangleSoup};
use crate::mesh::{validate, Mesh};
use crate::metro;
use crate::rsimp::{self, Outcome, SimplificationState, SimplifyOptions};
use crate::vclust;

#[derive(Debug, Parser)]
#[command(name = "rsimp", version, about = "Coarse-to-fine triangle mesh simplification")]
struct Cli {
    /// More log output (repeat for more)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simplify a mesh to a vertex or face target, or within a time budget
    Simplify(SimplifyArgs),
    /// Continue a checkpointed simplification to a larger target
    Refine(SimplifyArgs),
    /// Vertex-clustering baseline on a uniform grid
    Cluster(ClusterArgs),
    /// Sampled mean surface distance between two meshes
    Measure(MeasureArgs),
    /// Time simplification of procedural tori
    Bench(BenchArgs),
    /// Print mesh statistics and validation results
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Obj,
    /// Binary little-endian PLY
    Ply,
    PlyAscii,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Obj => Format::Obj,
            OutputFormat::Ply => Format::Ply(PlyEncoding::BinaryLittleEndian),
            OutputFormat::PlyAscii => Format::Ply(PlyEncoding::Ascii),
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").args(["vertices", "faces", "time_budget"]).multiple(true).required(true)))]
struct SimplifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Target output vertex count
    #[arg(long, conflicts_with = "faces")]
    vertices: Option<usize>,
    /// Target output face count
    #[arg(long)]
    faces: Option<usize>,
    /// Stop splitting after this many milliseconds
    #[arg(long, value_name = "MS")]
    time_budget: Option<u64>,
    /// Save the final state here (refine also reads it when --resume is absent)
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    /// Start from this saved state instead of from scratch
    #[arg(long, value_name = "PATH")]
    resume: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Debug: keep disconnected pieces together in one cluster
    #[arg(long)]
    no_topology_check: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("size").args(["resolution", "vertices"]).required(true)))]
struct ClusterArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Cells along the longest bounding-box axis
    #[arg(long)]
    resolution: Option<u32>,
    /// Pick the smallest resolution reaching this many output vertices
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Original mesh
    #[arg(short = 'a', long)]
    original: PathBuf,
    /// Simplified mesh
    #[arg(short = 'b', long)]
    simplified: PathBuf,
    /// Samples per surface (default: 100 per original face, at most 2M)
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = metro::DEFAULT_SEED)]
    seed: u64,
    /// Also print the report as a JSON object
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Input torus face counts
    #[arg(long, value_delimiter = ',', default_values_t = [5000usize, 10000, 20000, 40000])]
    bench_sizes: Vec<usize>,
    /// Output vertex counts
    #[arg(long, value_delimiter = ',', default_values_t = [400usize])]
    vertices: Vec<usize>,
    /// Timed runs per row; the median is reported
    #[arg(long, default_value_t = 3)]
    repeat: usize,
}

#[derive(Debug, Args)]
struct InfoArgs {
    #[arg(short, long)]
    input: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    init_logging(cli.verbose);

    let result = match cli.command {
        Command::Simplify(a) => cmd_simplify(a, false, stdout),
        Command::Refine(a) => cmd_simplify(a, true, stdout),
        Command::Cluster(a) => cmd_cluster(a, stdout),
        Command::Measure(a) => cmd_measure(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
        Command::Info(a) => cmd_info(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        2 => LevelFilter::Debug,
        _ => LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env(env_logger::Env::default())
        .try_init();
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn write_output(path: &Path, mesh: &impl TriangleSoup, format: Option<OutputFormat>) -> Result<()> {
    io::write_mesh(path, mesh, format.map(Format::from))
}

fn cmd_simplify(a: SimplifyArgs, is_refine: bool, out: &mut dyn Write) -> Result<()> {
    let mesh = io::read_mesh(&a.input, None)?;
    let loaded = Instant::now();
    let budget = a.time_budget.map(Duration::from_millis);

    let source = a.resume.as_ref().or(if is_refine { a.checkpoint.as_ref() } else { None });
    let resumed: Option<SimplificationState> = match source {
        Some(path) => Some(io::load_checkpoint(path, &mesh)?),
        None if is_refine => {
            return Err(Error::InvalidArgument("refine needs --resume or --checkpoint".into()));
        }
        None => None,
    };
    if a.no_topology_check && resumed.is_some() {
        return Err(Error::InvalidArgument(
            "--no-topology-check cannot change a resumed state's options".into(),
        ));
    }
    let options = SimplifyOptions {
        topology_check: !a.no_topology_check,
    };

    let (outcome, rounds): (Outcome, usize) = match (a.faces, resumed) {
        (Some(f), Some(state)) => rsimp::refine_to_faces(state, &mesh, f, budget)?,
        (Some(f), None) => rsimp::simplify_to_faces(&mesh, f, budget, options)?,
        // a budget alone runs toward the full vertex count until time is up
        (None, state) => {
            let target = a.vertices.unwrap_or(mesh.vertex_count());
            let o = match state {
                Some(s) => rsimp::refine(s, &mesh, target, budget)?,
                None => rsimp::simplify(&mesh, target, budget, options)?,
            };
            (o, 1)
        }
    };
    let ready = loaded.elapsed();

    if let Some(path) = &a.output {
        write_output(path, &outcome.mesh, a.format)?;
        info!("wrote {}", path.display());
    }
    if let Some(path) = &a.checkpoint {
        io::save_checkpoint(&outcome.state, path)?;
        info!("saved checkpoint {}", path.display());
    }

    let last_split_groups = outcome.state.split_log().last().map_or(0, |r| r.children.len());
    writeln!(out, "vertices={}", outcome.mesh.vertex_count())?;
    writeln!(out, "faces={}", outcome.mesh.face_count())?;
    writeln!(out, "splits={}", outcome.report.splits)?;
    writeln!(out, "last_split_children={last_split_groups}")?;
    writeln!(out, "rounds={rounds}")?;
    writeln!(out, "stop={:?}", outcome.report.stop)?;
    writeln!(out, "split_loop_ms={}", ms(outcome.report.split_loop))?;
    writeln!(out, "post_processing_ms={}", ms(outcome.post_processing))?;
    writeln!(out, "elapsed_ms={}", ms(ready))?;
    Ok(())
}

fn cmd_cluster(a: ClusterArgs, out: &mut dyn Write) -> Result<()> {
    let mesh = io::read_mesh(&a.input, None)?;
    let start = Instant::now();
    let resolution = match (a.resolution, a.vertices) {
        (Some(0), _) => return Err(Error::InvalidArgument("resolution must be at least 1".into())),
        (Some(r), _) => r,
        (None, Some(v)) => vclust::resolution_for_target(&mesh, v),
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let simplified = vclust::cluster_simplify(&mesh, resolution);
    let elapsed = start.elapsed();
    if let Some(path) = &a.output {
        write_output(path, &simplified, a.format)?;
    }
    writeln!(out, "resolution={resolution}")?;
    writeln!(out, "vertices={}", simplified.vertex_count())?;
    writeln!(out, "faces={}", simplified.face_count())?;
    writeln!(out, "elapsed_ms={}", ms(elapsed))?;
    Ok(())
}

fn cmd_measure(a: MeasureArgs, out: &mut dyn Write) -> Result<()> {
    let original = io::read_mesh(&a.original, None)?;
    // a fully collapsed output may have no faces left
    let simplified = io::read_soup(&a.simplified, None)?;
    let samples = a.samples.unwrap_or_else(|| metro::default_samples(original.face_count()));
    let report = metro::mean_error(&original, &simplified, samples, a.seed)?;
    writeln!(out, "{report}")?;
    if a.json {
        writeln!(out, "{}", report.to_json())?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<()> {
    if a.repeat == 0 {
        return Err(Error::InvalidArgument("--repeat must be at least 1".into()));
    }
    writeln!(out, "input_faces\tinput_vertices\ttarget\toutput_vertices\toutput_faces\twall_ms")?;
    for &size in &a.bench_sizes {
        let mesh: Mesh = generate::torus_with_face_count(size);
        for &target in &a.vertices {
            let mut times = Vec::with_capacity(a.repeat);
            let mut last = None;
            for _ in 0..a.repeat {
                let t = Instant::now();
                let o = rsimp::simplify(&mesh, target, None, SimplifyOptions::default())?;
                times.push(t.elapsed());
                last = Some(o);
            }
            times.sort();
            let o = last.expect("repeat >= 1");
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                mesh.face_count(),
                mesh.vertex_count(),
                target,
                o.mesh.vertex_count(),
                o.mesh.face_count(),
                ms(times[times.len() / 2])
            )?;
        }
    }
    Ok(())
}

fn cmd_info(a: InfoArgs, out: &mut dyn Write) -> Result<()> {
    let mesh = io::read_mesh(&a.input, None)?;
    let r = validate(&mesh);
    let b = mesh.bounding_box();
    writeln!(out, "vertices={}", r.vertex_count)?;
    writeln!(out, "faces={}", r.face_count)?;
    writeln!(out, "degenerate_faces={}", r.degenerate_faces)?;
    writeln!(out, "duplicate_faces={}", r.duplicate_faces)?;
    writeln!(out, "unreferenced_vertices={}", r.unreferenced_vertices)?;
    writeln!(out, "non_finite_vertices={}", r.non_finite_vertices)?;
    writeln!(out, "components={}", r.connected_components)?;
    writeln!(out, "area={}", mesh.total_area())?;
    writeln!(out, "bbox_min={} {} {}", b.min.x, b.min.y, b.min.z)?;
    writeln!(out, "bbox_max={} {} {}", b.max.x, b.max.y, b.max.z)?;
    writeln!(out, "bbox_diagonal={}", b.diagonal())?;
    writeln!(out, "renderable={}", r.is_renderable())?;
    Ok(())
}
