//! Command-line interface.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fof_core::{fof_to_mesh, mesh_to_fof, normalize_mesh, shapes, Repair, TriangleMesh};

use crate::docs;
use crate::experiments::{
    compare, default_jobs, noise_sweep, resolution_sweep, terms_sweep, CompareOptions, NamedMesh, RoundTrip,
    Scoring,
};
use crate::io::{load_fof, load_mesh, save_fof, save_mesh};

/// Fourier occupancy field conversions, metrics and sweeps.
#[derive(Debug, Parser)]
#[command(name = "fof", version)]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Only log warnings and errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a mesh to a .fof grid.
    Convert(ConvertArgs),
    /// Extract a mesh from a .fof grid.
    Extract(ExtractArgs),
    /// Round-trip error against the number of series terms.
    Nsweep(NsweepArgs),
    /// Round-trip error against grid resolution, from one conversion.
    Ressweep(RessweepArgs),
    /// Round-trip error against multiplicative coefficient noise.
    Noisesweep(NoisesweepArgs),
    /// Distance and normal-map metrics between two meshes, as JSON.
    Compare(CompareArgs),
    /// Write a synthetic test mesh.
    Gen(GenArgs),
    /// Regenerate the documentation pages derived from the code.
    Docs(DocsArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Input mesh (.obj or .ply).
    pub mesh: PathBuf,
    /// Output .fof file.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Grid height in pixels.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub height: u32,
    /// Grid width in pixels.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub width: u32,
    /// Series terms per pixel.
    #[arg(short = 'n', long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(1..))]
    pub terms: u32,
    #[command(flatten)]
    pub normalize: NormalizeArgs,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Center and scale the input into [-1 + m, 1 - m] along its longest axis.
    #[arg(long, value_name = "MARGIN", value_parser = parse_margin)]
    pub normalize: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Input .fof file.
    pub fof: PathBuf,
    /// Output mesh (.obj or .ply).
    #[arg(short, long)]
    pub output: PathBuf,
    /// z samples.
    #[arg(short, long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(2..))]
    pub depth: u32,
    #[command(flatten)]
    pub surface: SurfaceArgs,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Occupancy level of the surface, in (0, 1).
    #[arg(long, default_value_t = 0.5, value_parser = parse_iso)]
    pub iso: f64,
    /// Repair of unreliable vertices: constraint, none, smooth or smooth:K.
    #[arg(long, default_value = "constraint", value_parser = parse_repair)]
    pub repair: Repair,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Input meshes (.obj or .ply). Each gets its own rows, followed by mean
    /// rows when there are several.
    #[arg(required = true)]
    pub meshes: Vec<PathBuf>,
    #[command(flatten)]
    pub normalize: NormalizeArgs,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Surface samples per mesh for the distance metrics.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Seed of the metric sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report distances for an object of this height instead of normalized
    /// units, in centimeters (e.g. 1.8m).
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<f64>,
    /// Worker threads (default: one per core).
    #[arg(short, long)]
    pub jobs: Option<usize>,
    /// CSV output file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NsweepArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Comma-separated term counts.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256", value_parser = clap::value_parser!(u32).range(1..))]
    pub terms: Vec<u32>,
    /// Grid height and width.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub resolution: u32,
    /// z samples.
    #[arg(short, long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(2..))]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct RessweepArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Comma-separated resolutions; each is also the z sample count.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256,512", value_parser = clap::value_parser!(u32).range(2..))]
    pub resolutions: Vec<u32>,
    /// Resolution of the single conversion (default: the largest entry).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub source: Option<u32>,
    /// Series terms per pixel.
    #[arg(short = 'n', long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(1..))]
    pub terms: u32,
}

#[derive(Debug, Args)]
pub struct NoisesweepArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Comma-separated noise levels in percent.
    #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20,25,30", value_parser = parse_level)]
    pub levels: Vec<f64>,
    /// Noise draws per level; rows report the median.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    /// Seed of the coefficient noise.
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    /// Series terms per pixel.
    #[arg(short = 'n', long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(1..))]
    pub terms: u32,
    /// Grid height and width.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub resolution: u32,
    /// z samples.
    #[arg(short, long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(2..))]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Predicted mesh.
    pub a: PathBuf,
    /// Reference mesh.
    pub b: PathBuf,
    /// Surface samples per mesh for the distance metrics.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Seed of the metric sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Normal map size in pixels.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub render: u32,
    /// Report distances for an object of this height, in centimeters (e.g. 1.8m).
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<f64>,
    /// JSON output file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Sphere,
    Torus,
    Cube,
    Capsule,
    Cylinder,
    OpenSphere,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub shape: Shape,
    /// Output mesh (.obj or .ply).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Sphere, capsule and cylinder radius.
    #[arg(long, default_value_t = 0.6)]
    pub radius: f64,
    /// Icosphere subdivision levels.
    #[arg(long, default_value_t = 4)]
    pub subdivisions: u32,
    /// Torus ring radius.
    #[arg(long, default_value_t = 0.5)]
    pub major_radius: f64,
    /// Torus tube radius.
    #[arg(long, default_value_t = 0.2)]
    pub minor_radius: f64,
    /// Cube half edge length.
    #[arg(long, default_value_t = 0.5)]
    pub half_extent: f64,
    /// Half length of the capsule or cylinder axis (without caps).
    #[arg(long, default_value_t = 0.4)]
    pub half_length: f64,
    /// Segments around the torus ring, capsule or cylinder.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(3..))]
    pub segments: u32,
    /// Segments around the torus tube, capsule cap rings or cylinder length
    /// segments.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub rings: u32,
    /// Percentage of faces removed from the open sphere.
    #[arg(long, default_value_t = 10.0, value_parser = parse_level)]
    pub remove: f64,
    /// Seed choosing the removed faces.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DocsArgs {
    /// Documentation directory.
    #[arg(long, default_value = "docs")]
    pub dir: PathBuf,
    /// Fail if the pages are out of date instead of writing them.
    #[arg(long)]
    pub check: bool,
}

/// A failure caused by the invocation rather than the data (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn parse_iso(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("iso level must lie strictly between 0 and 1".into())
    }
}

fn parse_margin(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err("margin must lie in [0, 1)".into())
    }
}

fn parse_level(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=100.0).contains(&v) {
        Ok(v)
    } else {
        Err("percentage must lie in [0, 100]".into())
    }
}

pub fn parse_repair(s: &str) -> Result<Repair, String> {
    match s {
        "constraint" => Ok(Repair::Constraint),
        "none" => Ok(Repair::None),
        "smooth" => Ok(Repair::Smooth(3)),
        _ => match s.strip_prefix("smooth:").map(str::parse) {
            Some(Ok(k)) => Ok(Repair::Smooth(k)),
            _ => Err("expected constraint, none, smooth or smooth:K".into()),
        },
    }
}

/// `--scale 1.8m`: the normalized cube edge (2 units) stands for that many
/// meters, and distances are reported in centimeters.
pub fn parse_scale(s: &str) -> Result<f64, String> {
    let meters: f64 = s
        .strip_suffix('m')
        .ok_or("expected a length in meters such as 1.8m")?
        .parse()
        .map_err(|e| format!("{e}"))?;
    if meters > 0.0 && meters.is_finite() {
        Ok(meters * 100.0 / 2.0)
    } else {
        Err("length must be positive".into())
    }
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(usage(format!("no such file: {}", path.display())));
    }
    Ok(())
}

fn read_input(path: &Path, normalize: &NormalizeArgs) -> Result<TriangleMesh> {
    require_file(path)?;
    let mesh = load_mesh(path).with_context(|| format!("reading {}", path.display()))?;
    match normalize.normalize {
        Some(margin) => Ok(normalize_mesh(&mesh, margin)?.0),
        None => {
            if let Some((lo, hi)) = mesh.bounds() {
                if lo.x < -1.0 || lo.y < -1.0 || lo.z < -1.0 || hi.x > 1.0 || hi.y > 1.0 || hi.z > 1.0 {
                    log::warn!("{} leaves [-1, 1]^3; pass --normalize to fit it", path.display());
                }
            }
            Ok(mesh)
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv<R: serde::Serialize>(rows: &[R], path: Option<&Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(open_output(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn named_inputs(sweep: &SweepArgs) -> Result<Vec<NamedMesh>> {
    sweep
        .meshes
        .iter()
        .map(|p| {
            Ok(NamedMesh {
                name: p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into()),
                mesh: read_input(p, &sweep.normalize)?,
            })
        })
        .collect()
}

fn scoring(sweep: &SweepArgs) -> Scoring {
    Scoring {
        samples: sweep.samples as usize,
        seed: sweep.seed,
        scale: sweep.scale.unwrap_or(1.0),
    }
}

fn jobs(sweep: &SweepArgs) -> usize {
    sweep.jobs.unwrap_or_else(default_jobs)
}

fn generate(args: &GenArgs) -> TriangleMesh {
    match args.shape {
        Shape::Sphere => shapes::icosphere(args.radius, args.subdivisions),
        Shape::Torus => shapes::torus(
            args.major_radius,
            args.minor_radius,
            args.segments as usize,
            args.rings as usize,
        ),
        Shape::Cube => shapes::cube(args.half_extent),
        Shape::Capsule => shapes::capsule(args.radius, args.half_length, args.segments as usize, args.rings as usize),
        Shape::Cylinder => shapes::cylinder(args.radius, args.half_length, args.segments as usize, args.rings as usize),
        Shape::OpenSphere => shapes::open_sphere(args.radius, args.subdivisions, args.remove / 100.0, args.seed),
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert(a) => {
            let mesh = read_input(&a.mesh, &a.normalize)?;
            let (grid, report) = mesh_to_fof(&mesh, a.height as usize, a.width as usize, a.terms as usize)?;
            log::info!(
                "{} pixels, {} modified; {} events, {} dropped; {} triangles skipped",
                report.pixels_total,
                report.pixels_modified,
                report.events_total,
                report.events_dropped,
                report.triangles_skipped
            );
            save_fof(&a.output, &grid).with_context(|| format!("writing {}", a.output.display()))?;
        }
        Command::Extract(a) => {
            require_file(&a.fof)?;
            let grid = load_fof(&a.fof).with_context(|| format!("reading {}", a.fof.display()))?;
            let (mesh, report) = fof_to_mesh(&grid, a.depth as usize, a.surface.iso, a.surface.repair)?;
            if mesh.triangles.is_empty() {
                log::warn!("the field never reaches iso level {}; writing an empty mesh", a.surface.iso);
            }
            log::info!(
                "{} vertices ({} reliable), {} triangles",
                report.vertices,
                report.reliable,
                report.triangles
            );
            save_mesh(&a.output, &mesh).with_context(|| format!("writing {}", a.output.display()))?;
        }
        Command::Nsweep(a) => {
            let meshes = named_inputs(&a.sweep)?;
            let base = RoundTrip {
                resolution: a.resolution as usize,
                terms: 1,
                depth: a.depth as usize,
                iso: a.sweep.surface.iso,
                repair: a.sweep.surface.repair,
            };
            let terms: Vec<usize> = a.terms.iter().map(|&n| n as usize).collect();
            let rows = terms_sweep(&meshes, &terms, &base, &scoring(&a.sweep), jobs(&a.sweep))?;
            write_csv(&rows, a.sweep.output.as_deref())?;
        }
        Command::Ressweep(a) => {
            let meshes = named_inputs(&a.sweep)?;
            let resolutions: Vec<usize> = a.resolutions.iter().map(|&r| r as usize).collect();
            let source = a.source.map_or_else(|| *resolutions.iter().max().expect("non-empty"), |s| s as usize);
            let base = RoundTrip {
                resolution: source,
                terms: a.terms as usize,
                depth: source,
                iso: a.sweep.surface.iso,
                repair: a.sweep.surface.repair,
            };
            let rows = resolution_sweep(&meshes, &resolutions, &base, &scoring(&a.sweep), jobs(&a.sweep))?;
            write_csv(&rows, a.sweep.output.as_deref())?;
        }
        Command::Noisesweep(a) => {
            let meshes = named_inputs(&a.sweep)?;
            let base = RoundTrip {
                resolution: a.resolution as usize,
                terms: a.terms as usize,
                depth: a.depth as usize,
                iso: a.sweep.surface.iso,
                repair: a.sweep.surface.repair,
            };
            let rows = noise_sweep(
                &meshes,
                &a.levels,
                a.trials as usize,
                a.noise_seed,
                &base,
                &scoring(&a.sweep),
                jobs(&a.sweep),
            )?;
            write_csv(&rows, a.sweep.output.as_deref())?;
        }
        Command::Compare(a) => {
            let none = NormalizeArgs { normalize: None };
            let (ma, mb) = (read_input(&a.a, &none)?, read_input(&a.b, &none)?);
            let options = CompareOptions {
                scoring: Scoring {
                    samples: a.samples as usize,
                    seed: a.seed,
                    scale: a.scale.unwrap_or(1.0),
                },
                render: a.render as usize,
                ..CompareOptions::default()
            };
            let result = compare(&ma, &mb, &options)?;
            let mut out = open_output(a.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &result)?;
            writeln!(out)?;
            out.flush()?;
        }
        Command::Gen(a) => {
            let mesh = generate(&a);
            log::info!("{} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len());
            save_mesh(&a.output, &mesh).with_context(|| format!("writing {}", a.output.display()))?;
        }
        Command::Docs(a) => {
            let stale = docs::write_generated(&a.dir, a.check)?;
            if a.check && !stale.is_empty() {
                bail!("out of date: {}", stale.join(", "));
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and maps the outcome to an exit code:
/// 0 on success, 1 on runtime failure, 2 on usage errors.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = if cli.quiet {
        log::LevelFilter::Warn
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Info,
            1 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("FOF_LOG")
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .try_init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(if e.downcast_ref::<UsageError>().is_some() { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn scale_and_repair_parse() {
        assert_eq!(parse_scale("1.8m"), Ok(90.0));
        assert_eq!(parse_scale("2m"), Ok(100.0));
        assert!(parse_scale("1.8").is_err());
        assert!(parse_scale("-1m").is_err());
        assert_eq!(parse_repair("smooth"), Ok(Repair::Smooth(3)));
        assert_eq!(parse_repair("smooth:7"), Ok(Repair::Smooth(7)));
        assert_eq!(parse_repair("none"), Ok(Repair::None));
        assert!(parse_repair("smooth:x").is_err());
    }

    #[test]
    fn iso_must_be_inside_the_unit_interval() {
        assert!(parse_iso("0.5").is_ok());
        assert!(parse_iso("0").is_err());
        assert!(parse_iso("1").is_err());
        assert!(parse_iso("nan").is_err());
    }
}
