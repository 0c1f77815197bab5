//! Round-trip experiments behind the sweep commands.
//!
//! Every sweep converts each mesh once, derives the per-row grids from that
//! conversion (truncation, resampling or noise), extracts a mesh and scores it
//! against the input. Rows come back in sweep-list order whatever the
//! scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use fof_core::metrics::{
    chamfer, normal_difference, p2s, psnr_ssim, render_normal_maps, DEFAULT_SAMPLES, DEFAULT_YAWS,
};
use fof_core::{fof_to_mesh, mesh_to_fof, FofGrid, Repair, TriangleMesh};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

/// Conversion and extraction settings shared by all rows of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    /// Grid height and width.
    pub resolution: usize,
    pub terms: usize,
    /// z samples for extraction.
    pub depth: usize,
    pub iso: f64,
    pub repair: Repair,
}

impl Default for RoundTrip {
    fn default() -> Self {
        Self {
            resolution: 256,
            terms: 128,
            depth: 256,
            iso: 0.5,
            repair: Repair::Constraint,
        }
    }
}

impl RoundTrip {
    pub fn convert(&self, mesh: &TriangleMesh) -> Result<FofGrid> {
        let (grid, report) = mesh_to_fof(mesh, self.resolution, self.resolution, self.terms)?;
        if report.events_dropped > 0 {
            log::info!(
                "matcher dropped {} of {} events in {} pixels",
                report.events_dropped,
                report.events_total,
                report.pixels_modified
            );
        }
        Ok(grid)
    }

    pub fn extract(&self, grid: &FofGrid, depth: usize) -> Result<TriangleMesh> {
        let (mesh, _) = fof_to_mesh(grid, depth, self.iso, self.repair)?;
        Ok(mesh)
    }
}

/// Surface-sampling settings for the distance metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scoring {
    pub samples: usize,
    pub seed: u64,
    /// Multiplies every reported distance.
    pub scale: f64,
}

impl Default for Scoring {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub chamfer: f64,
    pub p2s: f64,
}

impl Scoring {
    /// Chamfer and P2S of `reconstructed` against `reference`. An empty
    /// reconstruction scores NaN.
    pub fn score(&self, reconstructed: &TriangleMesh, reference: &TriangleMesh) -> Result<Scores> {
        if reconstructed.triangles.is_empty() {
            log::warn!("reconstruction is empty, scoring NaN");
            return Ok(Scores {
                chamfer: f64::NAN,
                p2s: f64::NAN,
            });
        }
        Ok(Scores {
            chamfer: self.scale * chamfer(reconstructed, reference, self.samples, self.seed)?,
            p2s: self.scale * p2s(reconstructed, reference, self.samples, self.seed)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct NamedMesh {
    pub name: String,
    pub mesh: TriangleMesh,
}

/// Name of the row averaging all meshes.
pub const MEAN_ROW: &str = "mean";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermsRow {
    pub mesh: String,
    pub terms: usize,
    pub chamfer: f64,
    pub p2s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionRow {
    pub mesh: String,
    pub resolution: usize,
    pub chamfer: f64,
    pub p2s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRow {
    pub mesh: String,
    /// Percent.
    pub level: f64,
    pub trials: usize,
    /// Median over trials.
    pub chamfer: f64,
    pub p2s: f64,
}

/// Maps `f` over `items` on up to `jobs` threads, keeping the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every item mapped")).collect()
}

/// Default worker count: one per available core.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn mean_rows<R: Clone>(rows: &[R], meshes: usize, per_mesh: usize, average: impl Fn(&[&R]) -> R) -> Vec<R> {
    let mut out = rows.to_vec();
    if meshes > 1 {
        for k in 0..per_mesh {
            let column: Vec<&R> = (0..meshes).map(|m| &rows[m * per_mesh + k]).collect();
            out.push(average(&column));
        }
    }
    out
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Component-count sweep: one conversion at the largest count, truncated to
/// each entry of `terms`.
pub fn terms_sweep(
    meshes: &[NamedMesh],
    terms: &[usize],
    base: &RoundTrip,
    scoring: &Scoring,
    jobs: usize,
) -> Result<Vec<TermsRow>> {
    let max = *terms.iter().max().context("empty component list")?;
    let mut rows = Vec::new();
    for m in meshes {
        let source = RoundTrip { terms: max, ..*base }.convert(&m.mesh)?;
        let results = par_map(terms, jobs, |&n| -> Result<TermsRow> {
            let grid = source.truncated(n)?;
            let mesh = base.extract(&grid, base.depth)?;
            let s = scoring.score(&mesh, &m.mesh)?;
            log::info!("{} N={n}: chamfer {} p2s {}", m.name, s.chamfer, s.p2s);
            Ok(TermsRow {
                mesh: m.name.clone(),
                terms: n,
                chamfer: s.chamfer,
                p2s: s.p2s,
            })
        });
        rows.extend(results.into_iter().collect::<Result<Vec<_>>>()?);
    }
    Ok(mean_rows(&rows, meshes.len(), terms.len(), |c| TermsRow {
        mesh: MEAN_ROW.into(),
        terms: c[0].terms,
        chamfer: mean(c.iter().map(|r| r.chamfer)),
        p2s: mean(c.iter().map(|r| r.p2s)),
    }))
}

/// Resolution sweep: one conversion at `base.resolution`, resampled to each
/// entry of `resolutions` and extracted with as many z samples.
pub fn resolution_sweep(
    meshes: &[NamedMesh],
    resolutions: &[usize],
    base: &RoundTrip,
    scoring: &Scoring,
    jobs: usize,
) -> Result<Vec<ResolutionRow>> {
    let mut rows = Vec::new();
    for m in meshes {
        let source = base.convert(&m.mesh)?;
        let results = par_map(resolutions, jobs, |&r| -> Result<ResolutionRow> {
            let grid = source.resampled(r, r)?;
            let mesh = base.extract(&grid, r)?;
            let s = scoring.score(&mesh, &m.mesh)?;
            log::info!("{} resolution {r}: chamfer {} p2s {}", m.name, s.chamfer, s.p2s);
            Ok(ResolutionRow {
                mesh: m.name.clone(),
                resolution: r,
                chamfer: s.chamfer,
                p2s: s.p2s,
            })
        });
        rows.extend(results.into_iter().collect::<Result<Vec<_>>>()?);
    }
    Ok(mean_rows(&rows, meshes.len(), resolutions.len(), |c| ResolutionRow {
        mesh: MEAN_ROW.into(),
        resolution: c[0].resolution,
        chamfer: mean(c.iter().map(|r| r.chamfer)),
        p2s: mean(c.iter().map(|r| r.p2s)),
    }))
}

/// Multiplies every coefficient by `1 + level * g` with independent standard
/// normal `g`. Trial `trial` draws from its own stream of `seed`.
pub fn perturb(grid: &FofGrid, level: f64, seed: u64, trial: u64) -> Result<FofGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let data = grid
        .data()
        .iter()
        .map(|&a| {
            let g: f64 = StandardNormal.sample(&mut rng);
            a * (1.0 + level * g)
        })
        .collect();
    Ok(FofGrid::from_data(grid.height(), grid.width(), grid.terms(), data)?)
}

/// Median, with the mean of the middle pair for even counts. NaN sorts last.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Coefficient-noise sweep. `levels` are percentages; each level runs
/// `trials` noise draws from `noise_seed` and reports the median scores.
pub fn noise_sweep(
    meshes: &[NamedMesh],
    levels: &[f64],
    trials: usize,
    noise_seed: u64,
    base: &RoundTrip,
    scoring: &Scoring,
    jobs: usize,
) -> Result<Vec<NoiseRow>> {
    anyhow::ensure!(trials > 0, "at least one trial per level");
    let cases: Vec<(f64, u64)> = levels
        .iter()
        .flat_map(|&l| (0..trials as u64).map(move |t| (l, t)))
        .collect();
    let mut rows = Vec::new();
    for m in meshes {
        let source = base.convert(&m.mesh)?;
        let results = par_map(&cases, jobs, |&(level, trial)| -> Result<Scores> {
            let grid = perturb(&source, level / 100.0, noise_seed, trial)?;
            let mesh = base.extract(&grid, base.depth)?;
            let s = scoring.score(&mesh, &m.mesh)?;
            log::info!("{} noise {level}% trial {trial}: chamfer {} p2s {}", m.name, s.chamfer, s.p2s);
            Ok(s)
        });
        let scores = results.into_iter().collect::<Result<Vec<_>>>()?;
        for (k, &level) in levels.iter().enumerate() {
            let group = &scores[k * trials..(k + 1) * trials];
            rows.push(NoiseRow {
                mesh: m.name.clone(),
                level,
                trials,
                chamfer: median(&group.iter().map(|s| s.chamfer).collect::<Vec<_>>()),
                p2s: median(&group.iter().map(|s| s.p2s).collect::<Vec<_>>()),
            });
        }
    }
    Ok(mean_rows(&rows, meshes.len(), levels.len(), |c| NoiseRow {
        mesh: MEAN_ROW.into(),
        level: c[0].level,
        trials,
        chamfer: mean(c.iter().map(|r| r.chamfer)),
        p2s: mean(c.iter().map(|r| r.p2s)),
    }))
}

/// Everything `compare` reports. PSNR is infinite for identical renders and
/// serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub chamfer: f64,
    pub p2s: f64,
    pub normal_mse: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub psnr: f64,
    pub ssim: f64,
}

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub scoring: Scoring,
    /// Normal maps are `render x render` pixels.
    pub render: usize,
    pub yaws: Vec<f64>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            scoring: Scoring::default(),
            render: 256,
            yaws: DEFAULT_YAWS.to_vec(),
        }
    }
}

/// Compares `a` (the prediction) with `b` (the reference). Image metrics are
/// averaged over the views.
pub fn compare(a: &TriangleMesh, b: &TriangleMesh, options: &CompareOptions) -> Result<Comparison> {
    let s = &options.scoring;
    let ra = render_normal_maps(a, options.render, options.render, &options.yaws);
    let rb = render_normal_maps(b, options.render, options.render, &options.yaws);
    let mut psnr_sum = 0.0;
    let mut ssim_sum = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        let (p, q) = psnr_ssim(x, y)?;
        psnr_sum += p;
        ssim_sum += q;
    }
    let views = options.yaws.len() as f64;
    Ok(Comparison {
        chamfer: s.scale * chamfer(a, b, s.samples, s.seed)?,
        p2s: s.scale * p2s(a, b, s.samples, s.seed)?,
        normal_mse: normal_difference(&ra, &rb)?,
        psnr: psnr_sum / views,
        ssim: ssim_sum / views,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<usize> = (0..37).collect();
        assert_eq!(par_map(&items, 4, |&i| i * i), items.iter().map(|i| i * i).collect::<Vec<_>>());
        assert!(par_map(&[] as &[usize], 3, |&i| i).is_empty());
    }

    #[test]
    fn median_of_small_sets() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn zero_noise_is_identity() {
        let grid = FofGrid::from_data(1, 2, 2, vec![0.5, -0.25, 1.0, 3.0]).unwrap();
        assert_eq!(perturb(&grid, 0.0, 9, 1).unwrap(), grid);
        let a = perturb(&grid, 0.1, 9, 1).unwrap();
        assert_eq!(a, perturb(&grid, 0.1, 9, 1).unwrap());
        assert_ne!(a, perturb(&grid, 0.1, 9, 2).unwrap());
    }

    #[test]
    fn infinite_psnr_serializes_as_string() {
        let c = Comparison {
            chamfer: 0.0,
            p2s: 0.0,
            normal_mse: 0.0,
            psnr: f64::INFINITY,
            ssim: 1.0,
        };
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"chamfer":0.0,"p2s":0.0,"normal_mse":0.0,"psnr":"inf","ssim":1.0}"#);
    }
}
