//! Analytic FLOP model and a single-threaded wall-clock harness.
//!
//! The FLOP model is the per-pixel operation table for the two pipelines
//! (meshgrid, transform arithmetic, rescale, bilinear sampling), multiplied
//! out over the frame. Timing runs the same grid + bilinear pipeline for both
//! transforms so the comparison is like for like.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::grid::{build_grid, warp_bilinear};
use crate::image::ImageBuffer;
use crate::lcm::LogParams;
use crate::mobius::MobiusParams;
use crate::transform::Transform;

/// Warm-up runs discarded before timing.
pub const WARMUP_RUNS: usize = 3;

/// Reference per-image CPU times for the two pipelines (seconds), reported
/// alongside measurements and never compared against them.
pub const REFERENCE_MPD_SECONDS: f64 = 0.24;
pub const REFERENCE_LCM_SECONDS: f64 = 0.22;

/// Reference training hours per epoch, LCM over MPD (0.1528 h / 0.1667 h).
pub const REFERENCE_EPOCH_RATIO: f64 = 0.1528 / 0.1667;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Lcm,
    Mpd,
}

impl TransformKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Lcm => "lcm",
            TransformKind::Mpd => "mpd",
        }
    }

    /// Default parameters used for benchmarking this pipeline.
    pub fn default_transform(self) -> Transform {
        match self {
            TransformKind::Lcm => Transform::Log(LogParams::default()),
            TransformKind::Mpd => Transform::Mobius(MobiusParams::default()),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformKind {
    type Err = WarpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lcm" | "log" => Ok(TransformKind::Lcm),
            "mpd" | "mobius" => Ok(TransformKind::Mpd),
            other => {
                Err(WarpError::InvalidArgument(format!("unknown transform '{other}' (expected lcm or mpd)")))
            }
        }
    }
}

/// Per-pixel operation counts: `(row, mpd, lcm)`.
pub const FLOP_TABLE: [(&str, u64, u64); 5] = [
    ("Meshgrid Creation", 2, 2),
    ("Complex Arithmetic for Transformation", 14, 0),
    ("Logarithmic Mapping", 0, 4),
    ("Scaling and Conversion to Image Coordinates", 0, 6),
    ("Grid Sampling (Bilinear Interpolation)", 7, 7),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopRow {
    pub name: String,
    pub per_pixel: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopReport {
    pub transform: TransformKind,
    pub width: usize,
    pub height: usize,
    pub rows: Vec<FlopRow>,
    pub total_flops: u64,
}

impl FlopReport {
    pub fn per_pixel_total(&self) -> u64 {
        self.rows.iter().map(|r| r.per_pixel).sum()
    }

    /// `total_flops` equals the row sum and every row equals `per_pixel · W · H`.
    pub fn is_consistent(&self) -> bool {
        let px = (self.width * self.height) as u64;
        self.rows.iter().all(|r| r.total == r.per_pixel * px)
            && self.total_flops == self.rows.iter().map(|r| r.total).sum::<u64>()
    }
}

fn check_size(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(WarpError::InvalidArgument(format!(
            "image size must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

pub fn flop_report(transform: TransformKind, width: usize, height: usize) -> Result<FlopReport> {
    check_size(width, height)?;
    let px = (width as u64) * (height as u64);
    let rows: Vec<FlopRow> = FLOP_TABLE
        .iter()
        .map(|&(name, mpd, lcm)| {
            let per_pixel = match transform {
                TransformKind::Mpd => mpd,
                TransformKind::Lcm => lcm,
            };
            FlopRow { name: name.to_string(), per_pixel, total: per_pixel * px }
        })
        .collect();
    let total_flops = rows.iter().map(|r| r.total).sum();
    Ok(FlopReport { transform, width, height, rows, total_flops })
}

/// Fraction of FLOPs saved by LCM relative to MPD; `4/23` at every size.
pub fn flop_reduction(width: usize, height: usize) -> Result<f64> {
    let mpd = flop_report(TransformKind::Mpd, width, height)?.total_flops;
    let lcm = flop_report(TransformKind::Lcm, width, height)?.total_flops;
    Ok((mpd - lcm) as f64 / mpd as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub lcm_flops: f64,
    pub mpd_flops: f64,
}

/// Expected transform FLOPs per image when the transform is applied with probability `p`.
pub fn flop_curve(probabilities: &[f64], width: usize, height: usize) -> Result<Vec<CurvePoint>> {
    let lcm = flop_report(TransformKind::Lcm, width, height)?.total_flops as f64;
    let mpd = flop_report(TransformKind::Mpd, width, height)?.total_flops as f64;
    probabilities
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(WarpError::InvalidArgument(format!("probability {p} outside [0, 1]")));
            }
            Ok(CurvePoint { p, lcm_flops: p * lcm, mpd_flops: p * mpd })
        })
        .collect()
}

/// CSV with header `p,lcm_flops,mpd_flops`.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("p,lcm_flops,mpd_flops\n");
    for pt in points {
        out.push_str(&format!("{},{},{}\n", pt.p, pt.lcm_flops, pt.mpd_flops));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub stddev: f64,
}

impl TimingStats {
    pub fn from_samples(samples: &[f64]) -> TimingStats {
        assert!(!samples.is_empty(), "at least one sample");
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mid = sorted.len() / 2;
        let median =
            if sorted.len().is_multiple_of(2) { 0.5 * (sorted[mid - 1] + sorted[mid]) } else { sorted[mid] };
        // Nearest-rank percentile.
        let rank = ((0.95 * n).ceil() as usize).clamp(1, sorted.len());
        TimingStats { mean, median, p95: sorted[rank - 1], stddev: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub transform: TransformKind,
    pub width: usize,
    pub height: usize,
    pub iterations: usize,
    pub warmup: usize,
    pub per_image_seconds: TimingStats,
    pub thread_count: usize,
    /// Modelled FLOPs per image; identical for every run with the same size.
    pub flops_per_image: u64,
}

/// Uniform random RGB image from ChaCha8 seeded with `seed`.
pub fn random_image(width: usize, height: usize, seed: u64) -> Result<ImageBuffer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageBuffer::from_fn(width, height, 3, |_, _, _| rng.random::<f32>())
}

/// One timed pass of the grid + bilinear pipeline.
fn run_once(img: &ImageBuffer, transform: &Transform, fill: &[f32]) -> Result<f64> {
    let start = Instant::now();
    let grid = build_grid(img.width(), img.height(), transform)?;
    let out = warp_bilinear(img, &grid, fill)?;
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(out);
    Ok(elapsed)
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(WarpError::InvalidArgument("iterations must be at least 1".into()));
    }
    Ok(())
}

fn timing_report(kind: TransformKind, img: &ImageBuffer, samples: &[f64]) -> Result<TimingReport> {
    Ok(TimingReport {
        transform: kind,
        width: img.width(),
        height: img.height(),
        iterations: samples.len(),
        warmup: WARMUP_RUNS,
        per_image_seconds: TimingStats::from_samples(samples),
        thread_count: 1,
        flops_per_image: flop_report(kind, img.width(), img.height())?.total_flops,
    })
}

/// Times `iterations` runs of grid construction plus bilinear warping on the
/// calling thread, after [`WARMUP_RUNS`] discarded runs.
pub fn time_transform(
    kind: TransformKind,
    width: usize,
    height: usize,
    iterations: usize,
    seed: u64,
) -> Result<TimingReport> {
    check_size(width, height)?;
    check_iterations(iterations)?;
    let img = random_image(width, height, seed)?;
    let transform = kind.default_transform();
    let fill = [0.0f32; 3];
    for _ in 0..WARMUP_RUNS {
        run_once(&img, &transform, &fill)?;
    }
    let samples = (0..iterations).map(|_| run_once(&img, &transform, &fill)).collect::<Result<Vec<_>>>()?;
    timing_report(kind, &img, &samples)
}

/// Times both pipelines with their runs interleaved, so drift in machine
/// load affects them alike. Returns `(lcm, mpd)`.
pub fn time_both(
    width: usize,
    height: usize,
    iterations: usize,
    seed: u64,
) -> Result<(TimingReport, TimingReport)> {
    check_size(width, height)?;
    check_iterations(iterations)?;
    let img = random_image(width, height, seed)?;
    let lcm = TransformKind::Lcm.default_transform();
    let mpd = TransformKind::Mpd.default_transform();
    let fill = [0.0f32; 3];
    for _ in 0..WARMUP_RUNS {
        run_once(&img, &lcm, &fill)?;
        run_once(&img, &mpd, &fill)?;
    }
    let mut lcm_s = Vec::with_capacity(iterations);
    let mut mpd_s = Vec::with_capacity(iterations);
    for i in 0..iterations {
        // Alternate which pipeline goes first.
        if i % 2 == 0 {
            lcm_s.push(run_once(&img, &lcm, &fill)?);
            mpd_s.push(run_once(&img, &mpd, &fill)?);
        } else {
            mpd_s.push(run_once(&img, &mpd, &fill)?);
            lcm_s.push(run_once(&img, &lcm, &fill)?);
        }
    }
    Ok((timing_report(TransformKind::Lcm, &img, &lcm_s)?, timing_report(TransformKind::Mpd, &img, &mpd_s)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonFlops {
    pub rows: Vec<JsonFlopRow>,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonFlopRow {
    pub name: String,
    pub per_pixel: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonTiming {
    pub mean_s: f64,
    pub median_s: f64,
    pub p95_s: f64,
    pub stddev_s: f64,
    pub iterations: usize,
    pub warmup: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReference {
    pub paper_mpd_s: f64,
    pub paper_lcm_s: f64,
}

impl Default for JsonReference {
    fn default() -> Self {
        JsonReference { paper_mpd_s: REFERENCE_MPD_SECONDS, paper_lcm_s: REFERENCE_LCM_SECONDS }
    }
}

/// The JSON benchmark report for one transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub transform: TransformKind,
    pub width: usize,
    pub height: usize,
    pub flops: JsonFlops,
    pub timing: Option<JsonTiming>,
    pub reference: JsonReference,
}

impl BenchReport {
    pub fn new(flops: &FlopReport, timing: Option<&TimingReport>) -> BenchReport {
        BenchReport {
            transform: flops.transform,
            width: flops.width,
            height: flops.height,
            flops: JsonFlops {
                rows: flops
                    .rows
                    .iter()
                    .map(|r| JsonFlopRow { name: r.name.clone(), per_pixel: r.per_pixel, total: r.total })
                    .collect(),
                total: flops.total_flops,
            },
            timing: timing.map(|t| JsonTiming {
                mean_s: t.per_image_seconds.mean,
                median_s: t.per_image_seconds.median,
                p95_s: t.per_image_seconds.p95,
                stddev_s: t.per_image_seconds.stddev,
                iterations: t.iterations,
                warmup: t.warmup,
            }),
            reference: JsonReference::default(),
        }
    }
}

/// Both reports plus derived ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchComparison {
    pub lcm: BenchReport,
    pub mpd: BenchReport,
    pub flop_reduction: f64,
    /// Measured mean LCM time over measured mean MPD time, when both were timed.
    pub time_ratio_lcm_over_mpd: Option<f64>,
    /// Reference epoch-time ratio, attached when both timings are present.
    pub reference_epoch_ratio: Option<f64>,
}

impl BenchComparison {
    pub fn new(lcm: BenchReport, mpd: BenchReport) -> Result<BenchComparison> {
        let ratio = match (&lcm.timing, &mpd.timing) {
            (Some(l), Some(m)) if m.mean_s > 0.0 => Some(l.mean_s / m.mean_s),
            _ => None,
        };
        Ok(BenchComparison {
            flop_reduction: flop_reduction(lcm.width, lcm.height)?,
            time_ratio_lcm_over_mpd: ratio,
            reference_epoch_ratio: ratio.map(|_| REFERENCE_EPOCH_RATIO),
            lcm,
            mpd,
        })
    }
}
