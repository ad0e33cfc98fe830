//! Probability-gated batch augmentation over a directory of images.
//!
//! Files are processed in lexicographic name order. File `i` owns ChaCha8
//! stream `i` under the batch seed; its first draw decides whether the view is
//! applied and, for random view choice, its second draw picks the direction.
//! Because each decision depends only on `(seed, i)`, worker scheduling never
//! changes the outcome.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::grid::WarpMode;
use crate::io::{decode_image, encode_image, ImageFormat};
use crate::lcm::LogParams;
use crate::transform::Transform;
use crate::views::{synthesize_view, Direction, ViewOptions};

pub const MANIFEST_NAME: &str = "manifest.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViewChoice {
    Fixed(Direction),
    UniformRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentPolicy {
    pub probability: f64,
    pub view_choice: ViewChoice,
    pub seed: u64,
}

impl AugmentPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(WarpError::Config(format!(
                "probability must lie in [0, 1], got {}",
                self.probability
            )));
        }
        Ok(())
    }

    /// The decision for file `index`: whether to apply, and which view.
    pub fn draw(&self, index: u64) -> (bool, Direction) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let applied = rng.random::<f64>() < self.probability;
        let view = match self.view_choice {
            ViewChoice::Fixed(d) => d,
            ViewChoice::UniformRandom => Direction::ALL[rng.random_range(0..4)],
        };
        (applied, view)
    }
}

/// One line of `manifest.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub input: String,
    pub output: String,
    /// The applied view, `null` for copy-through.
    pub view: Option<Direction>,
    pub applied: bool,
    pub params: LogParams,
    pub mode: WarpMode,
    pub seed: u64,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileFailure {
    pub input: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentSummary {
    pub processed: usize,
    pub transformed: usize,
    pub failed: Vec<FileFailure>,
    pub manifest: PathBuf,
}

/// Image files (`.png`, `.ppm`) directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| WarpError::io(dir, e))? {
        let entry = entry.map_err(|e| WarpError::io(dir, e))?;
        let path = entry.path();
        if !path.is_file() || ImageFormat::from_path(&path).is_none() {
            continue;
        }
        if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
            names.push(name.to_string());
        }
    }
    names.sort();
    Ok(names)
}

fn process_one(
    index: u64,
    name: &str,
    input_dir: &Path,
    output_dir: &Path,
    policy: &AugmentPolicy,
    params: &LogParams,
    options: &ViewOptions,
) -> Result<ManifestEntry> {
    let src = input_dir.join(name);
    let dst = output_dir.join(name);
    let (applied, view) = policy.draw(index);
    let bytes = fs::read(&src).map_err(|e| WarpError::io(&src, e))?;
    if applied {
        let img = decode_image(&bytes)?;
        let format = ImageFormat::from_path(&dst).unwrap_or(ImageFormat::Png);
        let out = synthesize_view(&img, &view.spec(), &Transform::Log(*params), options)?;
        fs::write(&dst, encode_image(&out, format)?).map_err(|e| WarpError::io(&dst, e))?;
    } else {
        fs::write(&dst, &bytes).map_err(|e| WarpError::io(&dst, e))?;
    }
    Ok(ManifestEntry {
        input: name.to_string(),
        output: name.to_string(),
        view: applied.then_some(view),
        applied,
        params: *params,
        mode: options.mode,
        seed: policy.seed,
        index,
    })
}

/// Applies a view to each image in `input_dir` with the policy's probability,
/// copying the rest through byte for byte, and writes [`MANIFEST_NAME`].
///
/// Unreadable or undecodable files are skipped and reported in
/// [`AugmentSummary::failed`]; they keep their index in the random stream.
pub fn augment_batch(
    input_dir: &Path,
    output_dir: &Path,
    policy: &AugmentPolicy,
    params: &LogParams,
    options: &ViewOptions,
    threads: usize,
) -> Result<AugmentSummary> {
    policy.validate()?;
    params.check_domain()?;
    let names = list_images(input_dir)?;
    fs::create_dir_all(output_dir).map_err(|e| WarpError::io(output_dir, e))?;

    let run = |(i, name): (usize, &String)| {
        process_one(i as u64, name, input_dir, output_dir, policy, params, options)
            .map_err(|e| FileFailure { input: name.clone(), error: e.to_string() })
    };
    let results: Vec<std::result::Result<ManifestEntry, FileFailure>> =
        run_indexed(&names, threads.max(1), run)?;

    let mut manifest = String::new();
    let mut failed = Vec::new();
    let (mut processed, mut transformed) = (0, 0);
    for r in results {
        match r {
            Ok(entry) => {
                processed += 1;
                transformed += entry.applied as usize;
                manifest.push_str(&serde_json::to_string(&entry).expect("manifest entry serializes"));
                manifest.push('\n');
            }
            Err(f) => failed.push(f),
        }
    }
    let manifest_path = output_dir.join(MANIFEST_NAME);
    fs::write(&manifest_path, manifest).map_err(|e| WarpError::io(&manifest_path, e))?;
    Ok(AugmentSummary { processed, transformed, failed, manifest: manifest_path })
}

#[cfg(feature = "batch")]
fn run_indexed<T, F>(names: &[String], threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn((usize, &String)) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if threads == 1 {
        return Ok(names.iter().enumerate().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| WarpError::Config(format!("cannot start {threads} workers: {e}")))?;
    Ok(pool.install(|| names.par_iter().enumerate().map(&f).collect()))
}

#[cfg(not(feature = "batch"))]
fn run_indexed<T, F>(names: &[String], _threads: usize, f: F) -> Result<Vec<T>>
where
    F: Fn((usize, &String)) -> T,
{
    Ok(names.iter().enumerate().map(f).collect())
}
