use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcmwarp::augment::ViewChoice;
use lcmwarp::bench::TransformKind;
use lcmwarp::{
    ComplexValue, Direction, LogParams, MobiusParams, PadPolicy, Padding, Transform, ViewOptions, WarpError,
    WarpMode,
};

#[derive(Parser, Debug)]
#[command(name = "lcmwarp", version, about = "Log conformal and Mobius perspective warps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Warp one image into a single view.
    Warp(WarpArgs),
    /// Write all four views of one image as <stem>_{left,right,top,bottom}.png.
    Views(ViewsArgs),
    /// Print the FLOP table and time the grid + bilinear pipeline.
    Bench(BenchArgs),
    /// Check conformality and non-linearity of the log map.
    Verify(VerifyArgs),
    /// Apply a view to a directory of images with a given probability.
    Augment(AugmentArgs),
}

/// `re,im` pair, e.g. `1,0` or `-0.5,2`.
pub fn parse_complex(s: &str) -> Result<ComplexValue, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected 're,im', got '{s}'"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{t}' is not a finite number"))
    };
    Ok(ComplexValue::new(num(re)?, num(im)?))
}

/// Comma-separated numbers, parsed as one flag value.
#[derive(Clone, Debug, PartialEq)]
pub struct Floats(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    Lcm,
    Mobius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bilinear,
    Scatter,
}

impl From<ModeArg> for WarpMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bilinear => WarpMode::InverseBilinear,
            ModeArg::Scatter => WarpMode::ForwardScatter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PadArg {
    Zero,
    Replicate,
    Reflect,
}

impl From<PadArg> for PadPolicy {
    fn from(p: PadArg) -> Self {
        match p {
            PadArg::Zero => PadPolicy::Zero,
            PadArg::Replicate => PadPolicy::Replicate,
            PadArg::Reflect => PadPolicy::Reflect,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ViewArg {
    Left,
    Right,
    Top,
    Bottom,
}

impl From<ViewArg> for Direction {
    fn from(v: ViewArg) -> Self {
        match v {
            ViewArg::Left => Direction::Left,
            ViewArg::Right => Direction::Right,
            ViewArg::Top => Direction::Top,
            ViewArg::Bottom => Direction::Bottom,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AugmentViewArg {
    Random,
    Left,
    Right,
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchTransformArg {
    Lcm,
    Mpd,
    Both,
}

/// Log map parameters.
#[derive(Args, Debug, Clone)]
pub struct LogArgs {
    /// Log map scale k as re,im.
    #[arg(long, value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
    pub k: ComplexValue,
    /// Log map offset c as re,im.
    #[arg(long, value_parser = parse_complex, default_value = "2,0", allow_hyphen_values = true)]
    pub c: ComplexValue,
}

impl LogArgs {
    /// Parameters that are also safe on the whole image domain.
    pub fn params(&self) -> Result<LogParams, WarpError> {
        let p = LogParams::new(self.k, self.c)?;
        p.check_domain()?;
        Ok(p)
    }
}

/// Transform selection plus the parameters of both families.
#[derive(Args, Debug, Clone)]
pub struct TransformArgs {
    #[arg(long, value_enum, default_value_t = TransformArg::Lcm)]
    pub transform: TransformArg,
    #[command(flatten)]
    pub log: LogArgs,
    /// Mobius a as re,im.
    #[arg(long, value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
    pub a: ComplexValue,
    /// Mobius b as re,im.
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    pub b: ComplexValue,
    /// Mobius c as re,im (the log map already owns --c).
    #[arg(long, value_parser = parse_complex, default_value = "0.5,0", allow_hyphen_values = true)]
    pub cc: ComplexValue,
    /// Mobius d as re,im.
    #[arg(long, value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
    pub d: ComplexValue,
}

impl TransformArgs {
    pub fn transform(&self) -> Result<Transform, WarpError> {
        match self.transform {
            TransformArg::Lcm => Ok(Transform::Log(self.log.params()?)),
            TransformArg::Mobius => {
                Ok(Transform::Mobius(MobiusParams::new(self.a, self.b, self.cc, self.d)?))
            }
        }
    }
}

/// How the warp is rendered.
#[derive(Args, Debug, Clone)]
pub struct RenderArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Bilinear)]
    pub mode: ModeArg,
    /// Padding margin in pixels on every side.
    #[arg(long, default_value_t = 8)]
    pub pad: usize,
    #[arg(long, value_enum, default_value_t = PadArg::Reflect)]
    pub pad_policy: PadArg,
    /// Fill for pixels with no source, one value in [0, 1] per channel
    /// (or a single value for all channels). Default 0.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub fill: Option<Floats>,
}

impl RenderArgs {
    /// Options for an image with `channels` channels.
    pub fn options(&self, channels: usize) -> Result<ViewOptions, WarpError> {
        let options = self.options_per_image()?;
        match &options.fill {
            Some(v) if v.len() != 1 && v.len() != channels => {
                Err(WarpError::ChannelMismatch { expected: channels, got: v.len() })
            }
            _ => Ok(options),
        }
    }

    /// Options whose fill is matched to each image's channel count later;
    /// a single value is broadcast.
    pub fn options_per_image(&self) -> Result<ViewOptions, WarpError> {
        let fill: Option<Vec<f32>> = self.fill.as_ref().map(|v| v.0.iter().map(|&x| x as f32).collect());
        if let Some(v) = fill.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(WarpError::Config(format!("--fill value {v} outside [0, 1]")));
        }
        Ok(ViewOptions {
            mode: self.mode.into(),
            padding: Padding { margin: self.pad, policy: self.pad_policy.into() },
            fill,
        })
    }
}

#[derive(Args, Debug)]
pub struct WarpArgs {
    /// Input image (.png or .ppm).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output image; the extension picks the format.
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ViewArg::Left)]
    pub view: ViewArg,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Args, Debug)]
pub struct ViewsArgs {
    /// Input image (.png or .ppm).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output directory; defaults to the input's directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = BenchTransformArg::Both)]
    pub transform: BenchTransformArg,
    /// Square frame size in pixels.
    #[arg(long, default_value_t = 224)]
    pub size: usize,
    /// Timed iterations after 3 warm-up runs; 0 reports FLOPs only.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Seed for the random benchmark image.
    #[arg(long, env = "LCMWARP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Print expected FLOPs per image at these probabilities as CSV and exit.
    #[arg(long, value_parser = parse_list)]
    pub curve: Option<Floats>,
}

impl BenchArgs {
    pub fn kinds(&self) -> Vec<TransformKind> {
        match self.transform {
            BenchTransformArg::Lcm => vec![TransformKind::Lcm],
            BenchTransformArg::Mpd => vec![TransformKind::Mpd],
            BenchTransformArg::Both => vec![TransformKind::Lcm, TransformKind::Mpd],
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub log: LogArgs,
    /// Number of sample points in the image domain.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    #[arg(long, env = "LCMWARP_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    /// Directory of input images (.png, .ppm).
    #[arg(long)]
    pub in_dir: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Probability of applying a view to each image.
    #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
    pub prob: f64,
    #[arg(long, env = "LCMWARP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// View to apply, or one drawn uniformly per image.
    #[arg(long, value_enum, default_value_t = AugmentViewArg::Random)]
    pub view: AugmentViewArg,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub log: LogArgs,
    #[command(flatten)]
    pub render: RenderArgs,
}

impl AugmentArgs {
    pub fn view_choice(&self) -> ViewChoice {
        let fixed = |v: ViewArg| ViewChoice::Fixed(v.into());
        match self.view {
            AugmentViewArg::Random => ViewChoice::UniformRandom,
            AugmentViewArg::Left => fixed(ViewArg::Left),
            AugmentViewArg::Right => fixed(ViewArg::Right),
            AugmentViewArg::Top => fixed(ViewArg::Top),
            AugmentViewArg::Bottom => fixed(ViewArg::Bottom),
        }
    }
}
