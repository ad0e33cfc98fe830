mod args;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use lcmwarp::augment::{augment_batch, AugmentPolicy};
use lcmwarp::bench::{
    curve_csv, flop_curve, flop_report, time_both, time_transform, BenchComparison, BenchReport,
    TransformKind,
};
use lcmwarp::io::{read_image, write_image};
use lcmwarp::lcm::{conformality_report_with_step, nonlinearity_witness, WITNESS_PAIR};
use lcmwarp::{synthesize_all_views, synthesize_view, WarpError};

use args::{AugmentArgs, BenchArgs, Cli, Command, VerifyArgs, ViewsArgs, WarpArgs};

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Keep the diagnostic on one line.
        f.write_str(&self.message.replace('\n', " "))
    }
}

impl From<WarpError> for Failure {
    fn from(e: WarpError) -> Self {
        let code = match e {
            WarpError::Config(_)
            | WarpError::InvalidParams(_)
            | WarpError::InvalidArgument(_)
            | WarpError::DomainViolation(_)
            | WarpError::ChannelMismatch { .. } => 1,
            WarpError::Io { .. } | WarpError::Format(_) => 2,
            WarpError::SingularInput { .. }
            | WarpError::NearSingularity { .. }
            | WarpError::DegenerateRange { .. }
            | WarpError::InvalidImage(_) => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Warp(a) => cmd_warp(a),
        Command::Views(a) => cmd_views(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Augment(a) => cmd_augment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn cmd_warp(a: WarpArgs) -> CmdResult {
    let transform = a.transform.transform()?;
    let img = read_image(&a.input)?;
    let options = a.render.options(img.channels())?;
    let out = synthesize_view(&img, &lcmwarp::Direction::from(a.view).spec(), &transform, &options)?;
    write_image(&a.output, &out)?;
    Ok(())
}

fn cmd_views(a: ViewsArgs) -> CmdResult {
    let transform = a.transform.transform()?;
    let img = read_image(&a.input)?;
    let options = a.render.options(img.channels())?;
    let stem = a
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Failure::config(format!("{}: no file name", a.input.display())))?;
    let dir = match &a.out_dir {
        Some(d) => d.clone(),
        None => a.input.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let views = synthesize_all_views(&img, &transform, &options)?;
    for (direction, view) in views.iter() {
        let path = dir.join(format!("{stem}_{direction}.png"));
        write_image(&path, view)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.size == 0 {
        return Err(Failure::config("--size must be at least 1"));
    }
    if let Some(ps) = &a.curve {
        let points = flop_curve(&ps.0, a.size, a.size)?;
        print!("{}", curve_csv(&points));
        return Ok(());
    }
    let report = |kind: TransformKind, timing| -> Result<BenchReport, Failure> {
        Ok(BenchReport::new(&flop_report(kind, a.size, a.size)?, timing))
    };
    let text = match a.kinds().as_slice() {
        [kind] => {
            let timing = match a.iters {
                0 => None,
                n => Some(time_transform(*kind, a.size, a.size, n, a.seed)?),
            };
            serde_json::to_string_pretty(&report(*kind, timing.as_ref())?).expect("report serializes")
        }
        _ => {
            let (lcm_t, mpd_t) = match a.iters {
                0 => (None, None),
                n => {
                    let (l, m) = time_both(a.size, a.size, n, a.seed)?;
                    (Some(l), Some(m))
                }
            };
            let cmp = BenchComparison::new(
                report(TransformKind::Lcm, lcm_t.as_ref())?,
                report(TransformKind::Mpd, mpd_t.as_ref())?,
            )?;
            serde_json::to_string_pretty(&cmp).expect("report serializes")
        }
    };
    match &a.json {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| Failure::io(format!("{}: {e}", path.display())))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let params = a.log.params()?;
    let report = conformality_report_with_step(&params, a.points, a.seed, a.step)?;
    let witness = nonlinearity_witness(&params, WITNESS_PAIR.0, WITNESS_PAIR.1)?;
    println!("points                {}", report.n_points);
    println!("step                  {:e}", report.step);
    println!("max_cr_residual       {:e}", report.max_cr_residual);
    println!("max_angle_error       {:e}", report.max_angle_error);
    println!("max_derivative_error  {:e}", report.max_derivative_error);
    println!("nonlinearity_witness  {witness:.6}");
    if report.max_angle_error < 1e-3 && witness > 0.01 {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            message: format!(
                "bounds violated: angle error {:e} (limit 1e-3), witness {witness:e} (limit 1e-2)",
                report.max_angle_error
            ),
        })
    }
}

fn cmd_augment(a: AugmentArgs) -> CmdResult {
    let params = a.log.params()?;
    let policy = AugmentPolicy { probability: a.prob, view_choice: a.view_choice(), seed: a.seed };
    policy.validate()?;
    if a.threads == 0 {
        return Err(Failure::config("--threads must be at least 1"));
    }
    if !a.in_dir.is_dir() {
        return Err(Failure::io(format!("{}: not a readable directory", a.in_dir.display())));
    }
    let options = a.render.options_per_image()?;
    let summary = augment_batch(&a.in_dir, &a.out_dir, &policy, &params, &options, a.threads)?;
    for f in &summary.failed {
        eprintln!("warning: skipped {}: {}", f.input, f.error);
    }
    println!(
        "processed {} transformed {} failed {} manifest {}",
        summary.processed,
        summary.transformed,
        summary.failed.len(),
        summary.manifest.display()
    );
    Ok(())
}
