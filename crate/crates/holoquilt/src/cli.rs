//! Subcommand surface of the `holoquilt` binary. Exit codes: 0 success,
//! 1 operation failure, 2 usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::calibration::{derive_mapping_params, Calibration};
use crate::config::parse_stream_config;
use crate::error::{Error, Result};
use crate::imaging::Image;
use crate::lenmap::{apply_lut, build_lut, LutMap};
use crate::morph::{generate_views, Method, MorphParams};
use crate::pipeline::{
    benchmark_csv, benchmark_views, list_pngs, process_frame, run_stream, Stage, StageClock,
};
use crate::quilt::{assemble_quilt, parse_layout, QuiltLayout};

#[derive(Debug, Parser)]
#[command(
    name = "holoquilt",
    version,
    about = "Stereo pair to lightfield tooling: morphed quilts and per-subpixel native images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Morph a stereo pair into a quilt of views and write it as a PNG
    Quilt(QuiltArgs),
    /// Build the per-subpixel view map for a calibrated panel
    Map(MapArgs),
    /// Apply a view map to an existing quilt, producing the native image
    Native(NativeArgs),
    /// Assemble a directory of sorted views into a quilt and apply a map
    Images2native(Images2NativeArgs),
    /// Full stereo-pair-to-native composition in one step
    Display(DisplayArgs),
    /// Stream a frame sequence through the pipeline at a fixed rate
    Stream(StreamArgs),
    /// Time view generation across a range of view counts (CSV on stdout)
    Bench(BenchArgs),
}

/// Quilt mask `COLSxROWS`, e.g. `9x5` = 9 columns by 5 rows.
#[derive(Debug, Clone, Copy)]
struct Mask {
    cols: u32,
    rows: u32,
}

fn parse_mask(text: &str) -> std::result::Result<Mask, String> {
    let (cols, rows) = parse_layout(text).map_err(|e| e.to_string())?;
    Ok(Mask { cols, rows })
}

/// Per-view resolution `ROWSxCOLS`, e.g. `240x320` = 240 high by 320 wide.
#[derive(Debug, Clone, Copy)]
struct Resolution {
    width: u32,
    height: u32,
}

fn parse_resolution(text: &str) -> std::result::Result<Resolution, String> {
    let (rows, cols) = parse_layout(text).map_err(|e| e.to_string())?;
    Ok(Resolution {
        width: cols,
        height: rows,
    })
}

#[derive(Debug, Args)]
struct MorphFlags {
    /// Morph with optical flow instead of block-matching disparity
    #[arg(short = 'd', long = "deepflow")]
    deepflow: bool,

    /// Estimate correspondences on images downscaled by this factor
    #[arg(short = 's', long = "subsampling", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    subsampling: u32,
}

impl MorphFlags {
    fn params(&self) -> MorphParams {
        MorphParams {
            method: if self.deepflow {
                Method::Flow
            } else {
                Method::Disparity
            },
            subsampling: self.subsampling,
            ..MorphParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct QuiltArgs {
    /// Left input image (PNG)
    #[arg(short = 'l', long = "left")]
    left: PathBuf,

    /// Right input image (PNG)
    #[arg(short = 'r', long = "right")]
    right: PathBuf,

    /// Quilt mask COLSxROWS
    #[arg(short = 'm', long = "mask", value_parser = parse_mask)]
    mask: Mask,

    #[command(flatten)]
    morph: MorphFlags,

    /// Show elapsed processing time
    #[arg(short = 't', long = "time")]
    time: bool,

    /// Output quilt PNG
    quilt_file: PathBuf,
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Per-view resolution ROWSxCOLS
    #[arg(short = 'r', long = "resolution", value_parser = parse_resolution)]
    resolution: Resolution,

    /// Quilt mask COLSxROWS
    #[arg(short = 'q', long = "quilt", value_parser = parse_mask)]
    quilt: Mask,

    /// Output map file
    #[arg(short = 'm', long = "map")]
    map: PathBuf,

    /// Panel calibration JSON
    cal_file: PathBuf,
}

#[derive(Debug, Args)]
struct NativeArgs {
    /// Quilt mask COLSxROWS
    #[arg(short = 'q', long = "quilt", value_parser = parse_mask)]
    quilt: Mask,

    /// Per-view resolution ROWSxCOLS
    #[arg(short = 'r', long = "resolution", value_parser = parse_resolution)]
    resolution: Resolution,

    /// Apply this map to the given image
    #[arg(short = 'a', long = "apply")]
    apply: PathBuf,

    /// Input quilt PNG
    quilt_file: PathBuf,

    /// Output native PNG
    native_file: PathBuf,
}

#[derive(Debug, Args)]
struct Images2NativeArgs {
    /// Quilt mask COLSxROWS
    #[arg(short = 'q', long = "quilt", value_parser = parse_mask)]
    quilt: Mask,

    /// View map file
    #[arg(short = 'm', long = "map")]
    map: PathBuf,

    /// Directory holding the sorted view PNGs
    dir_path: PathBuf,

    /// Output native PNG
    native_file: PathBuf,
}

#[derive(Debug, Args)]
struct DisplayArgs {
    /// Left input image (PNG)
    #[arg(short = 'l', long = "left")]
    left: PathBuf,

    /// Right input image (PNG)
    #[arg(short = 'r', long = "right")]
    right: PathBuf,

    /// Quilt mask COLSxROWS
    #[arg(short = 'm', long = "mask", value_parser = parse_mask)]
    mask: Option<Mask>,

    /// Quilt mask COLSxROWS (alias kept for existing command lines)
    #[arg(short = 'q', long = "quilt", value_parser = parse_mask)]
    quilt: Option<Mask>,

    #[command(flatten)]
    morph: MorphFlags,

    /// View map file (defines panel geometry and per-view resolution)
    #[arg(short = 'a', long = "apply")]
    apply: PathBuf,

    /// Accepted for compatibility; this build writes files instead
    #[arg(long = "screen")]
    screen: Option<u32>,

    /// Show elapsed processing time
    #[arg(short = 't', long = "time")]
    time: bool,

    /// Output native PNG
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Stream config INI (source paths resolve against its directory)
    #[arg(short = 'c', long = "config")]
    config: PathBuf,

    /// View map file
    #[arg(short = 'm', long = "map")]
    map: PathBuf,

    /// Quilt mask COLSxROWS; must match the map
    #[arg(short = 'q', long = "quilt", value_parser = parse_mask)]
    quilt: Mask,

    #[command(flatten)]
    morph: MorphFlags,

    /// Accepted for compatibility; this build writes files instead
    #[arg(long = "screen")]
    screen: Option<u32>,

    /// Directory for the numbered native PNGs
    #[arg(short = 'o', long = "out-dir")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Left input image (PNG)
    #[arg(short = 'l', long = "left")]
    left: PathBuf,

    /// Right input image (PNG)
    #[arg(short = 'r', long = "right")]
    right: PathBuf,

    #[command(flatten)]
    morph: MorphFlags,

    /// Smallest view count to time
    #[arg(long = "min-views", default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    min_views: u32,

    /// Largest view count to time
    #[arg(long = "max-views", default_value_t = 48, value_parser = clap::value_parser!(u32).range(2..))]
    max_views: u32,
}

/// Parses `std::env::args` and runs the selected command, returning the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap uses 0 for --help/--version and 2 for usage errors
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Quilt(args) => cmd_quilt(args),
        Command::Map(args) => cmd_map(args),
        Command::Native(args) => cmd_native(args),
        Command::Images2native(args) => cmd_images2native(args),
        Command::Display(args) => cmd_display(args),
        Command::Stream(args) => cmd_stream(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn warn_screen_ignored(screen: Option<u32>) {
    if screen.is_some() {
        eprintln!("warning: headless build: --screen ignored");
    }
}

fn cmd_quilt(args: QuiltArgs) -> Result<()> {
    let read_clock = StageClock::start();
    let left = Image::load_png(&args.left)?;
    let right = Image::load_png(&args.right)?;
    let read_timing = read_clock.finish(Stage::Read);
    if args.time {
        eprint!("{read_timing}");
    }

    let params = args.morph.params();
    if params.method == Method::Flow {
        eprintln!("Deepflow mode enabled");
    }
    let process_clock = StageClock::start();
    let layout = QuiltLayout::new(args.mask.cols, args.mask.rows, left.width(), left.height());
    let views = generate_views(&left, &right, layout.total_views(), &params)?;
    let quilt = assemble_quilt(&views, &layout)?;
    let process_timing = process_clock.finish(Stage::Processing);
    if args.time {
        eprint!("{process_timing}");
    }

    let write_clock = StageClock::start();
    quilt.save_png(&args.quilt_file)?;
    let write_timing = write_clock.finish(Stage::Write);
    if args.time {
        eprint!("{write_timing}");
    }
    Ok(())
}

fn cmd_map(args: MapArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.cal_file)
        .map_err(|e| Error::io(&args.cal_file, e))?;
    let cal = Calibration::parse(&text)?;
    cal.validate()?;
    let layout = QuiltLayout::new(
        args.quilt.cols,
        args.quilt.rows,
        args.resolution.width,
        args.resolution.height,
    );
    let params = derive_mapping_params(&cal, &layout);
    let (native_w, native_h) = cal.native_dims();
    let lut = build_lut(&params, &layout, native_w, native_h);
    lut.save(&args.map)
}

fn cmd_native(args: NativeArgs) -> Result<()> {
    let lut = LutMap::load(&args.apply)?;
    let flag_layout = QuiltLayout::new(
        args.quilt.cols,
        args.quilt.rows,
        args.resolution.width,
        args.resolution.height,
    );
    let quilt = Image::load_png(&args.quilt_file)?;
    let map_layout = lut.layout();
    if *map_layout != flag_layout
        || (quilt.width(), quilt.height())
            != (map_layout.quilt_width(), map_layout.quilt_height())
    {
        return Err(Error::DimensionMismatch(format!(
            "flags describe a {}x{} quilt of {}x{} views, the map was built for {}x{} of {}x{}, and the quilt image is {}x{}",
            flag_layout.cols,
            flag_layout.rows,
            flag_layout.view_width,
            flag_layout.view_height,
            map_layout.cols,
            map_layout.rows,
            map_layout.view_width,
            map_layout.view_height,
            quilt.width(),
            quilt.height()
        )));
    }
    let native = apply_lut(&lut, &quilt)?;
    native.save_png(&args.native_file)
}

fn cmd_images2native(args: Images2NativeArgs) -> Result<()> {
    let lut = LutMap::load(&args.map)?;
    let expected = (args.quilt.cols * args.quilt.rows) as usize;
    let paths = match list_pngs(&args.dir_path) {
        Ok(paths) => paths,
        Err(Error::EmptySource(_)) => {
            return Err(Error::ViewCountMismatch { expected, found: 0 })
        }
        Err(other) => return Err(other),
    };
    if paths.len() != expected {
        return Err(Error::ViewCountMismatch {
            expected,
            found: paths.len(),
        });
    }
    let mut views = Vec::with_capacity(expected);
    for path in &paths {
        let view = Image::load_png(path)?;
        if let Some(first) = views.first() {
            let first: &Image = first;
            if (view.width(), view.height()) != (first.width(), first.height()) {
                return Err(Error::DimensionMismatch(format!(
                    "{} is {}x{}, other views are {}x{}",
                    path.display(),
                    view.width(),
                    view.height(),
                    first.width(),
                    first.height()
                )));
            }
        }
        views.push(view);
    }
    let layout = QuiltLayout::new(
        args.quilt.cols,
        args.quilt.rows,
        views[0].width(),
        views[0].height(),
    );
    let quilt = assemble_quilt(&views, &layout)?;
    let native = apply_lut(&lut, &quilt)?;
    native.save_png(&args.native_file)
}

fn cmd_display(args: DisplayArgs) -> Result<()> {
    warn_screen_ignored(args.screen);
    let mask = match (args.mask, args.quilt) {
        (Some(m), Some(q)) if (m.cols, m.rows) != (q.cols, q.rows) => {
            return Err(Error::InvalidArgument(format!(
                "-m {}x{} and -q {}x{} disagree",
                m.cols, m.rows, q.cols, q.rows
            )))
        }
        (Some(m), _) => m,
        (None, Some(q)) => q,
        (None, None) => {
            return Err(Error::InvalidArgument(
                "a quilt mask is required (-m or -q)".into(),
            ))
        }
    };
    let lut = LutMap::load(&args.apply)?;
    let layout = *lut.layout();
    if (layout.cols, layout.rows) != (mask.cols, mask.rows) {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{} does not match the map's {}x{} layout",
            mask.cols, mask.rows, layout.cols, layout.rows
        )));
    }

    let read_clock = StageClock::start();
    let left = Image::load_png(&args.left)?;
    let right = Image::load_png(&args.right)?;
    let read_timing = read_clock.finish(Stage::Read);
    if args.time {
        eprint!("{read_timing}");
    }

    let params = args.morph.params();
    if params.method == Method::Flow {
        eprintln!("Deepflow mode enabled");
    }
    let (native, _quilt, timings) = process_frame(
        &left,
        &right,
        &lut,
        &layout,
        &params,
        (layout.view_width, layout.view_height),
    )?;
    if args.time {
        for timing in &timings {
            eprint!("{timing}");
        }
    }

    let write_clock = StageClock::start();
    native.save_png(&args.out)?;
    let write_timing = write_clock.finish(Stage::Write);
    if args.time {
        eprint!("{write_timing}");
    }
    Ok(())
}

fn cmd_stream(args: StreamArgs) -> Result<()> {
    warn_screen_ignored(args.screen);
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::io(&args.config, e))?;
    let config = parse_stream_config(&text)?;
    let lut = LutMap::load(&args.map)?;
    let layout = *lut.layout();
    if (layout.cols, layout.rows) != (args.quilt.cols, args.quilt.rows) {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{} does not match the map's {}x{} layout",
            args.quilt.cols, args.quilt.rows, layout.cols, layout.rows
        )));
    }
    if (config.processing_width, config.processing_height)
        != (layout.view_width, layout.view_height)
    {
        return Err(Error::DimensionMismatch(format!(
            "config processes at {}x{} but the map expects {}x{} views",
            config.processing_width,
            config.processing_height,
            layout.view_width,
            layout.view_height
        )));
    }
    if (config.native_width, config.native_height) != (lut.native_width(), lut.native_height()) {
        return Err(Error::DimensionMismatch(format!(
            "config targets a {}x{} panel but the map was built for {}x{}",
            config.native_width,
            config.native_height,
            lut.native_width(),
            lut.native_height()
        )));
    }
    let base_dir = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let params = args.morph.params();
    let summary = run_stream(&config, &lut, &layout, &params, &base_dir, &args.out_dir)?;
    eprintln!(
        "Processed {} frames (wall per frame: mean {:.6} s, max {:.6} s)",
        summary.frames, summary.mean_wall_seconds, summary.max_wall_seconds
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.max_views < args.min_views {
        return Err(Error::InvalidArgument(format!(
            "--max-views {} is below --min-views {}",
            args.max_views, args.min_views
        )));
    }
    let left = Image::load_png(&args.left)?;
    let right = Image::load_png(&args.right)?;
    let counts: Vec<u32> = (args.min_views..=args.max_views).collect();
    let rows = benchmark_views(&left, &right, &args.morph.params(), &counts)?;
    print!("{}", benchmark_csv(&rows));
    Ok(())
}
