//! Frame-at-a-time streaming: pull stereo pairs from disk, morph views,
//! assemble the quilt, gather the native image, write it out — with the
//! same per-stage CPU/wall instrumentation the original tooling logs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{FrameSourceSpec, StreamConfig};
use crate::error::{Error, Result};
use crate::imaging::Image;
use crate::lenmap::{apply_lut, LutMap};
use crate::morph::{generate_views, Method, MorphParams};
use crate::quilt::{assemble_quilt, QuiltLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Read,
    Processing,
    Write,
}

impl Stage {
    /// The announce line printed above the elapsed times.
    pub fn label(&self) -> &'static str {
        match self {
            Stage::Read => "Reading files",
            Stage::Processing => "Processing step",
            Stage::Write => "Writing file",
        }
    }
}

/// CPU and wall clock cost of one pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReport {
    pub stage: Stage,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
}

impl fmt::Display for TimingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.stage.label())?;
        writeln!(f, "Elapsed time (cpu time): {:.6} s", self.cpu_seconds)?;
        writeln!(f, "Elapsed time (wall clock): {:.6} s", self.wall_seconds)
    }
}

/// Process CPU time (all threads) in seconds.
fn cpu_time_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

pub(crate) struct StageClock {
    wall: Instant,
    cpu: f64,
}

impl StageClock {
    pub(crate) fn start() -> StageClock {
        StageClock {
            wall: Instant::now(),
            cpu: cpu_time_seconds(),
        }
    }

    pub(crate) fn finish(self, stage: Stage) -> TimingReport {
        TimingReport {
            stage,
            cpu_seconds: (cpu_time_seconds() - self.cpu).max(0.0),
            wall_seconds: self.wall.elapsed().as_secs_f64(),
        }
    }
}

enum SourceKind {
    SideBySide(Vec<PathBuf>),
    Dual(Vec<PathBuf>, Vec<PathBuf>),
}

/// Ordered stereo frame sequence backed by directories of PNGs.
pub struct FrameSource {
    kind: SourceKind,
    cursor: usize,
    // first decoded size per stream; later frames must match
    sbs_dims: Option<(u32, u32)>,
    left_dims: Option<(u32, u32)>,
    right_dims: Option<(u32, u32)>,
}

pub(crate) fn list_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_png = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("png"));
        if is_png {
            frames.push(path);
        }
    }
    frames.sort();
    if frames.is_empty() {
        return Err(Error::EmptySource(dir.to_path_buf()));
    }
    Ok(frames)
}

impl FrameSource {
    /// Frames holding both eyes in one image, left half | right half.
    pub fn side_by_side(dir: &Path) -> Result<FrameSource> {
        Ok(FrameSource {
            kind: SourceKind::SideBySide(list_pngs(dir)?),
            cursor: 0,
            sbs_dims: None,
            left_dims: None,
            right_dims: None,
        })
    }

    /// One directory per eye; sequences must pair up one-to-one.
    pub fn dual(left_dir: &Path, right_dir: &Path) -> Result<FrameSource> {
        let left = list_pngs(left_dir)?;
        let right = list_pngs(right_dir)?;
        if left.len() != right.len() {
            return Err(Error::DualLengthMismatch {
                left: left.len(),
                right: right.len(),
            });
        }
        Ok(FrameSource {
            kind: SourceKind::Dual(left, right),
            cursor: 0,
            sbs_dims: None,
            left_dims: None,
            right_dims: None,
        })
    }

    /// Resolves a parsed config against the directory layout used by the
    /// CLI: `file=<clip>` reads side-by-side frames from `<base>/<clip>/`,
    /// `devNumber=N` reads from `<base>/camN/`.
    pub fn from_config(config: &StreamConfig, base_dir: &Path) -> Result<FrameSource> {
        match &config.source {
            FrameSourceSpec::File { path } => FrameSource::side_by_side(&base_dir.join(path)),
            FrameSourceSpec::SingleDevice { dev } => {
                FrameSource::side_by_side(&base_dir.join(format!("cam{dev}")))
            }
            FrameSourceSpec::DualDevice { dev0, dev1 } => FrameSource::dual(
                &base_dir.join(format!("cam{dev0}")),
                &base_dir.join(format!("cam{dev1}")),
            ),
        }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            SourceKind::SideBySide(f) => f.len(),
            SourceKind::Dual(l, _) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_dims(
        slot: &mut Option<(u32, u32)>,
        img: &Image,
        path: &Path,
    ) -> Result<()> {
        let dims = (img.width(), img.height());
        match slot {
            None => {
                *slot = Some(dims);
                Ok(())
            }
            Some(expected) if *expected == dims => Ok(()),
            Some(expected) => Err(Error::DimensionMismatch(format!(
                "{} is {}x{}, stream started at {}x{}",
                path.display(),
                dims.0,
                dims.1,
                expected.0,
                expected.1
            ))),
        }
    }

    /// Loads the next stereo pair, or `None` when the sequence ends.
    pub fn next_pair(&mut self) -> Option<Result<(Image, Image)>> {
        if self.cursor >= self.len() {
            return None;
        }
        let index = self.cursor;
        self.cursor += 1;
        let result = match &self.kind {
            SourceKind::SideBySide(frames) => {
                let path = &frames[index];
                Image::load_png(path).and_then(|img| {
                    Self::check_dims(&mut self.sbs_dims, &img, path)?;
                    img.split_side_by_side()
                })
            }
            SourceKind::Dual(left_frames, right_frames) => {
                let lp = &left_frames[index];
                let rp = &right_frames[index];
                Image::load_png(lp).and_then(|l| {
                    Self::check_dims(&mut self.left_dims, &l, lp)?;
                    let r = Image::load_png(rp)?;
                    Self::check_dims(&mut self.right_dims, &r, rp)?;
                    Ok((l, r))
                })
            }
        };
        Some(result)
    }
}

/// One frame through the full pipeline: resize both eyes to the processing
/// resolution, morph the quilt's worth of views, assemble, and gather the
/// native image. Returns (native, quilt, timings) — the timing list covers
/// the processing stage; read/write are timed by the callers that do I/O.
pub fn process_frame(
    left: &Image,
    right: &Image,
    lut: &LutMap,
    layout: &QuiltLayout,
    mparams: &MorphParams,
    proc_dims: (u32, u32),
) -> Result<(Image, Image, Vec<TimingReport>)> {
    if proc_dims != (layout.view_width, layout.view_height) {
        return Err(Error::DimensionMismatch(format!(
            "processing resolution {}x{} does not match the layout's view size {}x{}",
            proc_dims.0, proc_dims.1, layout.view_width, layout.view_height
        )));
    }
    if lut.layout() != layout {
        return Err(Error::DimensionMismatch(format!(
            "map was built for a {}x{} quilt of {}x{} views, not {}x{} of {}x{}",
            lut.layout().cols,
            lut.layout().rows,
            lut.layout().view_width,
            lut.layout().view_height,
            layout.cols,
            layout.rows,
            layout.view_width,
            layout.view_height
        )));
    }
    let clock = StageClock::start();
    let small_left = left.resize(proc_dims.0, proc_dims.1);
    let small_right = right.resize(proc_dims.0, proc_dims.1);
    let views = generate_views(&small_left, &small_right, layout.total_views(), mparams)?;
    let quilt = assemble_quilt(&views, layout)?;
    let native = apply_lut(lut, &quilt)?;
    let timing = clock.finish(Stage::Processing);
    Ok((native, quilt, vec![timing]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamSummary {
    pub frames: usize,
    pub mean_wall_seconds: f64,
    pub max_wall_seconds: f64,
}

/// Streams every frame of the configured source through the pipeline,
/// writing native PNGs numbered `000000.png`, `000001.png`, … into
/// `out_dir`.
///
/// Relative source paths resolve against `base_dir` (the CLI passes the
/// config file's directory). Frames are processed strictly in order; when a
/// frame finishes early the loop sleeps out the rest of its 1/fps budget,
/// and when processing is slower than the target rate nothing is dropped.
/// Per-frame stage timings go to standard error.
pub fn run_stream(
    config: &StreamConfig,
    lut: &LutMap,
    layout: &QuiltLayout,
    mparams: &MorphParams,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<StreamSummary> {
    let mut source = FrameSource::from_config(config, base_dir)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let frame_budget = std::time::Duration::from_secs_f64(1.0 / config.fps as f64);
    let proc_dims = (config.processing_width, config.processing_height);

    let mut completed = 0usize;
    let mut wall_sum = 0.0f64;
    let mut wall_max = 0.0f64;
    let abort = |completed: usize, source: Error| Error::StreamAborted {
        completed,
        source: Box::new(source),
    };

    loop {
        let frame_start = Instant::now();
        let read_clock = StageClock::start();
        let (left, right) = match source.next_pair() {
            None => break,
            Some(pair) => pair.map_err(|e| abort(completed, e))?,
        };
        eprint!("{}", read_clock.finish(Stage::Read));

        if mparams.method == Method::Flow {
            eprintln!("Deepflow mode enabled");
        }
        let (native, _quilt, timings) =
            process_frame(&left, &right, lut, layout, mparams, proc_dims)
                .map_err(|e| abort(completed, e))?;
        for timing in &timings {
            eprint!("{timing}");
        }

        let write_clock = StageClock::start();
        let out_path = out_dir.join(format!("{completed:06}.png"));
        native
            .save_png(&out_path)
            .map_err(|e| abort(completed, e))?;
        eprint!("{}", write_clock.finish(Stage::Write));

        completed += 1;
        let frame_wall = frame_start.elapsed().as_secs_f64();
        wall_sum += frame_wall;
        wall_max = wall_max.max(frame_wall);

        let elapsed = frame_start.elapsed();
        if elapsed < frame_budget {
            std::thread::sleep(frame_budget - elapsed);
        }
    }

    Ok(StreamSummary {
        frames: completed,
        mean_wall_seconds: wall_sum / completed as f64,
        max_wall_seconds: wall_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub views: u32,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
}

/// Times `generate_views` + quilt assembly for each requested view count
/// (views laid out in a single row, at the input resolution).
pub fn benchmark_views(
    left: &Image,
    right: &Image,
    mparams: &MorphParams,
    view_counts: &[u32],
) -> Result<Vec<BenchRow>> {
    if view_counts.is_empty() {
        return Err(Error::InvalidArgument(
            "benchmark needs at least one view count".into(),
        ));
    }
    if let Some(&bad) = view_counts.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!(
            "benchmark view counts must be >= 2, got {bad}"
        )));
    }
    let mut rows = Vec::with_capacity(view_counts.len());
    for &n in view_counts {
        let clock = StageClock::start();
        let views = generate_views(left, right, n, mparams)?;
        let layout = QuiltLayout::new(n, 1, left.width(), left.height());
        let quilt = assemble_quilt(&views, &layout)?;
        let timing = clock.finish(Stage::Processing);
        std::hint::black_box(&quilt);
        rows.push(BenchRow {
            views: n,
            cpu_seconds: timing.cpu_seconds,
            wall_seconds: timing.wall_seconds,
        });
    }
    Ok(rows)
}

/// Plot-ready CSV rendering of a benchmark table.
pub fn benchmark_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("views,cpu_s,wall_s\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6}\n",
            row.views, row.cpu_seconds, row.wall_seconds
        ));
    }
    out
}
