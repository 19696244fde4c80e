//! Turns a stereo pair into a native image for slanted-lenticular
//! lightfield displays, in three stages:
//!
//! 1. [`morph::generate_views`] interpolates the in-between camera
//!    positions from the two real ones, using block-matching disparity or
//!    pyramidal optical flow;
//! 2. [`quilt::assemble_quilt`] tiles the views into a single texture,
//!    view 0 at the bottom-left;
//! 3. [`lenmap::apply_lut`] gathers one quilt sample per native subpixel
//!    through a precomputed map, so the per-frame cost of the display
//!    geometry is a flat memory walk.
//!
//! The map depends only on the panel (described by a calibration JSON,
//! see [`calibration::Calibration`]) and the quilt layout, so it is built
//! once with [`lenmap::build_lut`] and reused for every frame. The
//! `examples/` directory has one runnable program per stage, plus a
//! streaming driver; the `holoquilt` binary exposes the same operations
//! as subcommands.

pub mod calibration;
pub mod cli;
pub mod config;
pub mod error;
pub mod imaging;
pub mod lenmap;
pub mod morph;
pub mod pipeline;
pub mod quilt;

pub use calibration::{derive_mapping_params, Calibration, MappingParams};
pub use config::{parse_stream_config, FrameSourceSpec, StreamConfig};
pub use error::{Error, Result};
pub use imaging::{Image, PixelCoord, CHANNELS};
pub use lenmap::{apply_lut, build_lut, view_index, LutMap, SubpixelCoord};
pub use morph::{
    compute_disparity, compute_field, compute_flow, generate_views, synthesize_view,
    CorrespondenceField, FieldMode, Method, MorphParams,
};
pub use pipeline::{
    benchmark_csv, benchmark_views, process_frame, run_stream, BenchRow, FrameSource, Stage,
    StreamSummary, TimingReport,
};
pub use quilt::{assemble_quilt, parse_layout, split_quilt, QuiltLayout};
