//! Applies a prebuilt map to a quilt — the hot path of the renderer.
//! Every native subpixel is one table lookup and one byte copy, so this
//! runs at display rate regardless of how the quilt was produced.
//!
//! Run with `cargo run --release --example quilt_to_native`.

use std::path::Path;

use holoquilt::{apply_lut, build_lut, derive_mapping_params, Calibration, Image, PixelCoord, QuiltLayout};

fn main() -> holoquilt::Result<()> {
    let cal_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/sample_calibration.json");
    let text = std::fs::read_to_string(&cal_path).expect("sample calibration ships with the repo");
    let cal = Calibration::parse(&text)?;
    let (native_w, native_h) = cal.native_dims();

    let layout = QuiltLayout::new(8, 4, 512, 256);
    let map = build_lut(&derive_mapping_params(&cal, &layout), &layout, native_w, native_h);

    // a quilt that makes the view assignment visible: each tile gets its
    // own hue ramp, so view boundaries show up as color seams
    let mut quilt = Image::new(layout.quilt_width(), layout.quilt_height());
    for y in 0..quilt.height() {
        for x in 0..quilt.width() {
            let view = (y / layout.view_height) * layout.cols + (x / layout.view_width);
            let ramp = (x % layout.view_width * 255 / layout.view_width) as u8;
            quilt.set_pixel(
                PixelCoord { x, y },
                [(view * 8) as u8, ramp, 255 - (view * 7) as u8],
            );
        }
    }

    let started = std::time::Instant::now();
    let native = apply_lut(&map, &quilt)?;
    let once = started.elapsed().as_secs_f64();
    println!(
        "{}x{} quilt -> {}x{} native in {:.3} s ({:.1} frames/s)",
        quilt.width(),
        quilt.height(),
        native.width(),
        native.height(),
        once,
        1.0 / once
    );

    let out = std::env::temp_dir().join("native_test_card.png");
    native.save_png(&out)?;
    println!("wrote {}", out.display());
    Ok(())
}
