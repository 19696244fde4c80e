//! The full streaming loop against a synthetic recording: a directory of
//! side-by-side frames, an INI config describing them, a map, and
//! `run_stream` pacing the whole thing at the configured frame rate.
//!
//! Run with `cargo run --release --example stream_sequence`. Per-frame
//! stage timings appear on standard error, exactly as the `stream`
//! subcommand prints them.

use holoquilt::{
    build_lut, derive_mapping_params, parse_stream_config, Calibration, Image, MorphParams,
    PixelCoord, QuiltLayout,
};

fn test_card(width: u32, height: u32, shift: i64) -> Image {
    let hash = |x: i64, y: i64| -> u8 {
        let mut v = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
        v ^= v >> 33;
        (v.wrapping_mul(0xFF51_AFD7_ED55_8CCD) >> 56) as u8
    };
    let mut img = Image::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let sx = x as i64 - shift;
            let coarse = hash(sx.div_euclid(16), (y as i64).div_euclid(16));
            let fine = hash(sx.div_euclid(5), (y as i64).div_euclid(5));
            let base = ((coarse as u32 * 2 + fine as u32) / 3) as u8;
            img.set_pixel(
                PixelCoord { x, y },
                [base, base.wrapping_add(40), 255 - base],
            );
        }
    }
    img
}

fn main() -> holoquilt::Result<()> {
    let work = std::env::temp_dir().join("holoquilt_stream_demo");
    let frames = work.join("frames");
    std::fs::create_dir_all(&frames).expect("temp dir is writable");

    // six frames of side-by-side stereo; the scene drifts one pixel per
    // frame and the eye separation stays at 4
    for k in 0..6i64 {
        let left = test_card(160, 90, k);
        let right = test_card(160, 90, k + 4);
        let mut sbs = Image::new(320, 90);
        for y in 0..90 {
            for x in 0..160 {
                let src = PixelCoord { x, y };
                sbs.set_pixel(src, left.pixel(src));
                sbs.set_pixel(PixelCoord { x: x + 160, y }, right.pixel(src));
            }
        }
        sbs.save_png(&frames.join(format!("{k:04}.png")))?;
    }

    let config = parse_stream_config(
        "[camera]\n\
         devNumber=-1\n\
         width=320\n\
         height=90\n\
         fps=12\n\
         file=\"frames\"\n\
         [processing]\n\
         width=160\n\
         height=90\n\
         [native]\n\
         width=640\n\
         height=360\n",
    )?;

    // a map for a small 640x360 panel with the sample lens geometry
    let mut cal = Calibration::parse(
        &std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("examples/data/sample_calibration.json"),
        )
        .expect("sample calibration ships with the repo"),
    )?;
    cal.screen_w = 640.0;
    cal.screen_h = 360.0;
    let layout = QuiltLayout::new(4, 2, 160, 90);
    let map = build_lut(&derive_mapping_params(&cal, &layout), &layout, 640, 360);

    let out_dir = work.join("native");
    let summary = holoquilt::run_stream(
        &config,
        &map,
        &layout,
        &MorphParams::default(),
        &work,
        &out_dir,
    )?;
    println!(
        "{} frames -> {} (wall per frame: mean {:.3} s, max {:.3} s; paced at {} fps)",
        summary.frames,
        out_dir.display(),
        summary.mean_wall_seconds,
        summary.max_wall_seconds,
        config.fps
    );
    Ok(())
}
