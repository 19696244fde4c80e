//! Builds a subpixel lookup table from a panel calibration file.
//!
//! Run with `cargo run --release --example build_map`. The map is the
//! expensive, panel-specific half of rendering; build it once per panel
//! and layout, then feed it to `quilt_to_native` or the `stream` driver.

use std::path::Path;

use holoquilt::{build_lut, derive_mapping_params, Calibration, LutMap, QuiltLayout};

fn main() -> holoquilt::Result<()> {
    let cal_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/sample_calibration.json");
    let text = std::fs::read_to_string(&cal_path).expect("sample calibration ships with the repo");
    let cal = Calibration::parse(&text)?;
    cal.validate()?;

    let (native_w, native_h) = cal.native_dims();
    println!(
        "panel {serial}: {native_w}x{native_h} at {dpi} dpi, lens pitch {pitch}",
        serial = cal.serial,
        dpi = cal.dpi,
        pitch = cal.pitch,
    );

    // 32 views is a comfortable budget for this panel's ~40 degree cone.
    let layout = QuiltLayout::new(8, 4, 512, 256);
    let params = derive_mapping_params(&cal, &layout);
    println!(
        "derived: pitch {:.4} subpixels/lens, slant tangent {:.6}, {} views{}",
        params.pitch_px,
        params.tan_alpha,
        params.total_views,
        if params.inverted_views { " (inverted order)" } else { "" },
    );

    let started = std::time::Instant::now();
    let map = build_lut(&params, &layout, native_w, native_h);
    println!(
        "built {} entries in {:.3} s",
        map.entries().len(),
        started.elapsed().as_secs_f64()
    );

    let out = std::env::temp_dir().join("sample_panel.map");
    map.save(&out)?;
    let bytes = std::fs::metadata(&out).expect("just wrote it").len();
    println!("wrote {} ({:.1} MiB)", out.display(), bytes as f64 / (1024.0 * 1024.0));

    // round-trips exactly
    assert_eq!(LutMap::load(&out)?, map);
    Ok(())
}
