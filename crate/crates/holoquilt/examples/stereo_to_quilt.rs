//! Morphs a stereo pair into a full quilt: resize both eyes to the view
//! resolution, interpolate the in-between camera positions, tile.
//!
//! Run with `cargo run --release --example stereo_to_quilt`. Uses a
//! synthetic pair so it works out of the box; point `left`/`right` at
//! real captures to use your own.

use holoquilt::{assemble_quilt, generate_views, Image, MorphParams, PixelCoord, QuiltLayout};

/// Procedural test card: two scales of value noise, so the block matcher
/// has texture to lock onto everywhere.
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
            let sx = x as i64 - shift; // shift the content, not the frame
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
    let layout = QuiltLayout::new(8, 4, 320, 180);
    let left = test_card(640, 360, 0).resize(layout.view_width, layout.view_height);
    let right = test_card(640, 360, 8).resize(layout.view_width, layout.view_height);

    let params = MorphParams::default();
    let started = std::time::Instant::now();
    let views = generate_views(&left, &right, layout.total_views(), &params)?;
    println!(
        "{} views of {}x{} in {:.3} s",
        views.len(),
        layout.view_width,
        layout.view_height,
        started.elapsed().as_secs_f64()
    );

    let quilt = assemble_quilt(&views, &layout)?;
    let out = std::env::temp_dir().join("stereo_quilt.png");
    quilt.save_png(&out)?;
    println!(
        "quilt {}x{} ({} cols x {} rows) -> {}",
        quilt.width(),
        quilt.height(),
        layout.cols,
        layout.rows,
        out.display()
    );
    Ok(())
}
