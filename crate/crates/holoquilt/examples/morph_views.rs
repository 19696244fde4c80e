//! Compares the two correspondence estimators on a pair with known
//! ground truth, then renders the interpolation sweep from one.
//!
//! Run with `cargo run --release --example morph_views`. The right eye is
//! the left eye shifted 6 px, so a perfect field is dx = 6, dy = 0; the
//! medians printed below show how close each method gets.

use holoquilt::{
    compute_field, synthesize_view, Image, Method, MorphParams, PixelCoord, QuiltLayout,
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

fn median(mut vals: Vec<f32>) -> f32 {
    vals.sort_by(|a, b| a.total_cmp(b));
    vals[vals.len() / 2]
}

fn main() -> holoquilt::Result<()> {
    const SHIFT: i64 = 6;
    let left = test_card(320, 240, 0);
    let right = test_card(320, 240, SHIFT);

    let mut fields = Vec::new();
    for method in [Method::Disparity, Method::Flow] {
        let params = MorphParams { method, ..MorphParams::default() };
        let started = std::time::Instant::now();
        let field = compute_field(&left, &right, &params)?;
        // judge the interior; the frame edge has no true correspondence
        let mut dxs = Vec::new();
        let mut dys = Vec::new();
        for y in 20..(field.height() - 20) {
            for x in 40..(field.width() - 40) {
                let i = (y * field.width() + x) as usize;
                dxs.push(field.dx()[i]);
                dys.push(field.dy()[i]);
            }
        }
        println!(
            "{method:?}: median dx {:+.2} (truth {SHIFT:+}), median dy {:+.2}, {:.3} s",
            median(dxs),
            median(dys),
            started.elapsed().as_secs_f64()
        );
        fields.push(field);
    }

    // sweep left -> right in five steps off the disparity field, tiled
    // side by side so the parallax is easy to eyeball
    let sweep = QuiltLayout::new(5, 1, left.width(), left.height());
    let mut strip = Image::new(sweep.quilt_width(), sweep.quilt_height());
    for (k, t) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let view = synthesize_view(&left, &right, &fields[0], t)?;
        for y in 0..view.height() {
            for x in 0..view.width() {
                let p = PixelCoord { x: x + k as u32 * left.width(), y };
                strip.set_pixel(p, view.pixel(PixelCoord { x, y }));
            }
        }
    }
    let out = std::env::temp_dir().join("morph_sweep.png");
    strip.save_png(&out)?;
    println!("wrote {}", out.display());
    Ok(())
}
