//! Measures how view synthesis scales with the number of views, for both
//! estimators. The correspondence field is computed once per run, so cost
//! should be an affine function of the view count — the CSV makes that
//! easy to check in a plotting tool.
//!
//! Run with `cargo run --release --example bench_views`.

use holoquilt::{benchmark_csv, benchmark_views, Image, Method, MorphParams, PixelCoord};

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
    let left = test_card(320, 240, 0);
    let right = test_card(320, 240, 5);
    let counts: Vec<u32> = (1..=6).map(|k| k * 8).collect();

    for method in [Method::Disparity, Method::Flow] {
        let params = MorphParams { method, ..MorphParams::default() };
        let rows = benchmark_views(&left, &right, &params, &counts)?;
        println!("# {method:?}");
        print!("{}", benchmark_csv(&rows));

        // crude per-view marginal cost from the run endpoints
        let (first, last) = (&rows[0], &rows[rows.len() - 1]);
        let per_view =
            (last.wall_seconds - first.wall_seconds) / (last.views - first.views) as f64;
        println!("# ~{:.1} ms per additional view\n", per_view * 1e3);
    }
    Ok(())
}
