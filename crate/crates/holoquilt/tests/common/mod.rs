//! Fixtures shared by the integration suites, plus independent
//! re-derivations of the mapping math. The oracle here is scalar code
//! transcribed straight from the display-geometry formula, sharing nothing
//! with the library implementation, so equivalence tests genuinely compare
//! two versions.

#![allow(dead_code)] // each test binary uses its own slice of this module

use holoquilt::{Image, PixelCoord};

/// Calibration file of the 2560x1600 panel used throughout; the exact
/// text a real unit reports, linebreaks included.
pub const PANEL_JSON: &str = r#"{"configVersion":"1.0","serial":"LKG-2K-02491","pitch":{"value":47.56159591674805},
"slope":{"value":-5.5113043785095219},"center":{"value":-0.09782609343528748},
"viewCone":{"value":40.0},"invView":{"value":1.0},"verticalAngle":{"value":0.0},"DPI":{"value":
338.0},"screenW":{"value":2560.0},"screenH":{"value":1600.0},"flipImageX":{"value":0.0},
"flipImageY":{"value":0.0},"flipSubp":{"value":0.0}}"#;

/// Streaming config that reads a pre-recorded side-by-side clip.
pub const FILE_SOURCE_INI: &str = "\
[camera]
devNumber=-1
width=320
height=180
fps=8
file=\"video_rescaled.mp4\"
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

/// Streaming config for one stereo webcam on /dev/video2.
pub const SINGLE_DEVICE_INI: &str = "\
[camera]
devNumber=2
width=320
height=180
fps=8
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

/// Streaming config for two separate cameras.
pub const DUAL_DEVICE_INI: &str = "\
[camera]
width=320
height=180
fps=8
[camera0]
devNumber=2
[camera1]
devNumber=4
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> XorShift {
        XorShift(seed | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn byte(&mut self) -> u8 {
        (self.next_u64() >> 32) as u8
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: u32, hi: u32) -> u32 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as u32
    }
}

pub fn random_image(rng: &mut XorShift, width: u32, height: u32) -> Image {
    let mut data = vec![0u8; width as usize * height as usize * 3];
    for b in &mut data {
        *b = rng.byte();
    }
    Image::from_raw(width, height, data).unwrap()
}

/// Smooth two-scale value noise; busy enough everywhere for matching to
/// lock on, without the pixel-to-pixel chaos of raw random fill.
pub fn textured_image(width: u32, height: u32, seed: u64) -> Image {
    let mut rng = XorShift::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let lattice = |cell: u32, rng: &mut XorShift| -> Vec<Vec<f64>> {
        let cols = (width / cell + 2) as usize;
        let rows = (height / cell + 2) as usize;
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.byte() as f64).collect())
            .collect()
    };
    let coarse = lattice(16, &mut rng);
    let fine = lattice(5, &mut rng);
    let sample = |grid: &Vec<Vec<f64>>, cell: u32, x: u32, y: u32| -> f64 {
        let fx = x as f64 / cell as f64;
        let fy = y as f64 / cell as f64;
        let x0 = fx.floor() as usize;
        let y0 = fy.floor() as usize;
        let tx = fx - fx.floor();
        let ty = fy - fy.floor();
        let v00 = grid[y0][x0];
        let v10 = grid[y0][x0 + 1];
        let v01 = grid[y0 + 1][x0];
        let v11 = grid[y0 + 1][x0 + 1];
        (v00 * (1.0 - tx) + v10 * tx) * (1.0 - ty) + (v01 * (1.0 - tx) + v11 * tx) * ty
    };
    let mut img = Image::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let v = 0.65 * sample(&coarse, 16, x, y) + 0.35 * sample(&fine, 5, x, y);
            let base = v.round().clamp(0.0, 255.0) as u8;
            img.set_pixel(
                PixelCoord { x, y },
                [base, base.wrapping_add(40), 255 - base],
            );
        }
    }
    img
}

/// Torus shift: the output at (x, y) shows the input at (x-sx, y-sy),
/// so content moves by (+sx, +sy).
pub fn shift_wrap(img: &Image, sx: i32, sy: i32) -> Image {
    let (w, h) = (img.width(), img.height());
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let src_x = (x as i64 - sx as i64).rem_euclid(w as i64) as u32;
            let src_y = (y as i64 - sy as i64).rem_euclid(h as i64) as u32;
            out.set_pixel(
                PixelCoord { x, y },
                img.pixel(PixelCoord { x: src_x, y: src_y }),
            );
        }
    }
    out
}

/// Raw panel description, as the calibration file states it.
#[derive(Clone, Copy)]
pub struct Panel {
    pub pitch: f64,
    pub slope: f64,
    pub center: f64,
    pub dpi: f64,
    pub screen_w: f64,
    pub screen_h: f64,
    pub invert: bool,
    pub flip_x: bool,
    pub flip_y: bool,
    pub flip_sub: bool,
}

/// The 2560x1600 panel from [`PANEL_JSON`], typed out by hand.
pub fn reference_panel() -> Panel {
    Panel {
        pitch: 47.56159591674805,
        slope: -5.5113043785095219,
        center: -0.09782609343528748,
        dpi: 338.0,
        screen_w: 2560.0,
        screen_h: 1600.0,
        invert: true,
        flip_x: false,
        flip_y: false,
        flip_sub: false,
    }
}

/// Independent per-subpixel view assignment: every quantity is recomputed
/// from the raw panel numbers right here, straight from the geometry.
/// Subpixel column `i = 3x + c` advances one lens period every
/// `3 * pitch_px` subpixels, shifted by `3 * tan_alpha` per row.
pub fn oracle_view(panel: &Panel, n_tot: u32, nw: u32, nh: u32, x: u32, y: u32, c: u32) -> u32 {
    let xx = if panel.flip_x { nw - 1 - x } else { x };
    let yy = if panel.flip_y { nh - 1 - y } else { y };
    let cc = if panel.flip_sub { 2 - c } else { c };
    let i = (3 * xx + cc) as f64;

    let pitch_px =
        panel.pitch * (panel.screen_w / panel.dpi) * (1.0 / panel.slope.abs()).atan().cos();
    let mut tan_alpha = panel.screen_h / (panel.screen_w * panel.slope);
    if panel.flip_x {
        tan_alpha = -tan_alpha;
    }

    let arg = (i - panel.center * 3.0 - 3.0 * yy as f64 * tan_alpha) / (3.0 * pitch_px);
    let phase = arg - arg.floor();
    let mut view = (phase * n_tot as f64).floor() as i64;
    view = view.clamp(0, n_tot as i64 - 1);
    if panel.invert {
        view = n_tot as i64 - 1 - view;
    }
    view as u32
}

/// Brute-force native renderer: per subpixel, pick the view with
/// [`oracle_view`] and read the sample straight out of that view's raster
/// (nearest-lower view pixel under the native position). No quilt, no
/// table — an end-to-end reference for the build-then-gather pipeline.
pub fn reference_native(panel: &Panel, views: &[Image], nw: u32, nh: u32) -> Image {
    let n_tot = views.len() as u32;
    let vw = views[0].width() as u64;
    let vh = views[0].height() as u64;
    let mut out = Image::new(nw, nh);
    for y in 0..nh {
        let vy = (y as u64 * vh / nh as u64) as u32;
        for x in 0..nw {
            let vx = (x as u64 * vw / nw as u64) as u32;
            let mut rgb = [0u8; 3];
            for c in 0..3u32 {
                let v = oracle_view(panel, n_tot, nw, nh, x, y, c);
                rgb[c as usize] = views[v as usize].pixel(PixelCoord { x: vx, y: vy })[c as usize];
            }
            out.set_pixel(PixelCoord { x, y }, rgb);
        }
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |vals: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let mut ranks = vec![0.0; vals.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && vals[order[j + 1]] == vals[order[i]] {
                j += 1;
            }
            let shared = (i + j) as f64 / 2.0 + 1.0;
            for &k in &order[i..=j] {
                ranks[k] = shared;
            }
            i = j + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx2 = 0.0;
    let mut dy2 = 0.0;
    for k in 0..xs.len() {
        let a = rx[k] - mean;
        let b = ry[k] - mean;
        num += a * b;
        dx2 += a * a;
        dy2 += b * b;
    }
    num / (dx2 * dy2).sqrt()
}

/// One pass/fail line per acceptance criterion, then the hard assert.
pub fn report(number: u32, what: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} ({what}): {verdict} — {detail}");
    assert!(pass, "criterion {number:02} ({what}) failed: {detail}");
}
