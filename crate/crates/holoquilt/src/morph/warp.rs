//! View synthesis: warp the stereo pair toward an intermediate viewpoint
//! and cross-dissolve.

use rayon::prelude::*;

use super::CorrespondenceField;
use crate::error::{Error, Result};
use crate::imaging::{Image, CHANNELS};

/// Renders the viewpoint at blend position `t` (0 = left, 1 = right).
///
/// Each output pixel pulls from `left` at `p − t·f(p)` and from `right` at
/// `p + (1−t)·f(p)` (inverse bilinear sampling on the receiving grid), then
/// mixes them `(1−t) : t`, rounding half-up. A sample whose source lands
/// outside the frame is treated as occluded and the other side is used
/// alone; when both miss, the temporally nearer image is sampled at the
/// clamped position so the output is always fully populated.
pub fn synthesize_view(
    left: &Image,
    right: &Image,
    field: &CorrespondenceField,
    t: f64,
) -> Result<Image> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BlendOutOfRange(t));
    }
    let (w, h) = (left.width(), left.height());
    if right.width() != w
        || right.height() != h
        || field.width() != w
        || field.height() != h
    {
        return Err(Error::DimensionMismatch(format!(
            "left {}x{}, right {}x{}, field {}x{}",
            w,
            h,
            right.width(),
            right.height(),
            field.width(),
            field.height()
        )));
    }

    let mut out = Image::new(w, h);
    let row_bytes = w as usize * CHANNELS;
    out.data_mut()
        .par_chunks_mut(row_bytes)
        .enumerate()
        .for_each(|(y, row)| {
            let y = y as u32;
            for x in 0..w {
                let (fx, fy) = field.at(x, y);
                let lx = x as f64 - t * fx as f64;
                let ly = y as f64 - t * fy as f64;
                let rx = x as f64 + (1.0 - t) * fx as f64;
                let ry = y as f64 + (1.0 - t) * fy as f64;
                let l_ok = in_support(lx, ly, w, h);
                let r_ok = in_support(rx, ry, w, h);
                let px = &mut row[x as usize * CHANNELS..(x as usize + 1) * CHANNELS];
                match (l_ok, r_ok) {
                    (true, true) => {
                        let l = bilinear_rgb(left, lx, ly);
                        let r = bilinear_rgb(right, rx, ry);
                        for c in 0..CHANNELS {
                            px[c] = round_half_up((1.0 - t) * l[c] + t * r[c]);
                        }
                    }
                    (true, false) => store(px, bilinear_rgb(left, lx, ly)),
                    (false, true) => store(px, bilinear_rgb(right, rx, ry)),
                    (false, false) => {
                        // both sources occluded: fall back to the nearer frame,
                        // clamped back onto it
                        let rgb = if t <= 0.5 {
                            bilinear_rgb(
                                left,
                                lx.clamp(0.0, (w - 1) as f64),
                                ly.clamp(0.0, (h - 1) as f64),
                            )
                        } else {
                            bilinear_rgb(
                                right,
                                rx.clamp(0.0, (w - 1) as f64),
                                ry.clamp(0.0, (h - 1) as f64),
                            )
                        };
                        store(px, rgb);
                    }
                }
            }
        });
    Ok(out)
}

#[inline]
fn in_support(x: f64, y: f64, w: u32, h: u32) -> bool {
    x >= 0.0 && x <= (w - 1) as f64 && y >= 0.0 && y <= (h - 1) as f64
}

#[inline]
fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

#[inline]
fn store(px: &mut [u8], rgb: [f64; 3]) {
    for c in 0..CHANNELS {
        px[c] = round_half_up(rgb[c]);
    }
}

#[inline]
fn bilinear_rgb(img: &Image, x: f64, y: f64) -> [f64; 3] {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let x0 = x0 as u32;
    let y0 = y0 as u32;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let d = img.data();
    let i00 = img.sample_index(x0, y0, 0);
    let i10 = img.sample_index(x1, y0, 0);
    let i01 = img.sample_index(x0, y1, 0);
    let i11 = img.sample_index(x1, y1, 0);
    let mut rgb = [0.0f64; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        *out = (1.0 - fx) * (1.0 - fy) * d[i00 + c] as f64
            + fx * (1.0 - fy) * d[i10 + c] as f64
            + (1.0 - fx) * fy * d[i01 + c] as f64
            + fx * fy * d[i11 + c] as f64;
    }
    rgb
}
