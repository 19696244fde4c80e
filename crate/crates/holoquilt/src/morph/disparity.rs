//! Epipolar block matching: for each pixel, slide a window along the same
//! row of the right image and keep the horizontal offset with the smallest
//! sum of absolute differences. Rectified stereo pairs make this 1D search
//! sufficient, which is what keeps disparity mode fast.
//!
//! Costs are evaluated per candidate offset with running window sums
//! (column differences, then a vertical slide, then a horizontal slide),
//! which is an exact integer reassociation of the naive per-pixel window
//! sum — same costs, ~window-size times less work.

use rayon::prelude::*;

use super::{Gray, MorphParams};
use crate::error::{Error, Result};

pub(super) fn estimate(
    left: &Gray,
    right: &Gray,
    params: &MorphParams,
) -> Result<(Vec<f32>, Vec<f32>)> {
    let (w, h) = (left.width, left.height);
    let r = params.block_radius;
    if w < 2 * r + 1 || h < 2 * r + 1 {
        return Err(Error::DegenerateImage {
            width: w,
            height: h,
            radius: r,
        });
    }
    let best_d = search(left, right, r, params.max_displacement);
    let dx: Vec<f32> = best_d.iter().map(|&d| d as f32).collect();
    let dx = median_3x3(&dx, w, h);
    let dy = vec![0.0f32; w as usize * h as usize];
    Ok((dx, dy))
}

/// Per-pixel offset candidates are ranked by (cost, |d|, d): smallest
/// window cost first, then the smallest magnitude so featureless regions
/// (and identical pairs) report zero displacement. The key makes the
/// ranking independent of candidate order, so offsets can be scored in
/// parallel and merged.
fn search(left: &Gray, right: &Gray, radius: u32, max_displacement: u32) -> Vec<i32> {
    let (w, h) = (left.width as usize, left.height as usize);
    let len = w * h;
    // beyond w-1+r every window column clamps to the frame edge, so those
    // offsets cost the same as w-1+r and lose every |d| tie — skip them
    let max_d = (max_displacement as i64)
        .min((w - 1 + radius as usize) as i64)
        .min(i32::MAX as i64 - 1) as i32;
    let candidates: Vec<i32> = (-max_d..=max_d).collect();

    let best = candidates
        .par_iter()
        .with_min_len(8)
        .fold(
            || Candidates::new(len, left.width, radius),
            |mut acc, &d| {
                acc.score_offset(left, right, d);
                acc
            },
        )
        .reduce(|| Candidates::new(len, left.width, radius), Candidates::merge);
    best.offset
}

/// Running best (cost, offset) per pixel, plus the scratch rows the
/// sliding sums reuse across candidate offsets.
struct Candidates {
    cost: Vec<u32>,
    offset: Vec<i32>,
    radius: usize,
    /// |L - R| per extended column, all rows; width w + 2*radius
    diff: Vec<u32>,
    /// vertical window sum of `diff`, one extended row
    column_sum: Vec<u32>,
}

impl Candidates {
    fn new(len: usize, width: u32, radius: u32) -> Candidates {
        let ext = width as usize + 2 * radius as usize;
        Candidates {
            cost: vec![u32::MAX; len],
            offset: vec![0; len],
            radius: radius as usize,
            diff: Vec::new(), // sized on first score_offset
            column_sum: vec![0; ext],
        }
    }

    /// Window cost of one offset for every pixel, folded into the running
    /// best. The window sum is built in three exact integer passes:
    /// absolute differences on columns extended `radius` past each edge
    /// (coordinates clamp like the window does), a vertical running sum
    /// over rows, and a horizontal running sum over columns.
    fn score_offset(&mut self, left: &Gray, right: &Gray, d: i32) {
        let (w, h) = (left.width as usize, left.height as usize);
        let r = self.radius;
        let ext = w + 2 * r;
        let wi = w as i64 - 1;

        self.diff.resize(ext * h, 0);
        for y in 0..h {
            let row = &mut self.diff[y * ext..(y + 1) * ext];
            for (u, slot) in row.iter_mut().enumerate() {
                let u = u as i64 - r as i64;
                let lx = u.clamp(0, wi) as u32;
                let rx = (u + d as i64).clamp(0, wi) as u32;
                *slot = (left.at(lx, y as u32) as i32 - right.at(rx, y as u32) as i32)
                    .unsigned_abs();
            }
        }

        let diff = &self.diff;
        let column_sum = &mut self.column_sum;
        let best_cost = &mut self.cost;
        let best_offset = &mut self.offset;
        let diff_row = |y: i64| -> &[u32] {
            let y = y.clamp(0, h as i64 - 1) as usize;
            &diff[y * ext..(y + 1) * ext]
        };
        column_sum.iter_mut().for_each(|v| *v = 0);
        for wy in -(r as i64)..=r as i64 {
            let row = diff_row(wy);
            for (sum, v) in column_sum.iter_mut().zip(row) {
                *sum += v;
            }
        }

        let abs_d = d.unsigned_abs();
        for y in 0..h {
            if y > 0 {
                let enter = diff_row(y as i64 + r as i64);
                let leave = diff_row(y as i64 - 1 - r as i64);
                for ((sum, add), sub) in column_sum.iter_mut().zip(enter).zip(leave) {
                    *sum += add;
                    *sum -= sub;
                }
            }
            // horizontal slide: cost(x) covers extended columns x..x+2r
            let mut cost: u32 = column_sum[..2 * r + 1].iter().sum();
            for x in 0..w {
                if x > 0 {
                    cost += column_sum[x + 2 * r];
                    cost -= column_sum[x - 1];
                }
                let at = y * w + x;
                if Self::wins(cost, d, abs_d, best_cost[at], best_offset[at]) {
                    best_cost[at] = cost;
                    best_offset[at] = d;
                }
            }
        }
    }

    #[inline]
    fn wins(cost: u32, d: i32, abs_d: u32, best_cost: u32, best_d: i32) -> bool {
        cost < best_cost
            || (cost == best_cost
                && (abs_d < best_d.unsigned_abs()
                    || (abs_d == best_d.unsigned_abs() && d < best_d)))
    }

    fn merge(mut self, other: Candidates) -> Candidates {
        for at in 0..self.cost.len() {
            if Self::wins(
                other.cost[at],
                other.offset[at],
                other.offset[at].unsigned_abs(),
                self.cost[at],
                self.offset[at],
            ) {
                self.cost[at] = other.cost[at];
                self.offset[at] = other.offset[at];
            }
        }
        self
    }
}

/// 3x3 median, borders replicated; knocks out isolated block-match errors.
pub(super) fn median_3x3(field: &[f32], w: u32, h: u32) -> Vec<f32> {
    let (wi, hi) = (w as i64, h as i64);
    let mut out = vec![0.0f32; field.len()];
    out.par_chunks_mut(w as usize).enumerate().for_each(|(y, row)| {
        let y = y as i64;
        let mut window = [0.0f32; 9];
        for x in 0..wi {
            let mut n = 0;
            for wy in -1..=1i64 {
                let sy = (y + wy).clamp(0, hi - 1);
                for wx in -1..=1i64 {
                    let sx = (x + wx).clamp(0, wi - 1);
                    window[n] = field[(sy * wi + sx) as usize];
                    n += 1;
                }
            }
            window.sort_by(|a, b| a.partial_cmp(b).unwrap());
            row[x as usize] = window[4];
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morph::tests::{textured_image, XorShift};

    /// The naive triple loop the sliding sums must reproduce bit-for-bit.
    fn reference_search(left: &Gray, right: &Gray, radius: u32, max_d: u32) -> Vec<i32> {
        let (wi, hi) = (left.width as i64, left.height as i64);
        let (r, max_d) = (radius as i64, max_d as i64);
        let mut out = vec![0i32; (wi * hi) as usize];
        for y in 0..hi {
            for x in 0..wi {
                let mut best_d = 0i64;
                let mut best_cost = u32::MAX;
                for d in -max_d..=max_d {
                    let mut cost = 0u32;
                    for wy in -r..=r {
                        let sy = (y + wy).clamp(0, hi - 1) as u32;
                        for wx in -r..=r {
                            let lx = (x + wx).clamp(0, wi - 1) as u32;
                            let rx = (x + wx + d).clamp(0, wi - 1) as u32;
                            cost += (left.at(lx, sy) as i32 - right.at(rx, sy) as i32)
                                .unsigned_abs();
                        }
                    }
                    if cost < best_cost || (cost == best_cost && d.abs() < best_d.abs()) {
                        best_cost = cost;
                        best_d = d;
                    }
                }
                out[(y * wi + x) as usize] = best_d as i32;
            }
        }
        out
    }

    #[test]
    fn sliding_costs_match_the_naive_window_sums() {
        let mut rng = XorShift::new(301);
        for (w, h, r, max_d) in [(20u32, 14u32, 1u32, 3u32), (17, 19, 2, 6), (26, 11, 4, 5)] {
            let left = textured_image(w, h, rng.next());
            let right = textured_image(w, h, rng.next());
            assert_eq!(
                search(&Gray::from_image(&left), &Gray::from_image(&right), r, max_d),
                reference_search(&Gray::from_image(&left), &Gray::from_image(&right), r, max_d),
                "{w}x{h} r={r} max_d={max_d}"
            );
        }
    }

    #[test]
    fn median_flattens_single_outlier() {
        // 5x5 zero field with a spike in the middle
        let mut field = vec![0.0f32; 25];
        field[12] = 9.0;
        let out = median_3x3(&field, 5, 5);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn median_keeps_constant_fields() {
        let field = vec![2.5f32; 12];
        assert_eq!(median_3x3(&field, 4, 3), field);
    }

    #[test]
    fn median_preserves_a_step_edge() {
        // left half 0, right half 4, on a 6x4 grid: medians stay on each side
        let mut field = vec![0.0f32; 24];
        for y in 0..4 {
            for x in 3..6 {
                field[y * 6 + x] = 4.0;
            }
        }
        let out = median_3x3(&field, 6, 4);
        for y in 0..4 {
            assert_eq!(out[y * 6], 0.0);
            assert_eq!(out[y * 6 + 5], 4.0);
        }
    }
}
