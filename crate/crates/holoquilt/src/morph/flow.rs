//! Coarse-to-fine variational optical flow.
//!
//! Classic brightness-constancy energy with a first-order smoothness term,
//! minimized by Jacobi relaxation on an image pyramid: solve at the
//! coarsest level, scale the field up, warp, and refine. The pyramid is
//! what lets a local linearization capture multi-pixel displacements.

use rayon::prelude::*;

use super::{resample_bilinear, Gray, MorphParams};

struct Level {
    w: u32,
    h: u32,
    l: Vec<f32>,
    r: Vec<f32>,
}

pub(super) fn estimate(left: &Gray, right: &Gray, params: &MorphParams) -> (Vec<f32>, Vec<f32>) {
    let levels = build_pyramid(left, right);
    let coarsest = levels.len() - 1;
    let mut u = vec![0.0f32; (levels[coarsest].w * levels[coarsest].h) as usize];
    let mut v = u.clone();

    for (i, level) in levels.iter().enumerate().rev() {
        if i != coarsest {
            let prev = &levels[i + 1];
            u = resample_bilinear(&u, prev.w, prev.h, level.w, level.h);
            v = resample_bilinear(&v, prev.w, prev.h, level.w, level.h);
            for val in u.iter_mut().chain(v.iter_mut()) {
                *val *= 2.0;
            }
        }
        refine_level(level, &mut u, &mut v, params);
    }
    (u, v)
}

/// Halving pyramid; the coarsest level keeps both dimensions >= 16 (or the
/// input itself when it is already smaller).
fn build_pyramid(left: &Gray, right: &Gray) -> Vec<Level> {
    let to_f32 = |g: &Gray| g.v.iter().map(|&b| b as f32).collect::<Vec<f32>>();
    let mut levels = vec![Level {
        w: left.width,
        h: left.height,
        l: to_f32(left),
        r: to_f32(right),
    }];
    loop {
        let last = levels.last().unwrap();
        let (nw, nh) = (last.w / 2, last.h / 2);
        if nw.min(nh) < 16 {
            break;
        }
        levels.push(Level {
            w: nw,
            h: nh,
            l: resample_bilinear(&last.l, last.w, last.h, nw, nh),
            r: resample_bilinear(&last.r, last.w, last.h, nw, nh),
        });
    }
    levels
}

fn refine_level(level: &Level, u: &mut Vec<f32>, v: &mut Vec<f32>, params: &MorphParams) {
    let (w, h) = (level.w as usize, level.h as usize);
    let n = w * h;
    debug_assert_eq!(u.len(), n);

    // warp the right image by the current flow, then linearize around it
    let mut warped = vec![0.0f32; n];
    warped
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row)| {
            for x in 0..w {
                let i = y * w + x;
                row[x] = sample_clamped(
                    &level.r,
                    level.w,
                    level.h,
                    x as f32 + u[i],
                    y as f32 + v[i],
                );
            }
        });

    // spatial gradients of the mean image, temporal residual b such that
    // the constraint on the total flow reads Ix*u + Iy*v + b = 0
    let mut ix = vec![0.0f32; n];
    let mut iy = vec![0.0f32; n];
    let mut b = vec![0.0f32; n];
    let clamp = |val: i64, hi: usize| val.clamp(0, hi as i64 - 1) as usize;
    ix.par_chunks_mut(w)
        .zip(iy.par_chunks_mut(w))
        .zip(b.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, ((ix_row, iy_row), b_row))| {
            let mean =
                |x: usize, yy: usize| 0.5 * (level.l[yy * w + x] + warped[yy * w + x]);
            for x in 0..w {
                let i = y * w + x;
                let xm = clamp(x as i64 - 1, w);
                let xp = clamp(x as i64 + 1, w);
                let ym = clamp(y as i64 - 1, h);
                let yp = clamp(y as i64 + 1, h);
                ix_row[x] = 0.5 * (mean(xp, y) - mean(xm, y));
                iy_row[x] = 0.5 * (mean(x, yp) - mean(x, ym));
                let it = warped[i] - level.l[i];
                b_row[x] = it - ix_row[x] * u[i] - iy_row[x] * v[i];
            }
        });

    let alpha2 = params.smoothing_weight as f32;
    let mut u_next = vec![0.0f32; n];
    let mut v_next = vec![0.0f32; n];
    for _ in 0..params.iterations {
        u_next
            .par_chunks_mut(w)
            .zip(v_next.par_chunks_mut(w))
            .enumerate()
            .for_each(|(y, (un_row, vn_row))| {
                for x in 0..w {
                    let i = y * w + x;
                    let ubar = neighbor_average(u, w, h, x, y);
                    let vbar = neighbor_average(v, w, h, x, y);
                    let common = (ix[i] * ubar + iy[i] * vbar + b[i])
                        / (alpha2 + ix[i] * ix[i] + iy[i] * iy[i]);
                    un_row[x] = ubar - ix[i] * common;
                    vn_row[x] = vbar - iy[i] * common;
                }
            });
        std::mem::swap(u, &mut u_next);
        std::mem::swap(v, &mut v_next);
    }
}

/// Weighted 8-neighborhood mean (edges 1/6, corners 1/12), replicated
/// borders.
#[inline]
fn neighbor_average(f: &[f32], w: usize, h: usize, x: usize, y: usize) -> f32 {
    let xm = x.saturating_sub(1);
    let xp = (x + 1).min(w - 1);
    let ym = y.saturating_sub(1);
    let yp = (y + 1).min(h - 1);
    let g = |xx: usize, yy: usize| f[yy * w + xx];
    (g(xm, y) + g(xp, y) + g(x, ym) + g(x, yp)) / 6.0
        + (g(xm, ym) + g(xp, ym) + g(xm, yp) + g(xp, yp)) / 12.0
}

#[inline]
fn sample_clamped(f: &[f32], w: u32, h: u32, x: f32, y: f32) -> f32 {
    let x = (x as f64).clamp(0.0, (w - 1) as f64);
    let y = (y as f64).clamp(0.0, (h - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w as usize - 1);
    let y1 = (y0 + 1).min(h as usize - 1);
    let fx = (x - x0 as f64) as f32;
    let fy = (y - y0 as f64) as f32;
    let w = w as usize;
    (1.0 - fx) * (1.0 - fy) * f[y0 * w + x0]
        + fx * (1.0 - fy) * f[y0 * w + x1]
        + (1.0 - fx) * fy * f[y1 * w + x0]
        + fx * fy * f[y1 * w + x1]
}
