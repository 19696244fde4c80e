//! View morphing: estimate where each pixel of the left eye image lands in
//! the right eye image, then synthesize any number of in-between viewpoints
//! by warping both images toward each other and cross-dissolving.
//!
//! Two interchangeable correspondence backends exist: epipolar block
//! matching ([`compute_disparity`], horizontal-only, fast) and a pyramidal
//! variational optical flow ([`compute_flow`], full 2D vectors). Both store
//! displacements in the same convention: a feature at pixel `p` in the left
//! image appears at `p + (dx, dy)` in the right image.

mod disparity;
mod flow;
mod warp;

pub use warp::synthesize_view;

use crate::error::{Error, Result};
use crate::imaging::{Image, CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Row-constrained block matching; produces dy = 0 everywhere.
    Disparity,
    /// Dense variational optical flow (coarse-to-fine).
    Flow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphParams {
    pub method: Method,
    /// Estimate the field on images downscaled by this factor, then upscale.
    pub subsampling: u32,
    /// Half-window of the disparity matching block.
    pub block_radius: u32,
    /// Search range (disparity) and final clamp (both methods), in pixels.
    pub max_displacement: u32,
    /// Flow regularizer weight; higher means smoother fields.
    pub smoothing_weight: f64,
    /// Relaxation sweeps per pyramid level of the flow solver.
    pub iterations: u32,
}

impl Default for MorphParams {
    fn default() -> MorphParams {
        MorphParams {
            method: Method::Disparity,
            subsampling: 1,
            block_radius: 4,
            max_displacement: 32,
            smoothing_weight: 15.0,
            iterations: 64,
        }
    }
}

impl MorphParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("subsampling", self.subsampling),
            ("block_radius", self.block_radius),
            ("max_displacement", self.max_displacement),
            ("iterations", self.iterations),
        ] {
            if v < 1 {
                return Err(Error::InvariantViolation(name.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    Disparity,
    Flow,
}

/// Dense per-pixel displacement from the left image to the right image.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceField {
    width: u32,
    height: u32,
    mode: FieldMode,
    dx: Vec<f32>,
    dy: Vec<f32>,
}

impl CorrespondenceField {
    pub(crate) fn new(
        width: u32,
        height: u32,
        mode: FieldMode,
        dx: Vec<f32>,
        dy: Vec<f32>,
    ) -> CorrespondenceField {
        debug_assert_eq!(dx.len(), width as usize * height as usize);
        debug_assert_eq!(dy.len(), dx.len());
        CorrespondenceField {
            width,
            height,
            mode,
            dx,
            dy,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn dx(&self) -> &[f32] {
        &self.dx
    }

    pub fn dy(&self) -> &[f32] {
        &self.dy
    }

    #[inline]
    pub fn at(&self, x: u32, y: u32) -> (f32, f32) {
        let i = y as usize * self.width as usize + x as usize;
        (self.dx[i], self.dy[i])
    }
}

/// Grayscale working image for the matching backends.
pub(crate) struct Gray {
    pub width: u32,
    pub height: u32,
    pub v: Vec<u8>,
}

impl Gray {
    /// Rec.601 luma, rounded: 0.299 R + 0.587 G + 0.114 B.
    pub(crate) fn from_image(img: &Image) -> Gray {
        let mut v = Vec::with_capacity(img.width() as usize * img.height() as usize);
        for px in img.data().chunks_exact(CHANNELS) {
            let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            v.push((y + 0.5).floor() as u8);
        }
        Gray {
            width: img.width(),
            height: img.height(),
            v,
        }
    }

    #[inline]
    pub(crate) fn at(&self, x: u32, y: u32) -> u8 {
        self.v[y as usize * self.width as usize + x as usize]
    }
}

/// Bilinear resample of a scalar grid (centers aligned, edges clamped).
/// Shared by field upscaling and the flow pyramid.
pub(crate) fn resample_bilinear(
    src: &[f32],
    sw: u32,
    sh: u32,
    dw: u32,
    dh: u32,
) -> Vec<f32> {
    debug_assert_eq!(src.len(), sw as usize * sh as usize);
    if sw == dw && sh == dh {
        return src.to_vec();
    }
    let mut out = vec![0.0f32; dw as usize * dh as usize];
    let xr = sw as f64 / dw as f64;
    let yr = sh as f64 / dh as f64;
    for y in 0..dh {
        let sy = ((y as f64 + 0.5) * yr - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(sh as usize - 1);
        let fy = (sy - y0 as f64) as f32;
        for x in 0..dw {
            let sx = ((x as f64 + 0.5) * xr - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(sw as usize - 1);
            let fx = (sx - x0 as f64) as f32;
            let s00 = src[y0 * sw as usize + x0];
            let s10 = src[y0 * sw as usize + x1];
            let s01 = src[y1 * sw as usize + x0];
            let s11 = src[y1 * sw as usize + x1];
            out[y as usize * dw as usize + x as usize] = (1.0 - fx) * (1.0 - fy) * s00
                + fx * (1.0 - fy) * s10
                + (1.0 - fx) * fy * s01
                + fx * fy * s11;
        }
    }
    out
}

fn check_pair(left: &Image, right: &Image) -> Result<()> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(Error::DimensionMismatch(format!(
            "left is {}x{}, right is {}x{}",
            left.width(),
            left.height(),
            right.width(),
            right.height()
        )));
    }
    Ok(())
}

/// Runs `estimate` at the subsampled resolution, then scales the field
/// values by the factor and bilinearly resizes it back to full resolution.
fn with_subsampling(
    left: &Image,
    right: &Image,
    params: &MorphParams,
    mode: FieldMode,
    estimate: impl Fn(&Gray, &Gray, &MorphParams) -> Result<(Vec<f32>, Vec<f32>)>,
) -> Result<CorrespondenceField> {
    check_pair(left, right)?;
    params.validate()?;
    let (w, h) = (left.width(), left.height());
    let s = params.subsampling;
    let (ww, wh) = if s == 1 {
        (w, h)
    } else {
        ((w / s).max(1), (h / s).max(1))
    };
    let (gl, gr);
    if (ww, wh) == (w, h) {
        gl = Gray::from_image(left);
        gr = Gray::from_image(right);
    } else {
        gl = Gray::from_image(&left.resize(ww, wh));
        gr = Gray::from_image(&right.resize(ww, wh));
    }
    let (mut dx, mut dy) = estimate(&gl, &gr, params)?;
    if (ww, wh) != (w, h) {
        let factor = s as f32;
        for v in &mut dx {
            *v *= factor;
        }
        for v in &mut dy {
            *v *= factor;
        }
        dx = resample_bilinear(&dx, ww, wh, w, h);
        dy = resample_bilinear(&dy, ww, wh, w, h);
    }
    let limit = params.max_displacement as f32;
    for v in dx.iter_mut().chain(dy.iter_mut()) {
        *v = v.clamp(-limit, limit);
    }
    Ok(CorrespondenceField::new(w, h, mode, dx, dy))
}

/// Row-constrained block-matching disparity. See [`disparity`] internals.
pub fn compute_disparity(
    left: &Image,
    right: &Image,
    params: &MorphParams,
) -> Result<CorrespondenceField> {
    let field = with_subsampling(left, right, params, FieldMode::Disparity, |l, r, p| {
        disparity::estimate(l, r, p)
    })?;
    Ok(field)
}

/// Dense pyramidal variational optical flow. See [`flow`] internals.
pub fn compute_flow(
    left: &Image,
    right: &Image,
    params: &MorphParams,
) -> Result<CorrespondenceField> {
    with_subsampling(left, right, params, FieldMode::Flow, |l, r, p| {
        Ok(flow::estimate(l, r, p))
    })
}

/// Dispatches to the backend selected in `params.method`.
pub fn compute_field(
    left: &Image,
    right: &Image,
    params: &MorphParams,
) -> Result<CorrespondenceField> {
    match params.method {
        Method::Disparity => compute_disparity(left, right, params),
        Method::Flow => compute_flow(left, right, params),
    }
}

/// Synthesizes `n` equally spaced views from left (t=0) to right (t=1).
///
/// The correspondence field is computed once and shared; view 0 and view
/// n−1 reproduce the inputs bit-for-bit.
pub fn generate_views(
    left: &Image,
    right: &Image,
    n: u32,
    params: &MorphParams,
) -> Result<Vec<Image>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 views, asked for {n}"
        )));
    }
    check_pair(left, right)?;
    let field = compute_field(left, right, params)?;
    let mut views = Vec::with_capacity(n as usize);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        views.push(synthesize_view(left, right, &field, t)?);
    }
    Ok(views)
}
