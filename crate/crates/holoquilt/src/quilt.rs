//! Quilt images: a cols x rows collage of views sharing one resolution.
//!
//! View 0 sits at the bottom-left tile, counting left to right and then
//! upward, so the top-right tile holds the last view. This matches the
//! ordering lightfield displays expect when they unpack a quilt.

use crate::error::{Error, Result};
use crate::imaging::{Image, CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuiltLayout {
    pub cols: u32,
    pub rows: u32,
    pub view_width: u32,
    pub view_height: u32,
}

impl QuiltLayout {
    pub fn new(cols: u32, rows: u32, view_width: u32, view_height: u32) -> QuiltLayout {
        assert!(
            cols >= 1 && rows >= 1 && view_width >= 1 && view_height >= 1,
            "quilt layout fields must be >= 1"
        );
        QuiltLayout {
            cols,
            rows,
            view_width,
            view_height,
        }
    }

    /// Layout from a `COLSxROWS` mask like `"9x5"` plus the per-view size.
    pub fn from_mask(mask: &str, view_width: u32, view_height: u32) -> Result<QuiltLayout> {
        let (cols, rows) = parse_layout(mask)?;
        if view_width < 1 || view_height < 1 {
            return Err(Error::InvalidArgument(
                "view dimensions must be >= 1".into(),
            ));
        }
        Ok(QuiltLayout::new(cols, rows, view_width, view_height))
    }

    pub fn total_views(&self) -> u32 {
        self.cols * self.rows
    }

    pub fn quilt_width(&self) -> u32 {
        self.cols * self.view_width
    }

    pub fn quilt_height(&self) -> u32 {
        self.rows * self.view_height
    }

    /// Top-left corner of view `k`'s tile in quilt raster coordinates.
    pub(crate) fn tile_origin(&self, k: u32) -> (u32, u32) {
        debug_assert!(k < self.total_views());
        let grid_col = k % self.cols;
        let grid_row_from_bottom = k / self.cols;
        let raster_row = self.rows - 1 - grid_row_from_bottom;
        (grid_col * self.view_width, raster_row * self.view_height)
    }
}

/// Parses `"AxB"` into `(a, b)`; both must be positive integers.
///
/// The caller decides what the two numbers mean: quilt masks are written
/// `COLSxROWS` ("9x5" is nine columns) while view resolutions are written
/// `ROWSxCOLS` ("240x320" is a 320-wide, 240-tall view).
pub fn parse_layout(text: &str) -> Result<(u32, u32)> {
    let bad = || {
        Error::InvalidArgument(format!(
            "expected two positive integers separated by 'x', got '{text}'"
        ))
    };
    let mut parts = text.trim().split('x');
    let a = parts.next().ok_or_else(bad)?;
    let b = parts.next().ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Collages `views` (bottom-left to top-right order) into one quilt image.
pub fn assemble_quilt(views: &[Image], layout: &QuiltLayout) -> Result<Image> {
    if views.len() != layout.total_views() as usize {
        return Err(Error::ViewCountMismatch {
            expected: layout.total_views() as usize,
            found: views.len(),
        });
    }
    for (k, view) in views.iter().enumerate() {
        if view.width() != layout.view_width || view.height() != layout.view_height {
            return Err(Error::DimensionMismatch(format!(
                "view {k} is {}x{}, layout wants {}x{}",
                view.width(),
                view.height(),
                layout.view_width,
                layout.view_height
            )));
        }
    }
    let mut quilt = Image::new(layout.quilt_width(), layout.quilt_height());
    let quilt_row_bytes = layout.quilt_width() as usize * CHANNELS;
    let view_row_bytes = layout.view_width as usize * CHANNELS;
    for (k, view) in views.iter().enumerate() {
        let (ox, oy) = layout.tile_origin(k as u32);
        for vy in 0..layout.view_height as usize {
            let dst_start =
                (oy as usize + vy) * quilt_row_bytes + ox as usize * CHANNELS;
            let src_start = vy * view_row_bytes;
            quilt.data_mut()[dst_start..dst_start + view_row_bytes]
                .copy_from_slice(&view.data()[src_start..src_start + view_row_bytes]);
        }
    }
    Ok(quilt)
}

/// Inverse of [`assemble_quilt`]: cuts a quilt back into its ordered views.
pub fn split_quilt(quilt: &Image, layout: &QuiltLayout) -> Result<Vec<Image>> {
    if quilt.width() != layout.quilt_width() || quilt.height() != layout.quilt_height() {
        return Err(Error::DimensionMismatch(format!(
            "quilt is {}x{}, layout wants {}x{}",
            quilt.width(),
            quilt.height(),
            layout.quilt_width(),
            layout.quilt_height()
        )));
    }
    let quilt_row_bytes = layout.quilt_width() as usize * CHANNELS;
    let view_row_bytes = layout.view_width as usize * CHANNELS;
    let mut views = Vec::with_capacity(layout.total_views() as usize);
    for k in 0..layout.total_views() {
        let (ox, oy) = layout.tile_origin(k);
        let mut view = Image::new(layout.view_width, layout.view_height);
        for vy in 0..layout.view_height as usize {
            let src_start =
                (oy as usize + vy) * quilt_row_bytes + ox as usize * CHANNELS;
            let dst_start = vy * view_row_bytes;
            view.data_mut()[dst_start..dst_start + view_row_bytes]
                .copy_from_slice(&quilt.data()[src_start..src_start + view_row_bytes]);
        }
        views.push(view);
    }
    Ok(views)
}
