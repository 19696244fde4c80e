//! 8-bit RGB raster type plus the handful of primitives the pipeline needs:
//! PNG load/save, bilinear resize, and side-by-side stereo splitting.

use std::path::Path;

use crate::error::{Error, Result};

/// Channels per pixel. Everything in this crate is interleaved RGB.
pub const CHANNELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelCoord {
    pub x: u32,
    pub y: u32,
}

/// Owned interleaved RGB image, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Image {
    /// Black image of the given size. Dimensions must be nonzero.
    pub fn new(width: u32, height: u32) -> Image {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        Image {
            width,
            height,
            data: vec![0; width as usize * height as usize * CHANNELS],
        }
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Image {
        let mut img = Image::new(width, height);
        for px in img.data.chunks_exact_mut(CHANNELS) {
            px.copy_from_slice(&rgb);
        }
        img
    }

    /// Wraps an interleaved RGB buffer; its length must be `width * height * 3`.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Image> {
        let expected = width as usize * height as usize * CHANNELS;
        if width == 0 || height == 0 || data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "raw buffer of {} bytes does not hold a {}x{} rgb image",
                data.len(),
                width,
                height
            )));
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Flat index of one sample. `c` is 0 = R, 1 = G, 2 = B.
    #[inline]
    pub fn sample_index(&self, x: u32, y: u32, c: u8) -> usize {
        debug_assert!(x < self.width && y < self.height && (c as usize) < CHANNELS);
        (y as usize * self.width as usize + x as usize) * CHANNELS + c as usize
    }

    #[inline]
    pub fn pixel(&self, p: PixelCoord) -> [u8; 3] {
        let i = self.sample_index(p.x, p.y, 0);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, p: PixelCoord, rgb: [u8; 3]) {
        let i = self.sample_index(p.x, p.y, 0);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Decodes a PNG. Grayscale expands to RGB, alpha is dropped; 16-bit
    /// channels are rejected rather than silently quantized.
    pub fn load_png(path: &Path) -> Result<Image> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = std::io::BufReader::new(file);
        let decoded = image::ImageReader::with_format(reader, image::ImageFormat::Png)
            .decode()
            .map_err(|e| Error::Decode {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })?;
        use image::DynamicImage::*;
        match decoded {
            ImageLuma16(_) | ImageLumaA16(_) | ImageRgb16(_) | ImageRgba16(_) | ImageRgb32F(_)
            | ImageRgba32F(_) => {
                return Err(Error::UnsupportedBitDepth {
                    path: path.to_path_buf(),
                })
            }
            _ => {}
        }
        let rgb = decoded.to_rgb8();
        let (width, height) = (rgb.width(), rgb.height());
        if width == 0 || height == 0 {
            return Err(Error::Decode {
                path: path.to_path_buf(),
                reason: "zero-sized image".into(),
            });
        }
        Ok(Image {
            width,
            height,
            data: rgb.into_raw(),
        })
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let writer = std::io::BufWriter::new(file);
        let encoder = image::codecs::png::PngEncoder::new(writer);
        image::ImageEncoder::write_image(
            encoder,
            &self.data,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Decode {
                path: path.to_path_buf(),
                reason: other.to_string(),
            },
        })
    }

    /// Bilinear resample to `new_width` x `new_height` (centers aligned,
    /// edges clamped, channels rounded half-up). Equal size is an exact copy.
    pub fn resize(&self, new_width: u32, new_height: u32) -> Image {
        assert!(new_width >= 1 && new_height >= 1);
        if new_width == self.width && new_height == self.height {
            return self.clone();
        }
        let mut out = Image::new(new_width, new_height);
        let sx_ratio = self.width as f64 / new_width as f64;
        let sy_ratio = self.height as f64 / new_height as f64;
        for y in 0..new_height {
            let sy = ((y as f64 + 0.5) * sy_ratio - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = sy.floor() as u32;
            let y1 = (y0 + 1).min(self.height - 1);
            let fy = sy - y0 as f64;
            for x in 0..new_width {
                let sx = ((x as f64 + 0.5) * sx_ratio - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = sx.floor() as u32;
                let x1 = (x0 + 1).min(self.width - 1);
                let fx = sx - x0 as f64;
                let i00 = self.sample_index(x0, y0, 0);
                let i10 = self.sample_index(x1, y0, 0);
                let i01 = self.sample_index(x0, y1, 0);
                let i11 = self.sample_index(x1, y1, 0);
                let o = out.sample_index(x, y, 0);
                for c in 0..CHANNELS {
                    let v = (1.0 - fx) * (1.0 - fy) * self.data[i00 + c] as f64
                        + fx * (1.0 - fy) * self.data[i10 + c] as f64
                        + (1.0 - fx) * fy * self.data[i01 + c] as f64
                        + fx * fy * self.data[i11 + c] as f64;
                    out.data[o + c] = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
                }
            }
        }
        out
    }

    /// Splits a side-by-side stereo frame into (left, right) halves.
    pub fn split_side_by_side(&self) -> Result<(Image, Image)> {
        if self.width % 2 != 0 {
            return Err(Error::OddWidth { width: self.width });
        }
        let half = self.width / 2;
        let mut left = Image::new(half, self.height);
        let mut right = Image::new(half, self.height);
        let row = half as usize * CHANNELS;
        for y in 0..self.height as usize {
            let src = &self.data[y * 2 * row..(y + 1) * 2 * row];
            left.data[y * row..(y + 1) * row].copy_from_slice(&src[..row]);
            right.data[y * row..(y + 1) * row].copy_from_slice(&src[row..]);
        }
        Ok((left, right))
    }
}
