//! The subpixel-to-view mapping at the heart of lenticular rendering.
//!
//! A slanted lens array shows each native-panel subpixel to a narrow range
//! of directions, so every subpixel belongs to exactly one quilt view. The
//! view number is a phase computation (`view_index`); doing it once per
//! subpixel and storing the resulting quilt sample index gives a lookup
//! table (`build_lut`) that turns per-frame rendering into a pure gather
//! (`apply_lut`). Tables serialize to `.map` files.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::calibration::MappingParams;
use crate::error::{Error, Result};
use crate::imaging::{Image, CHANNELS};
use crate::quilt::QuiltLayout;

/// One native-panel subpixel: pixel position plus channel (0=R, 1=G, 2=B).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubpixelCoord {
    pub x: u32,
    pub y: u32,
    pub c: u8,
}

const MAP_MAGIC: &[u8; 4] = b"MRPH";
const MAP_VERSION: u16 = 1;

/// Precomputed native→quilt gather table.
///
/// `entries` holds one flat quilt sample index per native subpixel, in
/// (y, x, c) order. Construction goes through [`build_lut`] or
/// [`LutMap::load`], both of which guarantee every index lands inside the
/// layout's quilt and on the subpixel's own channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LutMap {
    native_width: u32,
    native_height: u32,
    layout: QuiltLayout,
    entries: Vec<u32>,
}

/// Fractional part in [0, 1), also for negative inputs.
#[inline]
fn fract(x: f64) -> f64 {
    x - x.floor()
}

/// Lens phase of a (possibly fractional) subpixel column `i` in row `y`.
#[inline]
fn subpixel_phase(i: f64, y: f64, params: &MappingParams) -> f64 {
    fract((i - params.offset * 3.0 - 3.0 * y * params.tan_alpha) / (3.0 * params.pitch_px))
}

#[inline]
fn view_of_phase(phase: f64, total_views: u32) -> u32 {
    // phase * N can round up to exactly N when phase is 1.0 - eps
    let v = (phase * total_views as f64).floor() as i64;
    v.clamp(0, total_views as i64 - 1) as u32
}

/// Which quilt view the given native subpixel shows.
///
/// The subpixel column index is `i = 3x + c`; the lens the subpixel sits
/// under advances by `3·tan_alpha` subpixels per row and repeats every
/// `3·pitch_px` subpixels. Mirror flags flip coordinates before the phase
/// is computed, and `inverted_views` reverses the result.
pub fn view_index(
    sub: SubpixelCoord,
    params: &MappingParams,
    native_width: u32,
    native_height: u32,
) -> u32 {
    debug_assert!(sub.x < native_width && sub.y < native_height && sub.c < 3);
    let x = if params.flip_x {
        native_width - 1 - sub.x
    } else {
        sub.x
    };
    let y = if params.flip_y {
        native_height - 1 - sub.y
    } else {
        sub.y
    };
    let c = if params.flip_subpixel { 2 - sub.c } else { sub.c };
    let i = (3 * x as u64 + c as u64) as f64;
    let phase = subpixel_phase(i, y as f64, params);
    let view = view_of_phase(phase, params.total_views);
    if params.inverted_views {
        params.total_views - 1 - view
    } else {
        view
    }
}

/// Precomputes the full gather table for a panel of the given size.
///
/// Each native subpixel takes its value from view `view_index(...)`, sampled
/// at the nearest-lower view pixel under the native position
/// (`floor(x · view_width / native_width)`, same for y).
pub fn build_lut(
    params: &MappingParams,
    layout: &QuiltLayout,
    native_width: u32,
    native_height: u32,
) -> LutMap {
    assert!(native_width >= 1 && native_height >= 1);
    assert_eq!(
        params.total_views,
        layout.total_views(),
        "mapping params were derived for a different quilt layout"
    );
    let row_samples = native_width as usize * CHANNELS;
    let mut entries = vec![0u32; native_height as usize * row_samples];
    let quilt_width = layout.quilt_width() as u64;
    entries
        .par_chunks_mut(row_samples)
        .enumerate()
        .for_each(|(y, row)| {
            let y = y as u32;
            let vy = (y as u64 * layout.view_height as u64 / native_height as u64) as u32;
            for x in 0..native_width {
                let vx = (x as u64 * layout.view_width as u64 / native_width as u64) as u32;
                for c in 0..CHANNELS as u8 {
                    let v = view_index(SubpixelCoord { x, y, c }, params, native_width, native_height);
                    let (ox, oy) = layout.tile_origin(v);
                    let qx = (ox + vx) as u64;
                    let qy = (oy + vy) as u64;
                    row[x as usize * CHANNELS + c as usize] =
                        ((qy * quilt_width + qx) * CHANNELS as u64 + c as u64) as u32;
                }
            }
        });
    LutMap {
        native_width,
        native_height,
        layout: *layout,
        entries,
    }
}

/// Renders a native frame: one gather per subpixel, no arithmetic.
pub fn apply_lut(lut: &LutMap, quilt: &Image) -> Result<Image> {
    if quilt.width() != lut.layout.quilt_width() || quilt.height() != lut.layout.quilt_height() {
        return Err(Error::DimensionMismatch(format!(
            "quilt is {}x{}, map wants {}x{}",
            quilt.width(),
            quilt.height(),
            lut.layout.quilt_width(),
            lut.layout.quilt_height()
        )));
    }
    let mut out = Image::new(lut.native_width, lut.native_height);
    let row_samples = lut.native_width as usize * CHANNELS;
    let src = quilt.data();
    out.data_mut()
        .par_chunks_mut(row_samples)
        .zip(lut.entries.par_chunks(row_samples))
        .for_each(|(dst, indices)| {
            for (d, &i) in dst.iter_mut().zip(indices) {
                *d = src[i as usize];
            }
        });
    Ok(out)
}

impl LutMap {
    pub fn native_width(&self) -> u32 {
        self.native_width
    }

    pub fn native_height(&self) -> u32 {
        self.native_height
    }

    pub fn layout(&self) -> &QuiltLayout {
        &self.layout
    }

    /// Flat quilt sample index per native subpixel, (y, x, c) order.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Writes the table as a `.map` file: magic `MRPH`, format version u16,
    /// native width/height u32, layout cols/rows u16, view width/height u32,
    /// then one little-endian u32 sample index per subpixel in (y, x, c)
    /// order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        w.write_all(MAP_MAGIC).map_err(io_err)?;
        w.write_all(&MAP_VERSION.to_le_bytes()).map_err(io_err)?;
        w.write_all(&self.native_width.to_le_bytes()).map_err(io_err)?;
        w.write_all(&self.native_height.to_le_bytes()).map_err(io_err)?;
        w.write_all(&(self.layout.cols as u16).to_le_bytes()).map_err(io_err)?;
        w.write_all(&(self.layout.rows as u16).to_le_bytes()).map_err(io_err)?;
        w.write_all(&self.layout.view_width.to_le_bytes()).map_err(io_err)?;
        w.write_all(&self.layout.view_height.to_le_bytes()).map_err(io_err)?;
        let mut buf = [0u8; 4 * 16384];
        for chunk in self.entries.chunks(16384) {
            let bytes = &mut buf[..4 * chunk.len()];
            for (slot, entry) in bytes.chunks_exact_mut(4).zip(chunk) {
                slot.copy_from_slice(&entry.to_le_bytes());
            }
            w.write_all(bytes).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads a `.map` file, validating magic, version, size, and that every
    /// entry stays inside the declared quilt.
    pub fn load(path: &Path) -> Result<LutMap> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);

        let mut header = [0u8; 26];
        r.read_exact(&mut header).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::TruncatedMap {
                    path: path.to_path_buf(),
                }
            } else {
                Error::io(path, e)
            }
        })?;
        if &header[0..4] != MAP_MAGIC {
            return Err(Error::BadMagic {
                path: path.to_path_buf(),
            });
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != MAP_VERSION {
            return Err(Error::VersionMismatch {
                path: path.to_path_buf(),
                found: version,
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes([header[o], header[o + 1], header[o + 2], header[o + 3]]);
        let native_width = u32_at(6);
        let native_height = u32_at(10);
        let cols = u16::from_le_bytes([header[14], header[15]]) as u32;
        let rows = u16::from_le_bytes([header[16], header[17]]) as u32;
        let view_width = u32_at(18);
        let view_height = u32_at(22);
        if native_width == 0
            || native_height == 0
            || cols == 0
            || rows == 0
            || view_width == 0
            || view_height == 0
        {
            return Err(Error::Decode {
                path: path.to_path_buf(),
                reason: "zero dimension in map header".into(),
            });
        }
        let layout = QuiltLayout::new(cols, rows, view_width, view_height);

        let count = native_width as usize * native_height as usize * CHANNELS;
        let mut entries = vec![0u32; count];
        let mut buf = [0u8; 4 * 16384];
        let mut filled = 0;
        while filled < count {
            let take = (count - filled).min(16384);
            let bytes = &mut buf[..4 * take];
            r.read_exact(bytes).map_err(|e| {
                if e.kind() == std::io::ErrorKind::UnexpectedEof {
                    Error::TruncatedMap {
                        path: path.to_path_buf(),
                    }
                } else {
                    Error::io(path, e)
                }
            })?;
            for (slot, chunk) in entries[filled..filled + take]
                .iter_mut()
                .zip(bytes.chunks_exact(4))
            {
                *slot = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            }
            filled += take;
        }
        let mut trailing = [0u8; 1];
        match r.read(&mut trailing) {
            Ok(0) => {}
            Ok(_) => {
                return Err(Error::Decode {
                    path: path.to_path_buf(),
                    reason: "trailing data after map entries".into(),
                })
            }
            Err(e) => return Err(Error::io(path, e)),
        }

        let samples = layout.quilt_width() as u64 * layout.quilt_height() as u64 * CHANNELS as u64;
        for (index, &entry) in entries.iter().enumerate() {
            if entry as u64 >= samples {
                return Err(Error::EntryOutOfRange {
                    path: path.to_path_buf(),
                    index,
                });
            }
        }

        Ok(LutMap {
            native_width,
            native_height,
            layout,
            entries,
        })
    }
}
