//! Grayscale image container, file I/O, mirror padding and window extraction.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use crate::error::{Error, Result};

/// Row-major grid of intensities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be at least 1x1"));
        }
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("intensity {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from `f(row, col)`, clamping each value into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(clamp_unit(f(r, c)));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Applies `f` per pixel, clamping the result into `[0, 1]`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| clamp_unit(f(v))).collect(),
        }
    }

    /// Min-max stretch onto `[0, 1]`. Constant images are returned unchanged.
    pub fn normalized(&self) -> Self {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if hi <= lo {
            return self.clone();
        }
        self.map(|v| (v - lo) / (hi - lo))
    }

    /// Sub-image starting at `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || row + height > self.height || col + width > self.width {
            return Err(Error::invalid(format!(
                "crop {width}x{height} at ({row}, {col}) exceeds {}x{}",
                self.width, self.height
            )));
        }
        Ok(Self::from_fn(width, height, |r, c| {
            self.get(row + r, col + c)
        }))
    }

    pub(crate) fn ensure_same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::dims(self.dims(), other.dims()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Loads an 8-bit grayscale or 8-bit RGB image (PNG or PGM/PPM). RGB is
/// reduced by channel mean.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let decoded = reader.decode().map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let data: Vec<f64> = match decoded {
        DynamicImage::ImageLuma8(img) => img
            .into_raw()
            .into_iter()
            .map(|b| b as f64 / 255.0)
            .collect(),
        DynamicImage::ImageRgb8(img) => img
            .into_raw()
            .chunks_exact(3)
            .map(|p| (p[0] as u32 + p[1] as u32 + p[2] as u32) as f64 / 765.0)
            .collect(),
        other => {
            return Err(Error::UnsupportedImage {
                path: path.to_path_buf(),
                detail: format!("expected 8-bit gray or RGB, found {:?}", other.color()),
            })
        }
    };
    GrayImage::new(width, height, data)
}

/// Images that can be written as 8-bit PNG.
pub trait PngEncode {
    fn to_dynamic(&self) -> DynamicImage;
}

/// Quantizes a unit-interval value to a byte as `round(v * 255)`.
#[inline]
pub fn to_byte(v: f64) -> u8 {
    (clamp_unit(v) * 255.0).round() as u8
}

impl PngEncode for GrayImage {
    fn to_dynamic(&self) -> DynamicImage {
        let bytes = self.data.iter().map(|&v| to_byte(v)).collect();
        let buf = image::GrayImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("buffer length matches dimensions");
        DynamicImage::ImageLuma8(buf)
    }
}

pub fn save_png(img: &impl PngEncode, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = BufWriter::new(file);
    img.to_dynamic()
        .write_to(&mut writer, ImageFormat::Png)
        .map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })
}

/// Reflects an out-of-range index back into `0..n` without repeating the
/// edge sample (`[a, b, c]` extends as `... c b a b c b a ...`).
#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Pads by `margin` pixels on every side, mirroring about the edge pixels.
/// Margins wider than the image fold repeatedly.
pub fn pad_mirror(img: &GrayImage, margin: usize) -> Result<GrayImage> {
    if margin == 0 {
        return Ok(img.clone());
    }
    if img.width.min(img.height) < 2 {
        return Err(Error::invalid(format!(
            "cannot mirror-pad a {}x{} image: no interior to reflect",
            img.width, img.height
        )));
    }
    let m = margin as isize;
    Ok(GrayImage::from_fn(
        img.width + 2 * margin,
        img.height + 2 * margin,
        |r, c| {
            let sr = reflect_index(r as isize - m, img.height);
            let sc = reflect_index(c as isize - m, img.width);
            img.get(sr, sc)
        },
    ))
}

/// The two flattened W×W windows sharing a center.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchPair {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub center: (usize, usize),
}

/// Extracts row-major W×W windows from already padded images.
pub fn extract_patch_pair(
    src: &GrayImage,
    tgt: &GrayImage,
    center: (usize, usize),
    patch: usize,
) -> Result<PatchPair> {
    src.ensure_same_dims(tgt)?;
    if patch.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "patch size must be odd, got {patch}"
        )));
    }
    let half = patch / 2;
    let (row, col) = center;
    if row < half || col < half || row + half >= src.height || col + half >= src.width {
        return Err(Error::invalid(format!(
            "window of size {patch} at {center:?} does not fit a {}x{} image",
            src.width, src.height
        )));
    }
    let window = |img: &GrayImage| {
        let mut v = Vec::with_capacity(patch * patch);
        for r in row - half..=row + half {
            let start = r * img.width + col - half;
            v.extend_from_slice(&img.data[start..start + patch]);
        }
        v
    };
    Ok(PatchPair {
        source: window(src),
        target: window(tgt),
        center,
    })
}

/// Binary pixel selection used to restrict summary statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Every nonzero pixel is selected.
    pub fn from_image(img: &GrayImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            bits: img.data.iter().map(|&v| v > 0.0).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_gray(path).map(|img| Self::from_image(&img))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}
