//! RGB overlays: confidence maps blended onto the predicted image.
//!
//! Both conventions put one map in red, the other in green, and the predicted
//! image in blue:
//!
//! ```text
//! R = α·S_r + (1 − α)·I    G = α·S_g + (1 − α)·I    B = I
//! ```
//!
//! Fusion: `S_r` = source-MRI map, `S_g` = source-PET map, so magenta marks
//! MRI transfer and cyan marks PET transfer. Translation: `S_r` = map against
//! the source domain image, `S_g` = map against the reference target, so cyan,
//! blue and magenta rank best to worst.

use image::DynamicImage;

use crate::confidence::ConfidenceMap;
use crate::error::{Error, Result};
use crate::exec::{fill_rows, Execution};
use crate::imgio::{clamp_unit, to_byte, GrayImage, PngEncode};

pub const DEFAULT_ALPHA: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlayConfig {
    /// Color intensity: weight of the confidence term in R and G.
    pub alpha: f64,
}

impl Default for OverlayConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl OverlayConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(Self { alpha })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlayImage {
    width: usize,
    height: usize,
    rgb: Vec<[f64; 3]>,
}

impl OverlayImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.rgb
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> [f64; 3] {
        self.rgb[row * self.width + col]
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.rgb.iter().flat_map(|p| p.map(to_byte)).collect()
    }
}

impl PngEncode for OverlayImage {
    fn to_dynamic(&self) -> DynamicImage {
        DynamicImage::ImageRgb8(
            image::RgbImage::from_raw(self.width as u32, self.height as u32, self.to_rgb8())
                .expect("buffer length matches dimensions"),
        )
    }
}

#[inline]
pub fn blend_pixel(s_red: f64, s_green: f64, base: f64, alpha: f64) -> [f64; 3] {
    let keep = 1.0 - alpha;
    [
        clamp_unit(alpha * s_red + keep * base),
        clamp_unit(alpha * s_green + keep * base),
        base,
    ]
}

fn compose(
    red: &ConfidenceMap,
    green: &ConfidenceMap,
    base: &GrayImage,
    cfg: &OverlayConfig,
) -> Result<OverlayImage> {
    OverlayConfig::new(cfg.alpha)?;
    if red.dims() != base.dims() {
        return Err(Error::dims(red.dims(), base.dims()));
    }
    if green.dims() != base.dims() {
        return Err(Error::dims(green.dims(), base.dims()));
    }
    let (width, height) = base.dims();
    let mut rgb = vec![[0.0; 3]; width * height];
    fill_rows(&mut rgb, width, Execution::default(), |row, out| {
        for (col, px) in out.iter_mut().enumerate() {
            *px = blend_pixel(
                red.get(row, col),
                green.get(row, col),
                base.get(row, col),
                cfg.alpha,
            );
        }
    });
    Ok(OverlayImage { width, height, rgb })
}

/// Fusion overlay: red from the MRI map, green from the PET map, blue the
/// fused image.
pub fn compose_fusion(
    s_mri: &ConfidenceMap,
    s_pet: &ConfidenceMap,
    fused: &GrayImage,
    cfg: &OverlayConfig,
) -> Result<OverlayImage> {
    compose(s_mri, s_pet, fused, cfg)
}

/// Translation overlay: red from the map against the source-domain image,
/// green from the map against the reference, blue the predicted image.
pub fn compose_translation(
    s_source: &ConfidenceMap,
    s_reference: &ConfidenceMap,
    predicted: &GrayImage,
    cfg: &OverlayConfig,
) -> Result<OverlayImage> {
    compose(s_source, s_reference, predicted, cfg)
}

/// Which confidence term dominates a pixel, thresholding both at 0.5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dominance {
    /// Only the green map is high.
    Cyan,
    /// Neither map is high.
    Blue,
    /// Only the red map is high.
    Magenta,
    /// Both maps are high.
    White,
}

impl Dominance {
    pub fn classify(s_red: f64, s_green: f64) -> Self {
        match (s_red >= 0.5, s_green >= 0.5) {
            (false, true) => Dominance::Cyan,
            (false, false) => Dominance::Blue,
            (true, false) => Dominance::Magenta,
            (true, true) => Dominance::White,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DominanceFractions {
    pub cyan: f64,
    pub blue: f64,
    pub magenta: f64,
    pub white: f64,
}

pub fn dominance_fractions(
    red: &ConfidenceMap,
    green: &ConfidenceMap,
) -> Result<DominanceFractions> {
    if red.dims() != green.dims() {
        return Err(Error::dims(red.dims(), green.dims()));
    }
    let mut counts = [0usize; 4];
    for (&r, &g) in red.scores().iter().zip(green.scores()) {
        counts[Dominance::classify(r, g) as usize] += 1;
    }
    let n = red.scores().len() as f64;
    Ok(DominanceFractions {
        cyan: counts[Dominance::Cyan as usize] as f64 / n,
        blue: counts[Dominance::Blue as usize] as f64 / n,
        magenta: counts[Dominance::Magenta as usize] as f64 / n,
        white: counts[Dominance::White as usize] as f64 / n,
    })
}

/// Viridis sampled at 17 evenly spaced stops, dark blue to yellow.
const HEAT_RAMP: [[f64; 3]; 17] = [
    [0.267004, 0.004874, 0.329415],
    [0.282327, 0.094955, 0.417331],
    [0.278826, 0.175490, 0.483397],
    [0.258965, 0.251537, 0.524736],
    [0.229739, 0.322361, 0.545706],
    [0.199430, 0.387607, 0.554642],
    [0.172719, 0.448791, 0.557885],
    [0.149039, 0.508051, 0.557250],
    [0.127568, 0.566949, 0.550556],
    [0.120638, 0.625828, 0.533488],
    [0.157851, 0.683765, 0.501686],
    [0.246070, 0.738910, 0.452024],
    [0.369214, 0.788888, 0.382914],
    [0.515992, 0.831158, 0.294279],
    [0.678489, 0.863742, 0.189503],
    [0.845561, 0.887322, 0.099702],
    [0.993248, 0.906157, 0.143936],
];

pub const HEAT_MIN: [f64; 3] = HEAT_RAMP[0];
pub const HEAT_MAX: [f64; 3] = HEAT_RAMP[16];

/// Rec. 709 luma of an RGB triple.
pub fn luminance(rgb: [f64; 3]) -> f64 {
    0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2]
}

/// Piecewise-linear lookup into the heat ramp.
pub fn heat_color(score: f64) -> [f64; 3] {
    let t = score.clamp(0.0, 1.0) * (HEAT_RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(HEAT_RAMP.len() - 2);
    let frac = t - i as f64;
    let (a, b) = (HEAT_RAMP[i], HEAT_RAMP[i + 1]);
    [0, 1, 2].map(|k| a[k] + frac * (b[k] - a[k]))
}

pub fn colormap_gray_to_heat(map: &ConfidenceMap) -> OverlayImage {
    OverlayImage {
        width: map.width(),
        height: map.height(),
        rgb: map.scores().iter().map(|&s| heat_color(s)).collect(),
    }
}
