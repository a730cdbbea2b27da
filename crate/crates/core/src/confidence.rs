//! Patch-level normalized confidence score and the sliding-window map.

use std::fmt::Write as _;

use image::DynamicImage;

use crate::error::{Error, Result};
use crate::exec::{fill_rows, Execution};
use crate::imgio::{pad_mirror, to_byte, GrayImage, Mask, PngEncode};
use crate::stats::{
    bin_of, boundary_pmf, cdf_from_pmf, correlation_band, estimate_pmf, frechet_bounds,
    joint_pmf_model, quantize, Bound, CountModel, JointPmf, Pmf, MARGINAL_TOLERANCE,
};

pub const DEFAULT_PATCH: usize = 7;
pub const DEFAULT_BINS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapConfig {
    /// Odd window side length W.
    pub patch: usize,
    /// Number of equal-width intensity bins over `[0, 1]`.
    pub bins: usize,
    pub execution: Execution,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            patch: DEFAULT_PATCH,
            bins: DEFAULT_BINS,
            execution: Execution::default(),
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patch == 0 || self.patch.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "patch size must be odd and positive, got {}",
                self.patch
            )));
        }
        if self.bins < 2 {
            return Err(Error::invalid(format!(
                "bin count must be at least 2, got {}",
                self.bins
            )));
        }
        if self.bins > u16::MAX as usize {
            return Err(Error::invalid(format!(
                "bin count {} is too large",
                self.bins
            )));
        }
        Ok(())
    }
}

/// Per-pixel scores in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceMap {
    width: usize,
    height: usize,
    scores: Vec<f64>,
}

/// Summary statistics of a map over an optional mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of pixels scoring at least 0.5.
    pub frac_high: f64,
    pub pixels: usize,
}

impl ConfidenceMap {
    pub fn new(width: usize, height: usize, scores: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || scores.len() != width * height {
            return Err(Error::invalid(format!(
                "{} scores do not form a {width}x{height} map",
                scores.len()
            )));
        }
        if let Some(s) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::invalid(format!("score {s} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            scores,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.scores[row * self.width + col]
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.scores.clone())
            .expect("scores are valid intensities")
    }

    pub fn summary(&self, mask: Option<&Mask>) -> Result<MapSummary> {
        let selected = self.selected(mask)?;
        let pixels = selected.len();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut high = 0usize;
        for &s in &selected {
            min = min.min(s);
            max = max.max(s);
            if s >= 0.5 {
                high += 1;
            }
        }
        Ok(MapSummary {
            mean: selected.iter().sum::<f64>() / pixels as f64,
            min,
            max,
            frac_high: high as f64 / pixels as f64,
            pixels,
        })
    }

    fn selected(&self, mask: Option<&Mask>) -> Result<Vec<f64>> {
        let out: Vec<f64> = match mask {
            None => self.scores.clone(),
            Some(m) => {
                if m.dims() != self.dims() {
                    return Err(Error::dims(self.dims(), m.dims()));
                }
                self.scores
                    .iter()
                    .zip(m.bits())
                    .filter(|(_, &b)| b)
                    .map(|(&s, _)| s)
                    .collect()
            }
        };
        if out.is_empty() {
            return Err(Error::invalid("mask selects no pixels"));
        }
        Ok(out)
    }

    /// One line per row, space-separated shortest round-trip decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.scores.len() * 8);
        for row in self.scores.chunks(self.width) {
            for (i, s) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{s}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut scores = Vec::new();
        let mut width = None;
        let mut height = 0;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| Error::Parse {
                        line: i + 1,
                        detail: format!("{t:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Parse {
                        line: i + 1,
                        detail: format!("expected {w} values, found {}", row.len()),
                    })
                }
                _ => {}
            }
            scores.extend(row);
            height += 1;
        }
        Self::new(width.unwrap_or(0), height, scores)
    }
}

impl PngEncode for ConfidenceMap {
    fn to_dynamic(&self) -> DynamicImage {
        let bytes = self.scores.iter().map(|&s| to_byte(s)).collect();
        DynamicImage::ImageLuma8(
            image::GrayImage::from_raw(self.width as u32, self.height as u32, bytes)
                .expect("buffer length matches dimensions"),
        )
    }
}

/// `2 I(X;Y) / (H(X) + H(Y))` in bits; 0 when both entropies vanish.
pub fn confidence_score(joint: &JointPmf, fx: &Pmf, fy: &Pmf) -> Result<f64> {
    if fx.bins() != joint.bins() || fy.bins() != joint.bins() {
        return Err(Error::invalid(
            "bin count mismatch between joint and marginals",
        ));
    }
    let err = joint.marginal_error(fx, fy);
    if err > MARGINAL_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "joint marginals deviate from the supplied marginals by {err:e}"
        )));
    }
    Ok(score_unchecked(joint, fx, fy))
}

// Entropy and information terms share the `p * (-log2 p)` form and summation
// order, so a diagonal joint equal to its marginals scores exactly 1.
fn score_unchecked(joint: &JointPmf, fx: &Pmf, fy: &Pmf) -> f64 {
    let lx: Vec<f64> = fx.mass().iter().map(|p| p.log2()).collect();
    let ly: Vec<f64> = fy.mass().iter().map(|p| p.log2()).collect();
    let entropy = |mass: &[f64], logs: &[f64]| {
        let mut h = 0.0;
        for (&p, &l) in mass.iter().zip(logs) {
            if p > 0.0 {
                h += p * -l;
            }
        }
        h
    };
    let denom = entropy(fx.mass(), &lx) + entropy(fy.mass(), &ly);
    if denom <= 0.0 {
        return 0.0;
    }
    let mut info = 0.0;
    for (x, (&px, &lpx)) in fx.mass().iter().zip(&lx).enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, (&py, &lpy)) in fy.mass().iter().zip(&ly).enumerate() {
            let f = joint.get(x, y);
            if f > 0.0 && py > 0.0 {
                info += f * (f.log2() - lpx - lpy);
            }
        }
    }
    (2.0 * info / denom).clamp(0.0, 1.0)
}

/// Scores one pair of intensity vectors by running the floating-point chain
/// step by step: quantize, histogram, CDF, Fréchet bounds, boundary PMFs,
/// correlation band, mixture, score.
pub fn score_chain(source: &[f64], target: &[f64], bins: usize) -> Result<f64> {
    let xs = quantize(source, bins)?;
    let ys = quantize(target, bins)?;
    score_indices_chain(&xs, &ys, bins)
}

/// [`score_chain`] on already-quantized bin indices.
pub fn score_indices_chain(xs: &[usize], ys: &[usize], bins: usize) -> Result<f64> {
    let fx = estimate_pmf(xs, bins)?;
    let fy = estimate_pmf(ys, bins)?;
    let cx = cdf_from_pmf(&fx);
    let cy = cdf_from_pmf(&fy);
    let bounds = frechet_bounds(&cx, &cy)?;
    let upper = boundary_pmf(&bounds, Bound::Upper);
    let lower = boundary_pmf(&bounds, Bound::Lower);
    let band = correlation_band(xs, ys, &cx, &cy, &bounds)?;
    let joint = joint_pmf_model(&band, &upper, &lower, &fx, &fy)?;
    confidence_score(&joint, &fx, &fy)
}

/// Scores paired bin indices through the exact count-domain model.
pub fn score_indices(model: &mut CountModel, xs: &[usize], ys: &[usize]) -> Result<f64> {
    let fit = model.fit(xs, ys)?;
    Ok(score_unchecked(&fit.joint, &fit.fx, &fit.fy))
}

/// Confidence of information transfer from `src` into `tgt`, one score per
/// pixel from the W×W windows centered on it (mirror-padded at the borders).
pub fn confidence_map(src: &GrayImage, tgt: &GrayImage, cfg: &MapConfig) -> Result<ConfidenceMap> {
    cfg.validate()?;
    src.ensure_same_dims(tgt)?;
    let margin = cfg.patch / 2;
    let (width, height) = src.dims();
    let index_grid = |img: &GrayImage| -> Result<(usize, Vec<u16>)> {
        let padded = pad_mirror(img, margin)?;
        let w = padded.width();
        Ok((
            w,
            padded
                .data()
                .iter()
                .map(|&v| bin_of(v, cfg.bins) as u16)
                .collect(),
        ))
    };
    let (pw, sx) = index_grid(src)?;
    let (_, sy) = index_grid(tgt)?;
    let patch = cfg.patch;

    let mut scores = vec![0.0; width * height];
    fill_rows(&mut scores, width, cfg.execution, |row, out| {
        let mut model = CountModel::new(cfg.bins).expect("validated bin count");
        let mut xs = Vec::with_capacity(patch * patch);
        let mut ys = Vec::with_capacity(patch * patch);
        for (col, slot) in out.iter_mut().enumerate() {
            xs.clear();
            ys.clear();
            // padded (row, col) is the window's top-left corner
            for r in row..row + patch {
                let start = r * pw + col;
                xs.extend(sx[start..start + patch].iter().map(|&v| v as usize));
                ys.extend(sy[start..start + patch].iter().map(|&v| v as usize));
            }
            *slot = score_indices(&mut model, &xs, &ys).expect("indices are in range");
        }
    });
    ConfidenceMap::new(width, height, scores)
}

/// Arithmetic mean of the scores, optionally restricted to a mask.
pub fn mean_confidence(map: &ConfidenceMap, mask: Option<&Mask>) -> Result<f64> {
    map.summary(mask).map(|s| s.mean)
}
