//! Noise perturbations applied to predicted images before re-scoring.
//!
//! Random draws use ChaCha8 (`rand_chacha`) seeded from the spec's 64-bit
//! seed, with one independent stream per image row (`set_stream(row)`). Rows
//! can therefore be generated in any order or in parallel and still produce
//! identical bytes.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fill_rows, Execution};
use crate::imgio::{clamp_unit, reflect_index, GrayImage};

pub const GAUSSIAN_VARIANCE: f64 = 0.01;
pub const POISSON_SCALE: f64 = 255.0;
pub const SALT_PEPPER_DENSITY: f64 = 0.05;
pub const SPECKLE_VARIANCE: f64 = 0.05;
pub const BLUR_SIGMA: f64 = 0.5;

fn default_gaussian_variance() -> f64 {
    GAUSSIAN_VARIANCE
}
fn default_poisson_scale() -> f64 {
    POISSON_SCALE
}
fn default_density() -> f64 {
    SALT_PEPPER_DENSITY
}
fn default_speckle_variance() -> f64 {
    SPECKLE_VARIANCE
}
fn default_sigma() -> f64 {
    BLUR_SIGMA
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    /// Additive white noise `N(mean, variance)`.
    Gaussian {
        #[serde(default)]
        mean: f64,
        #[serde(default = "default_gaussian_variance")]
        variance: f64,
    },
    /// Photon noise: `Poisson(v * scale) / scale`.
    Poisson {
        #[serde(default = "default_poisson_scale")]
        scale: f64,
    },
    /// Each pixel replaced by 0 or 1 (equiprobable) with probability `density`.
    SaltPepper {
        #[serde(default = "default_density")]
        density: f64,
    },
    /// Multiplicative `I + N(0, variance) * I`.
    Speckle {
        #[serde(default = "default_speckle_variance")]
        variance: f64,
    },
    /// Gaussian smoothing, kernel radius `ceil(3 sigma)`.
    Blur {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
}

impl Noise {
    pub const KINDS: [&'static str; 5] = ["gaussian", "poisson", "salt_pepper", "speckle", "blur"];

    pub fn default_for(kind: &str) -> Result<Self> {
        Ok(match kind {
            "gaussian" => Noise::Gaussian {
                mean: 0.0,
                variance: GAUSSIAN_VARIANCE,
            },
            "poisson" => Noise::Poisson {
                scale: POISSON_SCALE,
            },
            "salt_pepper" => Noise::SaltPepper {
                density: SALT_PEPPER_DENSITY,
            },
            "speckle" => Noise::Speckle {
                variance: SPECKLE_VARIANCE,
            },
            "blur" => Noise::Blur { sigma: BLUR_SIGMA },
            other => return Err(Error::invalid(format!("unknown noise kind {other:?}"))),
        })
    }

    /// The five perturbations with their default parameters.
    pub fn standard_set() -> Vec<Noise> {
        Self::KINDS
            .iter()
            .map(|k| Self::default_for(k).expect("known kind"))
            .collect()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Noise::Gaussian { .. } => "gaussian",
            Noise::Poisson { .. } => "poisson",
            Noise::SaltPepper { .. } => "salt_pepper",
            Noise::Speckle { .. } => "speckle",
            Noise::Blur { .. } => "blur",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Noise::Gaussian { mean, variance } => mean.is_finite() && variance >= 0.0,
            Noise::Poisson { scale } => scale > 0.0 && scale.is_finite(),
            Noise::SaltPepper { density } => (0.0..=1.0).contains(&density),
            Noise::Speckle { variance } => variance >= 0.0 && variance.is_finite(),
            Noise::Blur { sigma } => sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid noise parameters: {self}")))
        }
    }
}

impl fmt::Display for Noise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Noise::Gaussian { mean, variance } => {
                write!(f, "gaussian:mean={mean},variance={variance}")
            }
            Noise::Poisson { scale } => write!(f, "poisson:scale={scale}"),
            Noise::SaltPepper { density } => write!(f, "salt_pepper:density={density}"),
            Noise::Speckle { variance } => write!(f, "speckle:variance={variance}"),
            Noise::Blur { sigma } => write!(f, "blur:sigma={sigma}"),
        }
    }
}

/// Parses `kind` or `kind:key=value,key=value`.
impl FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), p),
            None => (s.trim(), ""),
        };
        let mut noise = Noise::default_for(kind)?;
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {pair:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad value for {key}: {e}")))?;
            let slot = match (&mut noise, key.trim()) {
                (Noise::Gaussian { mean, .. }, "mean") => mean,
                (Noise::Gaussian { variance, .. }, "variance") => variance,
                (Noise::Poisson { scale }, "scale") => scale,
                (Noise::SaltPepper { density }, "density") => density,
                (Noise::Speckle { variance }, "variance") => variance,
                (Noise::Blur { sigma }, "sigma") => sigma,
                (_, other) => {
                    return Err(Error::invalid(format!("{kind} has no parameter {other:?}")))
                }
            };
            *slot = value;
        }
        noise.validate()?;
        Ok(noise)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub noise: Noise,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(noise: Noise, seed: u64) -> Self {
        Self { noise, seed }
    }
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

pub fn apply_noise(img: &GrayImage, spec: &NoiseSpec) -> Result<GrayImage> {
    apply_noise_with(img, spec, Execution::default())
}

/// Applies the perturbation and clamps the result into `[0, 1]`.
pub fn apply_noise_with(img: &GrayImage, spec: &NoiseSpec, exec: Execution) -> Result<GrayImage> {
    spec.noise.validate()?;
    if let Noise::Blur { sigma } = spec.noise {
        return Ok(gaussian_blur(img, sigma, exec));
    }
    let (width, height) = img.dims();
    let src = img.data();
    let mut out = vec![0.0; width * height];
    let noise = spec.noise;
    fill_rows(&mut out, width, exec, |row, dst| {
        let mut rng = row_rng(spec.seed, row);
        let input = &src[row * width..(row + 1) * width];
        match noise {
            Noise::Gaussian { mean, variance } => {
                let normal = Normal::new(mean, variance.sqrt()).expect("validated variance");
                for (d, &v) in dst.iter_mut().zip(input) {
                    *d = v + normal.sample(&mut rng);
                }
            }
            Noise::Speckle { variance } => {
                let normal = Normal::new(0.0, variance.sqrt()).expect("validated variance");
                for (d, &v) in dst.iter_mut().zip(input) {
                    *d = v + normal.sample(&mut rng) * v;
                }
            }
            Noise::Poisson { scale } => {
                for (d, &v) in dst.iter_mut().zip(input) {
                    let lambda = v * scale;
                    *d = if lambda > 0.0 {
                        let draw: f64 = Poisson::new(lambda)
                            .expect("positive rate")
                            .sample(&mut rng);
                        draw / scale
                    } else {
                        0.0
                    };
                }
            }
            Noise::SaltPepper { density } => {
                for (d, &v) in dst.iter_mut().zip(input) {
                    *d = if rng.random::<f64>() < density {
                        if rng.random::<bool>() {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        v
                    };
                }
            }
            Noise::Blur { .. } => unreachable!("handled above"),
        }
        dst.iter_mut().for_each(|v| *v = clamp_unit(*v));
    });
    GrayImage::new(width, height, out)
}

/// Normalized 1-D Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian smoothing with mirror-reflected borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64, exec: Execution) -> GrayImage {
    let taps = gaussian_kernel(sigma);
    let radius = (taps.len() / 2) as isize;
    let (width, height) = img.dims();
    let src = img.data();

    let mut horizontal = vec![0.0; width * height];
    fill_rows(&mut horizontal, width, exec, |row, dst| {
        let line = &src[row * width..(row + 1) * width];
        for (c, d) in dst.iter_mut().enumerate() {
            *d = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * line[reflect_index(c as isize + k as isize - radius, width)])
                .sum();
        }
    });
    let mut out = vec![0.0; width * height];
    fill_rows(&mut out, width, exec, |row, dst| {
        for (c, d) in dst.iter_mut().enumerate() {
            let v: f64 = taps
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let r = reflect_index(row as isize + k as isize - radius, height);
                    t * horizontal[r * width + c]
                })
                .sum();
            *d = clamp_unit(v);
        }
    });
    GrayImage::new(width, height, out).expect("clamped intensities")
}
