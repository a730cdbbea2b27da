//! Per-pixel confidence maps that quantify how much information a predicted
//! image (a fusion or translation output) carries about a source image.
//!
//! Each pixel's score comes from the W×W windows centered on it in the source
//! and the target. The windows are quantized into histograms, the joint
//! distribution is modeled as a mixture of the Fréchet boundary coupling and
//! the independent product (weighted by the observed correlation relative to
//! the attainable extreme), and the score is the symmetric normalized mutual
//! information `2·I(X;Y) / (H(X) + H(Y))`.
//!
//! The crate also renders the two RGB overlay conventions (fusion and
//! translation), the noise perturbations used to stress the maps, and a
//! synthetic fixture generator.

pub mod confidence;
pub mod error;
pub mod exec;
pub mod harness;
pub mod imgio;
pub mod overlay;
pub mod perturb;
pub mod stats;

pub use confidence::{confidence_map, confidence_score, mean_confidence, ConfidenceMap, MapConfig};
pub use error::{Error, Result};
pub use exec::Execution;
pub use imgio::{GrayImage, Mask, PatchPair};
pub use overlay::{compose_fusion, compose_translation, OverlayConfig, OverlayImage};
pub use perturb::{apply_noise, Noise, NoiseSpec};
