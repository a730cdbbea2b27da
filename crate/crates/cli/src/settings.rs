use std::path::PathBuf;

use confmap::confidence::{DEFAULT_BINS, DEFAULT_PATCH};
use confmap::overlay::DEFAULT_ALPHA;
use confmap::{Execution, MapConfig, OverlayConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Effective parameters for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub patch: usize,
    pub bins: usize,
    pub alpha: f64,
    pub seed: u64,
    pub normalize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            patch: DEFAULT_PATCH,
            bins: DEFAULT_BINS,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            normalize: false,
            mask: None,
        }
    }
}

/// Partial settings as written in a batch file; unset keys inherit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub patch: Option<usize>,
    pub bins: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub normalize: Option<bool>,
    pub mask: Option<PathBuf>,
}

impl Settings {
    pub fn with(&self, o: &Overrides) -> Settings {
        Settings {
            patch: o.patch.unwrap_or(self.patch),
            bins: o.bins.unwrap_or(self.bins),
            alpha: o.alpha.unwrap_or(self.alpha),
            seed: o.seed.unwrap_or(self.seed),
            normalize: o.normalize.unwrap_or(self.normalize),
            mask: o.mask.clone().or_else(|| self.mask.clone()),
        }
    }

    pub fn map_config(&self) -> Result<MapConfig, CliError> {
        let cfg = MapConfig {
            patch: self.patch,
            bins: self.bins,
            execution: Execution::Parallel,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn overlay_config(&self) -> Result<OverlayConfig, CliError> {
        OverlayConfig::new(self.alpha).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.map_config()?;
        self.overlay_config()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let s = Settings::default();
        assert_eq!((s.patch, s.bins, s.alpha, s.seed), (7, 16, 0.7, 0));
        assert!(!s.normalize);
    }

    #[test]
    fn overrides_layer() {
        let s = Settings::default().with(&Overrides {
            patch: Some(5),
            alpha: Some(0.0),
            ..Default::default()
        });
        assert_eq!((s.patch, s.bins, s.alpha), (5, 16, 0.0));
        assert!(Settings {
            patch: 4,
            ..Settings::default()
        }
        .validate()
        .is_err());
        assert!(Settings {
            alpha: 2.0,
            ..Settings::default()
        }
        .validate()
        .is_err());
    }
}
