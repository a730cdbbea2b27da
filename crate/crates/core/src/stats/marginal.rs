use crate::error::{Error, Result};

use super::MASS_TOLERANCE;

/// Bin of a unit-interval intensity under `bins` equal-width global bins.
#[inline]
pub fn bin_of(v: f64, bins: usize) -> usize {
    ((v * bins as f64).floor() as usize).min(bins - 1)
}

/// Maps each intensity to `min(floor(v * B), B - 1)`.
pub fn quantize(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if bins < 2 {
        return Err(Error::invalid(format!(
            "bin count must be at least 2, got {bins}"
        )));
    }
    values
        .iter()
        .map(|&v| {
            if (0.0..=1.0).contains(&v) {
                Ok(bin_of(v, bins))
            } else {
                Err(Error::invalid(format!("intensity {v} outside [0, 1]")))
            }
        })
        .collect()
}

/// Probability mass over bin indices `0..bins`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    mass: Vec<f64>,
}

impl Pmf {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty pmf".into()));
        }
        if mass.iter().any(|m| m.is_nan() || *m < 0.0) {
            return Err(Error::InvalidDistribution("negative or NaN mass".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("mass sums to {total}")));
        }
        Ok(Self { mass })
    }

    /// Histogram estimate from raw bin counts.
    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        let n: u64 = counts.iter().map(|&c| c as u64).sum();
        if n == 0 {
            return Err(Error::InvalidDistribution("no samples".into()));
        }
        let n = n as f64;
        Ok(Self {
            mass: counts.iter().map(|&c| c as f64 / n).collect(),
        })
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn mean(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Population variance over the bin-index support.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.mass
            .iter()
            .enumerate()
            .map(|(k, p)| p * (k as f64 - mu).powi(2))
            .sum()
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy_bits(&self) -> f64 {
        self.mass
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -(p * p.log2()))
            .sum()
    }
}

/// Histogram PMF of bin indices: `mass[k] = count(k) / len`.
pub fn estimate_pmf(idx: &[usize], bins: usize) -> Result<Pmf> {
    if idx.is_empty() {
        return Err(Error::InvalidDistribution(
            "cannot estimate a pmf from no samples".into(),
        ));
    }
    let mut counts = vec![0u32; bins];
    for &i in idx {
        *counts
            .get_mut(i)
            .ok_or_else(|| Error::invalid(format!("bin index {i} outside 0..{bins}")))? += 1;
    }
    Pmf::from_counts(&counts)
}

/// Cumulative distribution `P(X <= k)` over bin indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Cdf {
    cum: Vec<f64>,
}

impl Cdf {
    pub fn bins(&self) -> usize {
        self.cum.len()
    }

    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        self.cum[k]
    }
}

/// Running sums are capped at 1 so rounding never pushes the tail above it.
pub fn cdf_from_pmf(p: &Pmf) -> Cdf {
    let cum = p
        .mass
        .iter()
        .scan(0.0, |acc, &m| {
            *acc += m;
            Some(acc.min(1.0))
        })
        .collect();
    Cdf { cum }
}
