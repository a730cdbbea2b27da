use crate::error::{Error, Result};

use super::{hoeffding_covariance, Cdf, JointCdfBounds, JointPmf, Pmf};

/// Observed correlation together with the extremes attainable under the
/// observed marginals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationBand {
    /// Sample Pearson correlation of the bin indices, clamped into the band.
    pub rho: f64,
    pub rho_lower: f64,
    pub rho_upper: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    /// Covariance of the antimonotone coupling.
    pub sigma_lower: f64,
    /// Covariance of the comonotone coupling.
    pub sigma_upper: f64,
    /// Set when either sample has zero variance; all correlations are then 0.
    pub degenerate: bool,
}

fn population_moments(v: &[usize]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<usize>() as f64 / n;
    let var = v.iter().map(|&a| (a as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Pearson correlation of the paired bin indices and its Fréchet band.
pub fn correlation_band(
    xs: &[usize],
    ys: &[usize],
    fx: &Cdf,
    fy: &Cdf,
    bounds: &JointCdfBounds,
) -> Result<CorrelationBand> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "sample length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::invalid("empty samples"));
    }
    if bounds.bins() != fx.bins() {
        return Err(Error::invalid("bounds and marginals disagree on bin count"));
    }
    let sigma_lower = hoeffding_covariance(bounds.lower(), fx, fy)?;
    let sigma_upper = hoeffding_covariance(bounds.upper(), fx, fy)?;
    let (mx, sigma_x) = population_moments(xs);
    let (my, sigma_y) = population_moments(ys);
    let scale = sigma_x * sigma_y;
    if scale == 0.0 {
        return Ok(CorrelationBand {
            rho: 0.0,
            rho_lower: 0.0,
            rho_upper: 0.0,
            sigma_x,
            sigma_y,
            sigma_lower,
            sigma_upper,
            degenerate: true,
        });
    }
    let cov = xs
        .iter()
        .zip(ys)
        .map(|(&a, &b)| (a as f64 - mx) * (b as f64 - my))
        .sum::<f64>()
        / xs.len() as f64;
    let rho_lower = sigma_lower / scale;
    let rho_upper = sigma_upper / scale;
    Ok(CorrelationBand {
        rho: (cov / scale).clamp(rho_lower, rho_upper),
        rho_lower,
        rho_upper,
        sigma_x,
        sigma_y,
        sigma_lower,
        sigma_upper,
        degenerate: false,
    })
}

/// Mixes the boundary coupling on the side of `rho` with the independent
/// product, weighted by how far `rho` reaches toward that boundary.
pub fn joint_pmf_model(
    band: &CorrelationBand,
    f_upper: &JointPmf,
    f_lower: &JointPmf,
    fx: &Pmf,
    fy: &Pmf,
) -> Result<JointPmf> {
    let b = fx.bins();
    if fy.bins() != b || f_upper.bins() != b || f_lower.bins() != b {
        return Err(Error::invalid(
            "bin count mismatch between joint and marginals",
        ));
    }
    let product = JointPmf::product(fx, fy);
    if band.degenerate || band.rho == 0.0 {
        return Ok(product);
    }
    let (weight, boundary) = if band.rho > 0.0 {
        if band.rho_upper <= 0.0 {
            return Err(Error::Internal(format!(
                "positive rho {} with non-positive upper bound {}",
                band.rho, band.rho_upper
            )));
        }
        (band.rho / band.rho_upper, f_upper)
    } else {
        if band.rho_lower >= 0.0 {
            return Err(Error::Internal(format!(
                "negative rho {} with non-negative lower bound {}",
                band.rho, band.rho_lower
            )));
        }
        (band.rho / band.rho_lower, f_lower)
    };
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::Internal(format!(
            "mixture weight {weight} outside [0, 1]"
        )));
    }
    Ok(JointPmf::mix(weight, boundary, &product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{boundary_pmf, cdf_from_pmf, estimate_pmf, frechet_bounds, Bound};
    use approx::assert_abs_diff_eq;

    fn band_for(xs: &[usize], ys: &[usize], bins: usize) -> CorrelationBand {
        let fx = cdf_from_pmf(&estimate_pmf(xs, bins).unwrap());
        let fy = cdf_from_pmf(&estimate_pmf(ys, bins).unwrap());
        let bounds = frechet_bounds(&fx, &fy).unwrap();
        correlation_band(xs, ys, &fx, &fy, &bounds).unwrap()
    }

    #[test]
    fn identical_samples_reach_upper() {
        let xs = [0, 1, 2, 3, 3, 1, 0, 2, 2];
        let band = band_for(&xs, &xs, 4);
        assert_abs_diff_eq!(band.rho_upper, 1.0, epsilon = 1e-12);
        assert_eq!(band.rho, band.rho_upper);
    }

    #[test]
    fn reversed_symmetric_samples_reach_lower() {
        let xs = [0, 1, 2, 3];
        let ys = [3, 2, 1, 0];
        let band = band_for(&xs, &ys, 4);
        // brute force: pearson of perfectly reversed uniform indices is -1
        assert_abs_diff_eq!(band.rho_lower, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(band.rho, band.rho_lower, epsilon = 1e-12);
    }

    #[test]
    fn constant_source_is_degenerate() {
        let band = band_for(&[2, 2, 2], &[0, 1, 3], 4);
        assert!(band.degenerate);
        assert_eq!(band.rho, 0.0);
        assert!(correlation_band(
            &[1, 2],
            &[1],
            &cdf_from_pmf(&Pmf::new(vec![0.5, 0.5]).unwrap()),
            &cdf_from_pmf(&Pmf::new(vec![0.5, 0.5]).unwrap()),
            &frechet_bounds(
                &cdf_from_pmf(&Pmf::new(vec![0.5, 0.5]).unwrap()),
                &cdf_from_pmf(&Pmf::new(vec![0.5, 0.5]).unwrap())
            )
            .unwrap()
        )
        .is_err());
    }

    fn binary_setup() -> (Pmf, JointPmf, JointPmf) {
        let f = Pmf::new(vec![0.5, 0.5]).unwrap();
        let c = cdf_from_pmf(&f);
        let bounds = frechet_bounds(&c, &c).unwrap();
        (
            f,
            boundary_pmf(&bounds, Bound::Upper),
            boundary_pmf(&bounds, Bound::Lower),
        )
    }

    fn band(rho: f64) -> CorrelationBand {
        CorrelationBand {
            rho,
            rho_lower: -1.0,
            rho_upper: 1.0,
            sigma_x: 0.5,
            sigma_y: 0.5,
            sigma_lower: -0.25,
            sigma_upper: 0.25,
            degenerate: false,
        }
    }

    #[test]
    fn mixture_examples() {
        let (f, up, lo) = binary_setup();
        let j = joint_pmf_model(&band(0.0), &up, &lo, &f, &f).unwrap();
        assert_eq!(j.mass(), &[0.25; 4]);
        let j = joint_pmf_model(&band(1.0), &up, &lo, &f, &f).unwrap();
        assert_eq!(j.mass(), up.mass());
        let j = joint_pmf_model(&band(0.5), &up, &lo, &f, &f).unwrap();
        assert_eq!(j.mass(), &[0.375, 0.125, 0.125, 0.375]);
        let j = joint_pmf_model(&band(-0.5), &up, &lo, &f, &f).unwrap();
        assert_eq!(j.mass(), &[0.125, 0.375, 0.375, 0.125]);
    }

    #[test]
    fn branches_meet_at_zero() {
        let (f, up, lo) = binary_setup();
        let tiny = 1e-300;
        let pos = joint_pmf_model(&band(tiny), &up, &lo, &f, &f).unwrap();
        let neg = joint_pmf_model(&band(-tiny), &up, &lo, &f, &f).unwrap();
        for (a, b) in pos.mass().iter().zip(neg.mass()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_weight_outside_unit() {
        let (f, up, lo) = binary_setup();
        assert!(matches!(
            joint_pmf_model(&band(1.5), &up, &lo, &f, &f),
            Err(Error::Internal(_))
        ));
        let mut b = band(0.3);
        b.rho_upper = 0.0;
        assert!(matches!(
            joint_pmf_model(&b, &up, &lo, &f, &f),
            Err(Error::Internal(_))
        ));
    }
}
