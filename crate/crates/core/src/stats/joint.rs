use crate::error::{Error, Result};

use super::{Cdf, Pmf, MASS_TOLERANCE, RESIDUE_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// Pointwise Fréchet–Hoeffding bounds on the joint CDF, row-major `B×B`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointCdfBounds {
    bins: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl JointCdfBounds {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn grid(&self, which: Bound) -> &[f64] {
        match which {
            Bound::Lower => &self.lower,
            Bound::Upper => &self.upper,
        }
    }
}

/// `F^U(x,y) = min(F_X(x), F_Y(y))` and `F^L(x,y) = max(F_X(x) + F_Y(y) - 1, 0)`.
pub fn frechet_bounds(fx: &Cdf, fy: &Cdf) -> Result<JointCdfBounds> {
    let bins = fx.bins();
    if fy.bins() != bins {
        return Err(Error::invalid(format!(
            "bin count mismatch: {} vs {}",
            bins,
            fy.bins()
        )));
    }
    let mut lower = Vec::with_capacity(bins * bins);
    let mut upper = Vec::with_capacity(bins * bins);
    for &a in fx.cum() {
        for &b in fy.cum() {
            let u = a.min(b);
            // rounding in a + b - 1 can overshoot min(a, b) by an ulp
            upper.push(u);
            lower.push((a + b - 1.0).max(0.0).min(u));
        }
    }
    Ok(JointCdfBounds { bins, lower, upper })
}

/// Joint probability mass on `B×B` bin pairs, row index = source bin.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    bins: usize,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(bins: usize, mass: Vec<f64>) -> Result<Self> {
        if bins == 0 || mass.len() != bins * bins {
            return Err(Error::InvalidDistribution(format!(
                "joint grid of length {} is not {bins}x{bins}",
                mass.len()
            )));
        }
        if mass.iter().any(|m| m.is_nan() || *m < 0.0) {
            return Err(Error::InvalidDistribution(
                "negative or NaN joint mass".into(),
            ));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint mass sums to {total}"
            )));
        }
        Ok(Self { bins, mass })
    }

    pub(crate) fn from_raw(bins: usize, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), bins * bins);
        Self { bins, mass }
    }

    /// The independent coupling `f_X ⊗ f_Y`.
    pub fn product(fx: &Pmf, fy: &Pmf) -> Self {
        let mut mass = Vec::with_capacity(fx.bins() * fy.bins());
        for &a in fx.mass() {
            for &b in fy.mass() {
                mass.push(a * b);
            }
        }
        Self {
            bins: fx.bins(),
            mass,
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.mass[x * self.bins + y]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Marginal of the row variable.
    pub fn row_sums(&self) -> Vec<f64> {
        self.mass
            .chunks(self.bins)
            .map(|r| r.iter().sum())
            .collect()
    }

    /// Marginal of the column variable.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.bins];
        for row in self.mass.chunks(self.bins) {
            for (o, m) in out.iter_mut().zip(row) {
                *o += m;
            }
        }
        out
    }

    /// Largest absolute deviation of either marginal from `fx` / `fy`.
    pub fn marginal_error(&self, fx: &Pmf, fy: &Pmf) -> f64 {
        let rows = self.row_sums();
        let cols = self.col_sums();
        rows.iter()
            .zip(fx.mass())
            .chain(cols.iter().zip(fy.mass()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Covariance of the bin indices under this joint.
    pub fn covariance(&self) -> f64 {
        let b = self.bins;
        let (mut ex, mut ey, mut exy) = (0.0, 0.0, 0.0);
        for x in 0..b {
            for y in 0..b {
                let p = self.get(x, y);
                ex += x as f64 * p;
                ey += y as f64 * p;
                exy += (x * y) as f64 * p;
            }
        }
        exy - ex * ey
    }

    /// `w * a + (1 - w) * b`, cellwise.
    pub(crate) fn mix(w: f64, a: &JointPmf, b: &JointPmf) -> Self {
        let mass = a
            .mass
            .iter()
            .zip(&b.mass)
            .map(|(&p, &q)| w * p + (1.0 - w) * q)
            .collect();
        Self { bins: a.bins, mass }
    }
}

/// Recovers the coupling PMF from a boundary CDF by 2-D differencing.
///
/// Cancellation residues smaller than [`RESIDUE_TOLERANCE`] become exact
/// zeros, remaining negatives are clamped, and the grid is renormalized.
pub fn boundary_pmf(bounds: &JointCdfBounds, which: Bound) -> JointPmf {
    let b = bounds.bins;
    let f = bounds.grid(which);
    let at = |x: usize, y: usize| f[x * b + y];
    let mut mass = Vec::with_capacity(b * b);
    for x in 0..b {
        for y in 0..b {
            let mut v = at(x, y);
            if x > 0 {
                v -= at(x - 1, y);
            }
            if y > 0 {
                v -= at(x, y - 1);
            }
            if x > 0 && y > 0 {
                v += at(x - 1, y - 1);
            }
            if v.abs() < RESIDUE_TOLERANCE || v < 0.0 {
                v = 0.0;
            }
            mass.push(v);
        }
    }
    let total: f64 = mass.iter().sum();
    if total > 0.0 && total != 1.0 {
        mass.iter_mut().for_each(|m| *m /= total);
    }
    JointPmf { bins: b, mass }
}

/// Hoeffding's identity on the bin-index lattice:
/// `Σ_x Σ_y (F(x,y) - F_X(x) F_Y(y))`.
pub fn hoeffding_covariance(grid: &[f64], fx: &Cdf, fy: &Cdf) -> Result<f64> {
    let b = fx.bins();
    if fy.bins() != b || grid.len() != b * b {
        return Err(Error::invalid(format!(
            "bin count mismatch: grid {} vs marginals {} and {}",
            grid.len(),
            b,
            fy.bins()
        )));
    }
    let mut sum = 0.0;
    for x in 0..b {
        for y in 0..b {
            sum += grid[x * b + y] - fx.at(x) * fy.at(y);
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::cdf_from_pmf;
    use approx::assert_abs_diff_eq;

    fn half_half() -> Cdf {
        cdf_from_pmf(&Pmf::new(vec![0.5, 0.5]).unwrap())
    }

    #[test]
    fn bounds_two_point() {
        let c = half_half();
        let b = frechet_bounds(&c, &c).unwrap();
        assert_eq!(b.upper()[0], 0.5);
        assert_eq!(b.lower()[0], 0.0);
        assert_eq!(b.upper()[3], 1.0);
        assert_eq!(b.lower()[3], 1.0);
    }

    #[test]
    fn bounds_collapse_for_point_mass() {
        let fx = cdf_from_pmf(&Pmf::new(vec![0.2, 0.3, 0.5]).unwrap());
        let fy = cdf_from_pmf(&Pmf::new(vec![0.0, 0.0, 1.0]).unwrap());
        let b = frechet_bounds(&fx, &fy).unwrap();
        for (l, u) in b.lower().iter().zip(b.upper()) {
            assert_abs_diff_eq!(l, u, epsilon = 1e-15);
        }
        let three = cdf_from_pmf(&Pmf::new(vec![0.2, 0.3, 0.5]).unwrap());
        let two = half_half();
        assert!(frechet_bounds(&three, &two).is_err());
    }

    #[test]
    fn boundary_pmfs_two_point() {
        let c = half_half();
        let b = frechet_bounds(&c, &c).unwrap();
        assert_eq!(boundary_pmf(&b, Bound::Upper).mass(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(boundary_pmf(&b, Bound::Lower).mass(), &[0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn boundary_pmf_point_masses() {
        let fx = cdf_from_pmf(&Pmf::new(vec![0.0, 1.0, 0.0]).unwrap());
        let fy = cdf_from_pmf(&Pmf::new(vec![0.0, 0.0, 1.0]).unwrap());
        let b = frechet_bounds(&fx, &fy).unwrap();
        for which in [Bound::Lower, Bound::Upper] {
            let p = boundary_pmf(&b, which);
            assert_eq!(p.get(1, 2), 1.0);
            assert_eq!(p.total(), 1.0);
        }
    }

    #[test]
    fn hoeffding_two_point() {
        let c = half_half();
        let b = frechet_bounds(&c, &c).unwrap();
        assert_abs_diff_eq!(hoeffding_covariance(b.upper(), &c, &c).unwrap(), 0.25);
        assert_abs_diff_eq!(hoeffding_covariance(b.lower(), &c, &c).unwrap(), -0.25);
    }

    #[test]
    fn hoeffding_vanishes_on_product() {
        let fx = cdf_from_pmf(&Pmf::new(vec![0.1, 0.6, 0.3]).unwrap());
        let fy = cdf_from_pmf(&Pmf::new(vec![0.3, 0.3, 0.4]).unwrap());
        let grid: Vec<f64> = fx
            .cum()
            .iter()
            .flat_map(|a| fy.cum().iter().map(move |b| a * b))
            .collect();
        assert_eq!(hoeffding_covariance(&grid, &fx, &fy).unwrap(), 0.0);
        assert!(hoeffding_covariance(&grid[1..], &fx, &fy).is_err());
    }

    #[test]
    fn joint_validation() {
        assert!(JointPmf::new(2, vec![0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(JointPmf::new(2, vec![0.5, 0.5]).is_err());
        let j = JointPmf::new(2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(j.row_sums(), vec![0.5, 0.5]);
        assert_abs_diff_eq!(j.col_sums()[0], 0.6, epsilon = 1e-15);
    }
}
