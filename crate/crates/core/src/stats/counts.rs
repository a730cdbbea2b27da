//! Count-domain evaluation of the modeled joint PMF.
//!
//! Every quantity up to the mixture weight is an integer when scaled by the
//! sample count `n` (or `n²` for covariances): cumulative counts, the
//! Fréchet bound grids, the differenced couplings and both Hoeffding sums.
//! Working in integers removes differencing residues entirely and makes the
//! band clamp an exact comparison, so a window paired with itself yields the
//! comonotone coupling with weight exactly 1.

use crate::error::{Error, Result};

use super::{Bound, JointPmf, Pmf};

/// Reusable scratch space for repeated window fits at a fixed bin count.
#[derive(Clone, Debug)]
pub struct CountModel {
    bins: usize,
    cx: Vec<u32>,
    cy: Vec<u32>,
    cum_x: Vec<i64>,
    cum_y: Vec<i64>,
    grid: Vec<i64>,
}

/// Result of one fit: the modeled joint, its marginals and the mixture used.
#[derive(Clone, Debug, PartialEq)]
pub struct CountFit {
    pub joint: JointPmf,
    pub fx: Pmf,
    pub fy: Pmf,
    /// Weight on the boundary coupling; 0 means the product model was used.
    pub weight: f64,
    pub side: Option<Bound>,
}

impl CountModel {
    pub fn new(bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::invalid(format!(
                "bin count must be at least 2, got {bins}"
            )));
        }
        Ok(Self {
            bins,
            cx: vec![0; bins],
            cy: vec![0; bins],
            cum_x: vec![0; bins],
            cum_y: vec![0; bins],
            grid: vec![0; bins * bins],
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Models the joint distribution of paired bin indices.
    pub fn fit(&mut self, xs: &[usize], ys: &[usize]) -> Result<CountFit> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::invalid(format!(
                "paired samples must be non-empty and equal length ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        let b = self.bins;
        if let Some(&bad) = xs.iter().chain(ys).find(|&&i| i >= b) {
            return Err(Error::invalid(format!("bin index {bad} outside 0..{b}")));
        }
        let n = xs.len() as i64;

        self.cx.iter_mut().for_each(|c| *c = 0);
        self.cy.iter_mut().for_each(|c| *c = 0);
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0i64, 0i64, 0i64, 0i64, 0i64);
        for (&x, &y) in xs.iter().zip(ys) {
            self.cx[x] += 1;
            self.cy[y] += 1;
            let (x, y) = (x as i64, y as i64);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let fx = Pmf::from_counts(&self.cx)?;
        let fy = Pmf::from_counts(&self.cy)?;

        let var_x = n * sxx - sx * sx;
        let var_y = n * syy - sy * sy;
        if var_x == 0 || var_y == 0 {
            return Ok(CountFit {
                joint: JointPmf::product(&fx, &fy),
                fx,
                fy,
                weight: 0.0,
                side: None,
            });
        }
        let cov = n * sxy - sx * sy;

        let mut acc = 0i64;
        for (c, &k) in self.cum_x.iter_mut().zip(&self.cx) {
            acc += k as i64;
            *c = acc;
        }
        acc = 0;
        for (c, &k) in self.cum_y.iter_mut().zip(&self.cy) {
            acc += k as i64;
            *c = acc;
        }

        // n² times the Hoeffding sums over the lattice
        let (mut cov_upper, mut cov_lower) = (0i64, 0i64);
        for &a in &self.cum_x {
            for &c in &self.cum_y {
                cov_upper += n * a.min(c) - a * c;
                cov_lower += n * (a + c - n).max(0) - a * c;
            }
        }

        let cov = cov.clamp(cov_lower, cov_upper);
        let (weight, side) = match cov.signum() {
            1 => (cov as f64 / cov_upper as f64, Bound::Upper),
            -1 => (cov as f64 / cov_lower as f64, Bound::Lower),
            _ => {
                return Ok(CountFit {
                    joint: JointPmf::product(&fx, &fy),
                    fx,
                    fy,
                    weight: 0.0,
                    side: None,
                })
            }
        };

        self.boundary_counts(side, n);
        let nf = n as f64;
        let mut mass = Vec::with_capacity(b * b);
        for x in 0..b {
            for y in 0..b {
                let coupled = self.grid[x * b + y] as f64 / nf;
                mass.push(weight * coupled + (1.0 - weight) * (fx.mass()[x] * fy.mass()[y]));
            }
        }
        Ok(CountFit {
            joint: JointPmf::from_raw(b, mass),
            fx,
            fy,
            weight,
            side: Some(side),
        })
    }

    /// Fills `grid` with the boundary coupling in counts (differenced bound).
    fn boundary_counts(&mut self, side: Bound, n: i64) {
        let b = self.bins;
        let bound = |a: i64, c: i64| match side {
            Bound::Upper => a.min(c),
            Bound::Lower => (a + c - n).max(0),
        };
        for x in 0..b {
            for y in 0..b {
                let at = |i: Option<usize>, j: Option<usize>| match (i, j) {
                    (Some(i), Some(j)) => bound(self.cum_x[i], self.cum_y[j]),
                    _ => 0,
                };
                let v = at(Some(x), Some(y))
                    - at(x.checked_sub(1), Some(y))
                    - at(Some(x), y.checked_sub(1))
                    + at(x.checked_sub(1), y.checked_sub(1));
                debug_assert!(v >= 0, "Fréchet coupling counts are nonnegative");
                self.grid[x * b + y] = v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_pair_is_exact_diagonal() {
        let xs = [0usize, 3, 3, 1, 2, 2, 2, 0, 1];
        let mut m = CountModel::new(4).unwrap();
        let fit = m.fit(&xs, &xs).unwrap();
        assert_eq!(fit.weight, 1.0);
        assert_eq!(fit.side, Some(Bound::Upper));
        for x in 0..4 {
            for y in 0..4 {
                let expect = if x == y { fit.fx.mass()[x] } else { 0.0 };
                assert_eq!(fit.joint.get(x, y), expect);
            }
        }
    }

    #[test]
    fn constant_falls_back_to_product() {
        let mut m = CountModel::new(4).unwrap();
        let fit = m.fit(&[1, 1, 1], &[0, 2, 3]).unwrap();
        assert_eq!(fit.weight, 0.0);
        assert_eq!(fit.side, None);
        assert_eq!(fit.joint, JointPmf::product(&fit.fx, &fit.fy));
    }

    #[test]
    fn input_validation() {
        let mut m = CountModel::new(4).unwrap();
        assert!(m.fit(&[1, 2], &[1]).is_err());
        assert!(m.fit(&[], &[]).is_err());
        assert!(m.fit(&[4], &[0]).is_err());
        assert!(CountModel::new(1).is_err());
    }
}
