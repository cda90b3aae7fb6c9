//! Uniform midpoint grids over a bounded λ-interval and functions sampled on them.

use crate::error::{invalid, Result};

/// Validated bounded interval Λ = [lo, hi].
pub fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return invalid(format!("interval [{lo}, {hi}] must be bounded"));
    }
    if lo >= hi {
        return invalid(format!("interval [{lo}, {hi}] is empty"));
    }
    Ok(())
}

/// Midpoints λ_i = lo + (i + ½)h, h = (hi − lo)/n.
pub fn midpoints(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_interval(lo, hi)?;
    if n < 2 {
        return invalid(format!("grid needs at least 2 points, got {n}"));
    }
    let h = (hi - lo) / n as f64;
    Ok((0..n).map(|i| lo + (i as f64 + 0.5) * h).collect())
}

/// A λ-grid with one value per point, spanning the interval [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    lambda_grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, lambda_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_interval(lo, hi)?;
        if lambda_grid.is_empty() || lambda_grid.len() != values.len() {
            return invalid("grid and values must be nonempty and of equal length");
        }
        if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("lambda grid must be strictly increasing");
        }
        if lambda_grid[0] < lo || lambda_grid[lambda_grid.len() - 1] > hi {
            return invalid("lambda grid leaves its interval");
        }
        Ok(Self {
            lo,
            hi,
            lambda_grid,
            values,
        })
    }

    /// Sample `f` at the midpoints of an n-cell uniform partition of [lo, hi].
    pub fn sample_midpoint(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = midpoints(lo, hi, n)?;
        let values = grid.iter().map(|&l| f(l)).collect();
        Ok(Self {
            lo,
            hi,
            lambda_grid: grid,
            values,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn lambda_grid(&self) -> &[f64] {
        &self.lambda_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cell width of each point: the part of [lo, hi] closer to it than to
    /// its neighbours. Equals h everywhere on a midpoint grid.
    pub fn cell_widths(&self) -> Vec<f64> {
        let g = &self.lambda_grid;
        let n = g.len();
        (0..n)
            .map(|i| {
                let left = if i == 0 {
                    self.lo
                } else {
                    0.5 * (g[i - 1] + g[i])
                };
                let right = if i + 1 == n {
                    self.hi
                } else {
                    0.5 * (g[i] + g[i + 1])
                };
                right - left
            })
            .collect()
    }

    /// ∫_Λ by the cell-weighted (midpoint) rule.
    pub fn integral(&self) -> f64 {
        self.cell_widths()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Piecewise-linear interpolation, constant beyond the first/last point.
    pub fn interpolate(&self, lambda: f64) -> f64 {
        let g = &self.lambda_grid;
        let n = g.len();
        if lambda <= g[0] {
            return self.values[0];
        }
        if lambda >= g[n - 1] {
            return self.values[n - 1];
        }
        let k = g.partition_point(|&x| x <= lambda) - 1;
        let t = (lambda - g[k]) / (g[k + 1] - g[k]);
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_integral_of_linear_is_exact() {
        let g = GridFunction::sample_midpoint(1.0, 4.0, 7, |l| 2.0 * l + 1.0).unwrap();
        assert!((g.integral() - 18.0).abs() < 1e-13);
        assert!(g
            .cell_widths()
            .iter()
            .all(|w| (w - 3.0 / 7.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(midpoints(1.0, 1.0, 10).is_err());
        assert!(midpoints(0.0, f64::INFINITY, 10).is_err());
        assert!(midpoints(0.0, 1.0, 1).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.5, 0.2], vec![1.0, 1.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn interpolation() {
        let g = GridFunction::new(0.0, 3.0, vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.interpolate(0.5), 1.0);
        assert_eq!(g.interpolate(2.0), 1.0);
        assert_eq!(g.interpolate(-1.0), 0.0);
        assert!((g.integral() - (0.5 * 0.0 + 1.5 * 2.0 + 1.0 * 0.0)).abs() < 1e-15);
    }
}
