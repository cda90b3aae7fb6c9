//! Potentials q(x) on the half line [a, ∞).

use crate::error::{invalid, Error, Result};

/// Interpolation rule between tabulated breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// Fritsch–Carlson monotone cubic Hermite interpolation (C¹).
    MonotoneCubic,
}

/// A tabulated potential. Beyond the last breakpoint the last value is held.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    tangents: Vec<f64>,
    interpolation: Interpolation,
}

impl PotentialTable {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return invalid("a tabulated potential needs at least two breakpoints");
        }
        if breakpoints.len() != values.len() {
            return invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        if breakpoints
            .iter()
            .chain(values.iter())
            .any(|v| !v.is_finite())
        {
            return invalid("tabulated potential contains non-finite entries");
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("breakpoints must be strictly increasing");
        }
        let tangents = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::MonotoneCubic => monotone_tangents(&breakpoints, &values),
        };
        Ok(Self {
            breakpoints,
            values,
            tangents,
            interpolation,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.breakpoints.len();
        if x >= self.breakpoints[n - 1] || x < self.breakpoints[0] {
            return None;
        }
        // index k with breakpoints[k] <= x < breakpoints[k+1]
        Some(self.breakpoints.partition_point(|&b| b <= x) - 1)
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        let Some(k) = self.locate(x) else {
            return if x < self.breakpoints[0] {
                self.values[0]
            } else {
                self.values[n - 1]
            };
        };
        let (x0, x1) = (self.breakpoints[k], self.breakpoints[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        match self.interpolation {
            Interpolation::Linear => y0 + t * (y1 - y0),
            Interpolation::MonotoneCubic => {
                let (m0, m1) = (self.tangents[k], self.tangents[k + 1]);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                    + (t3 - 2.0 * t2 + t) * h * m0
                    + (-2.0 * t3 + 3.0 * t2) * y1
                    + (t3 - t2) * h * m1
            }
        }
    }

    fn eval_derivative(&self, x: f64) -> Result<f64> {
        if self.interpolation == Interpolation::Linear {
            return Err(Error::DerivativeUnavailable("linearly interpolated tables"));
        }
        let Some(k) = self.locate(x) else {
            return Ok(0.0);
        };
        let (x0, x1) = (self.breakpoints[k], self.breakpoints[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.tangents[k], self.tangents[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        Ok(((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (3.0 * t2 - 2.0 * t) * m1)
    }
}

fn monotone_tangents(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// q(x) = (ν² − 1/4)/x², the Bessel class.
    InverseSquare {
        nu: f64,
    },
    Tabulated(PotentialTable),
}

/// A continuous potential on [a, ∞) together with its regular endpoint a.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    a: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return invalid("left endpoint must be finite");
        }
        match &kind {
            PotentialKind::Zero => {}
            PotentialKind::InverseSquare { nu } => {
                if !(nu.is_finite() && *nu >= 0.0) {
                    return invalid(format!("order nu must be finite and >= 0, got {nu}"));
                }
                if a <= 0.0 {
                    return invalid(format!("inverse-square potential needs a > 0, got {a}"));
                }
            }
            PotentialKind::Tabulated(table) => {
                if table.breakpoints[0] > a {
                    return invalid("first breakpoint must not exceed the left endpoint");
                }
            }
        }
        Ok(Self { kind, a })
    }

    pub fn zero(a: f64) -> Self {
        Self {
            kind: PotentialKind::Zero,
            a,
        }
    }

    pub fn inverse_square(nu: f64, a: f64) -> Result<Self> {
        Self::new(PotentialKind::InverseSquare { nu }, a)
    }

    pub fn tabulated(table: PotentialTable, a: f64) -> Result<Self> {
        Self::new(PotentialKind::Tabulated(table), a)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Regular left endpoint.
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::InverseSquare { nu } => (nu * nu - 0.25) / (x * x),
            PotentialKind::Tabulated(t) => t.eval(x),
        }
    }

    /// q′(x). Not available for linearly interpolated tables.
    pub fn dq(&self, x: f64) -> Result<f64> {
        match &self.kind {
            PotentialKind::Zero => Ok(0.0),
            PotentialKind::InverseSquare { nu } => Ok(-2.0 * (nu * nu - 0.25) / (x * x * x)),
            PotentialKind::Tabulated(t) => t.eval_derivative(x),
        }
    }

    /// Smallest x ≥ a past which |q| stays below `threshold`, when it can be
    /// determined. `None` means q does not decay below the threshold.
    pub fn decay_point(&self, threshold: f64) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(self.a),
            PotentialKind::InverseSquare { nu } => {
                let c = (nu * nu - 0.25).abs();
                Some(self.a.max((c / threshold).sqrt()))
            }
            PotentialKind::Tabulated(t) => {
                let n = t.breakpoints.len();
                if t.values[n - 1].abs() > threshold {
                    return None;
                }
                // scan the tail backwards for the last breakpoint interval above threshold
                let mut x = self.a;
                for k in (0..n - 1).rev() {
                    if t.values[k].abs() > threshold {
                        x = t.breakpoints[k + 1];
                        break;
                    }
                }
                Some(x.max(self.a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_half_is_free() {
        let p = Potential::inverse_square(0.5, 1.0).unwrap();
        assert_eq!(p.q(3.0), 0.0);
        assert_eq!(p.dq(3.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_square_rejects_origin() {
        assert!(Potential::inverse_square(0.0, 0.0).is_err());
        assert!(Potential::inverse_square(-1.0, 1.0).is_err());
    }

    #[test]
    fn table_validation() {
        let bad = PotentialTable::new(
            vec![0.0, 0.0, 1.0],
            vec![1.0, 2.0, 3.0],
            Interpolation::Linear,
        );
        assert!(bad.is_err());
        let t = PotentialTable::new(vec![1.0, 2.0], vec![0.0, 1.0], Interpolation::Linear).unwrap();
        assert!(Potential::tabulated(t, 0.5).is_err());
    }

    #[test]
    fn monotone_cubic_preserves_monotone_data() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.1, 2.0, 2.1];
        let t = PotentialTable::new(xs, ys, Interpolation::MonotoneCubic).unwrap();
        let p = Potential::tabulated(t, 0.0).unwrap();
        let mut prev = p.q(0.0);
        for i in 1..=400 {
            let x = i as f64 * 0.01;
            let v = p.q(x);
            assert!(v >= prev - 1e-15, "not monotone at {x}");
            prev = v;
        }
        assert_eq!(p.q(1.0), 0.1);
        assert_eq!(p.q(10.0), 2.1);
    }

    #[test]
    fn cubic_derivative_matches_finite_difference() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
        let t = PotentialTable::new(xs, ys, Interpolation::MonotoneCubic).unwrap();
        let p = Potential::tabulated(t, 0.0).unwrap();
        for &x in &[0.3, 1.1, 2.6] {
            let h = 1e-6;
            let fd = (p.q(x + h) - p.q(x - h)) / (2.0 * h);
            assert!((fd - p.dq(x).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn linear_table_has_no_derivative() {
        let t = PotentialTable::new(vec![0.0, 1.0], vec![1.0, 0.0], Interpolation::Linear).unwrap();
        let p = Potential::tabulated(t, 0.0).unwrap();
        assert_eq!(p.q(0.25), 0.75);
        assert!(matches!(p.dq(0.5), Err(Error::DerivativeUnavailable(_))));
    }

    #[test]
    fn decay_point_inverse_square() {
        let p = Potential::inverse_square(1.0, 1.0).unwrap();
        let x = p.decay_point(1e-4).unwrap();
        assert!((p.q(x).abs() - 1e-4).abs() < 1e-12);
    }
}
