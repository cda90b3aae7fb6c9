//! Subtended angles θ(S, z) = ∫_S Im(1/(t − z)) dt, value-distribution weights
//! ω = θ/π, and the ε-smoothing gap bound for Herglotz functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::appell::{connection_coefficients, density_from_coeffs, MatchPoints};
use crate::bessel::bessel_boundary_m;
use crate::error::{invalid, Error, Result};
use crate::grid::{check_interval, midpoints, GridFunction};
use crate::ode::IntegratorConfig;
use crate::potential::Potential;

/// A value that is either finite or a pole of a meromorphic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Meromorphic<T> {
    Finite(T),
    Pole,
}

impl<T: Copy> Meromorphic<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Meromorphic::Finite(v) => Some(v),
            Meromorphic::Pole => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, Meromorphic::Pole)
    }
}

/// Open interval (lo, hi); either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Endpoint,
}

/// Finite union of disjoint open intervals, sorted left to right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let intervals: Vec<Interval> = intervals
            .into_iter()
            .map(|(lo, hi)| Interval { lo, hi })
            .collect();
        for (i, iv) in intervals.iter().enumerate() {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo >= iv.hi {
                return invalid(format!(
                    "interval ({}, {}) is empty or malformed",
                    iv.lo, iv.hi
                ));
            }
            if iv.lo == f64::INFINITY || iv.hi == f64::NEG_INFINITY {
                return invalid("interval endpoints out of order");
            }
            if i > 0 && intervals[i - 1].hi > iv.lo {
                return invalid("intervals must be sorted and pairwise disjoint");
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn real_line() -> Self {
        Self {
            intervals: vec![Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }],
        }
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Self::new([(lo, hi)])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn membership(&self, x: f64) -> Membership {
        for iv in &self.intervals {
            if x == iv.lo || x == iv.hi {
                return Membership::Endpoint;
            }
            if x > iv.lo && x < iv.hi {
                return Membership::Inside;
            }
        }
        Membership::Outside
    }

    /// Open complement, dropping the finite endpoints.
    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = f64::NEG_INFINITY;
        for iv in &self.intervals {
            if iv.lo > cursor {
                out.push(Interval {
                    lo: cursor,
                    hi: iv.lo,
                });
            }
            cursor = iv.hi;
        }
        if cursor < f64::INFINITY {
            out.push(Interval {
                lo: cursor,
                hi: f64::INFINITY,
            });
        }
        Self { intervals: out }
    }

    /// Lebesgue measure (may be infinite).
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.hi - iv.lo).sum()
    }
}

/// Angle subtended by (lo, hi) at x + iy, y > 0.
#[inline]
fn interval_angle(lo: f64, hi: f64, x: f64, y: f64) -> f64 {
    (hi - x).atan2(y) - (lo - x).atan2(y)
}

/// θ(S, z) for Im z > 0, in [0, π].
pub fn angle(s: &IntervalUnion, z: Complex64) -> Result<f64> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return invalid(format!("angle needs finite z with Im z > 0, got {z}"));
    }
    let total: f64 = s
        .intervals
        .iter()
        .map(|iv| interval_angle(iv.lo, iv.hi, z.re, z.im))
        .sum();
    Ok(total.clamp(0.0, PI))
}

/// Real-axis limit of θ(S, ·): π inside S, 0 outside.
pub fn angle_boundary(s: &IntervalUnion, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return invalid(format!("boundary point must be finite, got {x}"));
    }
    match s.membership(x) {
        Membership::Inside => Ok(PI),
        Membership::Outside => Ok(0.0),
        Membership::Endpoint => Err(Error::EndpointIndeterminate { value: x }),
    }
}

/// ω = θ(S, value)/π for a value in the closed upper half-plane.
pub fn omega(s: &IntervalUnion, value: Complex64) -> Result<f64> {
    if value.im > 0.0 {
        Ok(angle(s, value)? / PI)
    } else if value.im == 0.0 {
        Ok(angle_boundary(s, value.re)? / PI)
    } else {
        invalid(format!("omega needs Im value >= 0, got {value}"))
    }
}

/// ω with endpoint hits and poles counted as excluded (weight 0).
pub fn omega_or_excluded(s: &IntervalUnion, value: Meromorphic<Complex64>) -> Result<f64> {
    match value {
        Meromorphic::Pole => Ok(0.0),
        Meromorphic::Finite(v) => match omega(s, v) {
            Err(Error::EndpointIndeterminate { .. }) => Ok(0.0),
            other => other,
        },
    }
}

/// A function analytic in the upper half-plane with nonnegative imaginary part.
pub trait HerglotzFunction: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
    /// Limit of `eval(λ + iε)` as ε ↓ 0.
    fn boundary(&self, lambda: f64) -> Result<Meromorphic<Complex64>>;
}

/// f(z) = αz + β + iγ + Σ w_k/(λ_k − z) with α, γ ≥ 0 and w_k > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalHerglotz {
    poles: Vec<(f64, f64)>,
    slope: f64,
    offset: f64,
    imag_offset: f64,
}

impl RationalHerglotz {
    pub fn new(poles: Vec<(f64, f64)>, slope: f64, offset: f64, imag_offset: f64) -> Result<Self> {
        if poles
            .iter()
            .any(|&(l, w)| !l.is_finite() || !(w > 0.0) || !w.is_finite())
        {
            return invalid("pole locations must be finite and weights positive");
        }
        if !(slope >= 0.0 && imag_offset >= 0.0) || !offset.is_finite() {
            return invalid("slope and imaginary offset must be nonnegative, offset finite");
        }
        Ok(Self {
            poles,
            slope,
            offset,
            imag_offset,
        })
    }

    /// 1/(λ₀ − z).
    pub fn single_pole(location: f64) -> Self {
        Self {
            poles: vec![(location, 1.0)],
            slope: 0.0,
            offset: 0.0,
            imag_offset: 0.0,
        }
    }

    /// The constant i·γ.
    pub fn constant_imag(gamma: f64) -> Result<Self> {
        Self::new(Vec::new(), 0.0, 0.0, gamma)
    }
}

impl HerglotzFunction for RationalHerglotz {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut f = Complex64::new(self.offset, self.imag_offset) + self.slope * z;
        for &(l, w) in &self.poles {
            f += w / (l - z);
        }
        Ok(f)
    }

    fn boundary(&self, lambda: f64) -> Result<Meromorphic<Complex64>> {
        let mut re = self.slope * lambda + self.offset;
        for &(l, w) in &self.poles {
            if l == lambda {
                return Ok(Meromorphic::Pole);
            }
            re += w / (l - lambda);
        }
        Ok(Meromorphic::Finite(Complex64::new(re, self.imag_offset)))
    }
}

/// Weyl function of the free half-line problem, m(z) = i√z.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeWeylM;

impl HerglotzFunction for FreeWeylM {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(Complex64::i() * z.sqrt())
    }

    fn boundary(&self, lambda: f64) -> Result<Meromorphic<Complex64>> {
        let v = if lambda >= 0.0 {
            Complex64::new(0.0, lambda.sqrt())
        } else {
            Complex64::new(-(-lambda).sqrt(), 0.0)
        };
        Ok(Meromorphic::Finite(v))
    }
}

/// Both sides of the ε-smoothing inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBound {
    pub eps: f64,
    /// |∫_Λ ω(λ, S, f⁺) − ∫_Λ ω(λ, S, f(λ + iε))|
    pub lhs: f64,
    /// (1/π) ∫_Λ θ(Λᶜ, λ + iε)
    pub rhs: f64,
}

impl GapBound {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// Midpoint-rule evaluation of the gap bound on `grid_n` points of Λ.
pub fn theorem1_gap(
    f: &dyn HerglotzFunction,
    s: &IntervalUnion,
    lambda: (f64, f64),
    eps: f64,
    grid_n: usize,
) -> Result<GapBound> {
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let (lo, hi) = lambda;
    check_interval(lo, hi)?;
    let grid = midpoints(lo, hi, grid_n)?;
    let h = (hi - lo) / grid_n as f64;
    let outside = IntervalUnion::single(lo, hi)?.complement();

    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&l| -> Result<(f64, f64, f64)> {
            let boundary = omega_or_excluded(s, f.boundary(l)?)?;
            let z = Complex64::new(l, eps);
            let smoothed = omega(s, f.eval(z)?)?;
            let tail = angle(&outside, z)? / PI;
            Ok((boundary, smoothed, tail))
        })
        .collect::<Result<_>>()?;

    let (mut b, mut sm, mut t) = (0.0, 0.0, 0.0);
    for (x, y, z) in rows {
        b += x;
        sm += y;
        t += z;
    }
    Ok(GapBound {
        eps,
        lhs: (h * (b - sm)).abs(),
        rhs: h * t,
    })
}

/// Where boundary values (A, B) of m⁺ come from.
#[derive(Debug, Clone)]
pub enum BoundarySource {
    /// A = 0, B = √λ.
    Free,
    Constant {
        m_re: f64,
        m_im: f64,
    },
    /// Closed form for q = (ν² − 1/4)/x² on [a, ∞).
    Bessel {
        nu: f64,
        a: f64,
    },
    /// Connection coefficients of the Appell system, per λ.
    Appell {
        potential: Potential,
        cfg: IntegratorConfig,
    },
    /// Linear interpolation of tabulated A and B.
    Grid {
        m_re: GridFunction,
        m_im: GridFunction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    AppellDerived,
    GridInterpolated,
}

/// Per-λ provider of m⁺(λ) = A(λ) + iB(λ) on an interval where B > 0.
#[derive(Debug, Clone)]
pub struct BoundaryM {
    source: BoundarySource,
    interval: (f64, f64),
}

impl BoundaryM {
    pub fn free() -> Self {
        Self {
            source: BoundarySource::Free,
            interval: (0.0, f64::INFINITY),
        }
    }

    pub fn constant(m_re: f64, m_im: f64) -> Result<Self> {
        if !(m_im > 0.0) || !m_re.is_finite() || !m_im.is_finite() {
            return invalid("constant model needs finite A and B > 0");
        }
        Ok(Self {
            source: BoundarySource::Constant { m_re, m_im },
            interval: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    pub fn bessel(nu: f64, a: f64) -> Result<Self> {
        // validates ν and a
        Potential::inverse_square(nu, a)?;
        Ok(Self {
            source: BoundarySource::Bessel { nu, a },
            interval: (0.0, f64::INFINITY),
        })
    }

    pub fn appell(potential: Potential, cfg: IntegratorConfig) -> Self {
        Self {
            source: BoundarySource::Appell { potential, cfg },
            interval: (0.0, f64::INFINITY),
        }
    }

    pub fn grid(m_re: GridFunction, m_im: GridFunction) -> Result<Self> {
        if m_re.interval() != m_im.interval() {
            return invalid("A and B grids must cover the same interval");
        }
        let interval = m_re.interval();
        Ok(Self {
            source: BoundarySource::Grid { m_re, m_im },
            interval,
        })
    }

    pub fn source(&self) -> &BoundarySource {
        &self.source
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn provenance(&self) -> Provenance {
        match self.source {
            BoundarySource::Free
            | BoundarySource::Constant { .. }
            | BoundarySource::Bessel { .. } => Provenance::ClosedForm,
            BoundarySource::Appell { .. } => Provenance::AppellDerived,
            BoundarySource::Grid { .. } => Provenance::GridInterpolated,
        }
    }

    /// (A(λ), B(λ)); errors outside the declared interval or where B ≤ 0.
    pub fn eval(&self, lambda: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.interval;
        let inside = match self.source {
            BoundarySource::Grid { .. } => lambda >= lo && lambda <= hi,
            _ => lambda > lo && lambda < hi,
        };
        if !inside {
            return invalid(format!("boundary model undefined at lambda = {lambda}"));
        }
        let (a, b) = match &self.source {
            BoundarySource::Free => (0.0, lambda.sqrt()),
            BoundarySource::Constant { m_re, m_im } => (*m_re, *m_im),
            BoundarySource::Bessel { nu, a } => bessel_boundary_m(*nu, *a, lambda)?,
            BoundarySource::Appell { potential, cfg } => {
                let conn = connection_coefficients(potential, lambda, &MatchPoints::Auto, cfg)?;
                let d = density_from_coeffs(&conn.coeffs)?;
                (d.m_re, d.m_im)
            }
            BoundarySource::Grid { m_re, m_im } => {
                (m_re.interpolate(lambda), m_im.interpolate(lambda))
            }
        };
        if !(b > 0.0) {
            return invalid(format!(
                "B(lambda) = {b} is not positive at lambda = {lambda}"
            ));
        }
        Ok((a, b))
    }

    /// Evaluate at many points; order of results follows `lambdas`.
    pub fn sample(&self, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
        lambdas.par_iter().map(|&l| self.eval(l)).collect()
    }

    /// Tabulate onto a midpoint grid of [lo, hi] and return a grid-backed model.
    pub fn tabulate(&self, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let grid = midpoints(lo, hi, n)?;
        let values = self.sample(&grid)?;
        let re = GridFunction::new(lo, hi, grid.clone(), values.iter().map(|v| v.0).collect())?;
        let im = GridFunction::new(lo, hi, grid, values.iter().map(|v| v.1).collect())?;
        Self::grid(re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn angle_examples() {
        let s = IntervalUnion::single(-1.0, 1.0).unwrap();
        assert!((angle(&s, c(0.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        let full = IntervalUnion::real_line();
        assert_eq!(angle(&full, c(3.0, 0.2)).unwrap(), PI);
        let s = IntervalUnion::single(0.0, 2.0).unwrap();
        assert!((angle(&s, c(1.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(angle(&s, c(1.0, 0.0)).is_err());
        assert!(angle(&s, c(1.0, -1.0)).is_err());
    }

    #[test]
    fn boundary_examples() {
        let s = IntervalUnion::single(0.0, 2.0).unwrap();
        assert_eq!(angle_boundary(&s, 1.0).unwrap(), PI);
        assert_eq!(angle_boundary(&s, 3.0).unwrap(), 0.0);
        assert!(matches!(
            angle_boundary(&s, 2.0),
            Err(Error::EndpointIndeterminate { .. })
        ));
        let s2 = IntervalUnion::new([(0.0, 2.0), (5.0, 6.0)]).unwrap();
        assert_eq!(angle_boundary(&s2, 5.5).unwrap(), PI);
    }

    #[test]
    fn omega_examples() {
        let half_line = IntervalUnion::single(0.0, f64::INFINITY).unwrap();
        assert!((omega(&half_line, c(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        let s = IntervalUnion::single(-1.0, 1.0).unwrap();
        assert!((omega(&s, c(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        let s = IntervalUnion::single(0.0, 2.0).unwrap();
        assert_eq!(omega(&s, c(1.0, 0.0)).unwrap(), 1.0);
        assert!(omega(&s, c(1.0, -0.5)).is_err());
    }

    #[test]
    fn union_validation_and_complement() {
        assert!(IntervalUnion::new([(1.0, 0.0)]).is_err());
        assert!(IntervalUnion::new([(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(IntervalUnion::new([(2.0, 3.0), (0.0, 1.0)]).is_err());
        let s = IntervalUnion::new([(0.0, 1.0), (1.0, 3.0)]).unwrap();
        assert_eq!(s.membership(1.0), Membership::Endpoint);
        let comp = IntervalUnion::single(-1.0, 3.0).unwrap().complement();
        assert_eq!(comp.intervals().len(), 2);
        assert_eq!(comp.intervals()[0].hi, -1.0);
        assert_eq!(comp.intervals()[1].lo, 3.0);
        assert!(IntervalUnion::real_line().complement().is_empty());
    }

    #[test]
    fn gap_trivial_cases() {
        let f = RationalHerglotz::single_pole(1.0);
        let g = theorem1_gap(&f, &IntervalUnion::empty(), (-1.0, 3.0), 0.1, 1000).unwrap();
        assert_eq!(g.lhs, 0.0);
        assert!(g.rhs > 0.0);
        let konst = RationalHerglotz::constant_imag(1.0).unwrap();
        let s = IntervalUnion::single(-0.3, 2.0).unwrap();
        let g = theorem1_gap(&konst, &s, (0.0, 1.0), 0.5, 100).unwrap();
        assert!(g.lhs < 1e-15);
        assert!(theorem1_gap(&f, &s, (0.0, 1.0), 0.0, 100).is_err());
        assert!(theorem1_gap(&f, &s, (0.0, f64::INFINITY), 0.1, 100).is_err());
    }

    #[test]
    fn rational_boundary_pole() {
        let f = RationalHerglotz::single_pole(1.0);
        assert!(f.boundary(1.0).unwrap().is_pole());
        assert_eq!(f.boundary(0.5).unwrap(), Meromorphic::Finite(c(2.0, 0.0)));
        assert!(RationalHerglotz::new(vec![(0.0, -1.0)], 0.0, 0.0, 0.0).is_err());
        assert!(RationalHerglotz::new(vec![], -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn boundary_models() {
        let m = BoundaryM::free();
        assert_eq!(m.eval(4.0).unwrap(), (0.0, 2.0));
        assert!(m.eval(-1.0).is_err());
        assert_eq!(m.provenance(), Provenance::ClosedForm);
        let b = BoundaryM::bessel(0.5, 1.0).unwrap();
        let (a, bb) = b.eval(4.0).unwrap();
        assert!(a.abs() < 1e-14 && (bb - 2.0).abs() < 1e-13);
        let g = m.tabulate(1.0, 4.0, 301).unwrap();
        assert_eq!(g.provenance(), Provenance::GridInterpolated);
        assert!((g.eval(2.25).unwrap().1 - 1.5).abs() < 1e-4);
        assert!(g.eval(5.0).is_err());
    }
}
