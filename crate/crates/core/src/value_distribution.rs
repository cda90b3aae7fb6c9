//! Truncated boundary functions F(x, λ) = −u/v, preimage measures of target
//! sets, the phase θ̃₀ reduced mod π, and the Condition A ratio.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_interval, midpoints, GridFunction};
use crate::herglotz::{
    omega_or_excluded, BoundaryM, HerglotzFunction, IntervalUnion, Membership, Meromorphic,
};
use crate::ode::{
    accumulate_theta0_many, propagate_fundamental_complex, propagate_fundamental_many,
    quadratic_integrals_many, IntegratorConfig, SchrodingerState,
};
use crate::potential::Potential;

/// |v| < POLE_TOL·(|u| + |v|) marks F(x, λ) as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Default x schedule for convergence tables.
pub const DEFAULT_X_LIST: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];

fn f_from_state(s: &SchrodingerState<f64>) -> Meromorphic<f64> {
    if s.v.abs() < POLE_TOL * (s.u.abs() + s.v.abs()) {
        Meromorphic::Pole
    } else {
        Meromorphic::Finite(-s.u / s.v)
    }
}

fn check_x(p: &Potential, x: f64) -> Result<()> {
    if !(x > p.a()) || !x.is_finite() {
        return invalid(format!("x = {x} must be finite and beyond a = {}", p.a()));
    }
    Ok(())
}

/// F(x, λ) = −u(x, λ)/v(x, λ).
pub fn big_f(
    p: &Potential,
    x: f64,
    lambda: f64,
    cfg: &IntegratorConfig,
) -> Result<Meromorphic<f64>> {
    check_x(p, x)?;
    let s = propagate_fundamental_many(p, lambda, &[x], cfg)?;
    Ok(f_from_state(&s[0]))
}

/// m_b(z) = −u(b, z)/v(b, z) for Im z ≥ 0; real z goes through [`big_f`].
pub fn m_truncated(
    p: &Potential,
    b: f64,
    z: Complex64,
    cfg: &IntegratorConfig,
) -> Result<Meromorphic<Complex64>> {
    check_x(p, b)?;
    if z.im < 0.0 || z.im.is_nan() {
        return invalid(format!("m_truncated needs Im z >= 0, got {z}"));
    }
    if z.im == 0.0 {
        return Ok(match big_f(p, b, z.re, cfg)? {
            Meromorphic::Finite(f) => Meromorphic::Finite(Complex64::new(f, 0.0)),
            Meromorphic::Pole => Meromorphic::Pole,
        });
    }
    let s = propagate_fundamental_complex(p, z, b, cfg)?;
    if s.v.norm() < POLE_TOL * (s.u.norm() + s.v.norm()) {
        return Ok(Meromorphic::Pole);
    }
    Ok(Meromorphic::Finite(-s.u / s.v))
}

/// m_b as a Herglotz function of z, with boundary values from a model of m⁺.
#[derive(Debug, Clone)]
pub struct TruncatedWeylM {
    pub potential: Potential,
    pub b: f64,
    pub model: BoundaryM,
    pub cfg: IntegratorConfig,
}

impl HerglotzFunction for TruncatedWeylM {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        m_truncated(&self.potential, self.b, z, &self.cfg)?
            .finite()
            .ok_or_else(|| Error::MatchingFailed(format!("m_b has a pole at {z}")))
    }

    fn boundary(&self, lambda: f64) -> Result<Meromorphic<Complex64>> {
        let (a, b) = self.model.eval(lambda)?;
        Ok(Meromorphic::Finite(Complex64::new(a, b)))
    }
}

/// A real function of λ: constant, right-open step function, or grid samples.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaFn {
    Constant(f64),
    /// `values[k]` applies where exactly k breaks lie strictly below λ.
    Step {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    Sampled(GridFunction),
}

impl LambdaFn {
    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return invalid("a step function needs one more value than breaks");
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return invalid("step breaks must be finite and strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("step values must be finite");
        }
        Ok(LambdaFn::Step { breaks, values })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            LambdaFn::Constant(c) => *c,
            LambdaFn::Step { breaks, values } => values[breaks.partition_point(|&b| b < lambda)],
            LambdaFn::Sampled(g) => g.interpolate(lambda),
        }
    }
}

/// S_λ = (α(λ), β(λ)).
#[derive(Debug, Clone, PartialEq)]
pub struct MovingTarget {
    pub alpha: LambdaFn,
    pub beta: LambdaFn,
}

/// Target set for F(x, λ): one set for all λ, or an interval moving with λ.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Fixed(IntervalUnion),
    Moving(MovingTarget),
}

impl Target {
    pub fn at(&self, lambda: f64) -> Result<IntervalUnion> {
        match self {
            Target::Fixed(s) => Ok(s.clone()),
            Target::Moving(m) => {
                let (lo, hi) = (m.alpha.eval(lambda), m.beta.eval(lambda));
                if !(lo.is_finite() && hi.is_finite()) {
                    return invalid(format!(
                        "moving target must be bounded, got ({lo}, {hi}) at {lambda}"
                    ));
                }
                IntervalUnion::single(lo, hi)
            }
        }
    }
}

/// Band C(λ) < θ̃₀ < D(λ) with 0 ≤ C < D ≤ π.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    pub c: LambdaFn,
    pub d: LambdaFn,
}

impl BandSpec {
    pub fn constant(c: f64, d: f64) -> Self {
        Self {
            c: LambdaFn::Constant(c),
            d: LambdaFn::Constant(d),
        }
    }

    pub fn at(&self, lambda: f64) -> Result<(f64, f64)> {
        let (c, d) = (self.c.eval(lambda), self.d.eval(lambda));
        if !(0.0 <= c && c < d && d <= PI) {
            return invalid(format!(
                "band needs 0 <= C < D <= pi, got C = {c}, D = {d} at lambda = {lambda}"
            ));
        }
        Ok((c, d))
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub x: f64,
    pub empirical: f64,
    pub limit: f64,
    pub error: f64,
}

fn sorted_x_list(p: &Potential, x_list: &[f64]) -> Result<Vec<f64>> {
    if x_list.is_empty() {
        return invalid("x_list is empty");
    }
    let mut xs = x_list.to_vec();
    xs.sort_by(f64::total_cmp);
    for &x in &xs {
        check_x(p, x)?;
    }
    Ok(xs)
}

fn midpoint_grid(lambda: (f64, f64), grid_n: usize) -> Result<(Vec<f64>, f64)> {
    let (lo, hi) = lambda;
    check_interval(lo, hi)?;
    Ok((midpoints(lo, hi, grid_n)?, (hi - lo) / grid_n as f64))
}

/// Per-λ values at each x, kept in grid order so counts never depend on scheduling.
fn sweep<T: Send>(
    grid: &[f64],
    per_lambda: impl Fn(f64) -> Result<Vec<T>> + Sync,
) -> Result<Vec<Vec<T>>> {
    // report the first failure in grid order, whatever order the workers finish in
    let results: Vec<Result<Vec<T>>> = grid
        .par_iter()
        .map(|&l| per_lambda(l).map_err(|e| e.at_lambda(l)))
        .collect();
    results.into_iter().collect()
}

fn count_rows<T>(
    grid: &[f64],
    h: f64,
    xs: &[f64],
    values: &[Vec<T>],
    hit: impl Fn(f64, &T) -> Result<bool>,
) -> Result<Vec<(f64, f64)>> {
    let mut counts = vec![0u64; xs.len()];
    for (&l, row) in grid.iter().zip(values) {
        for (c, v) in counts.iter_mut().zip(row) {
            *c += hit(l, v)? as u64;
        }
    }
    Ok(xs
        .iter()
        .zip(counts)
        .map(|(&x, c)| (x, h * c as f64))
        .collect())
}

/// F(x, λ) on a midpoint λ-grid for each x in an ascending schedule.
#[derive(Debug, Clone)]
pub struct FSweep {
    pub lambda: (f64, f64),
    pub grid: Vec<f64>,
    pub xs: Vec<f64>,
    /// `values[i][k]` = F(xs[k], grid[i]).
    pub values: Vec<Vec<Meromorphic<f64>>>,
}

pub fn f_sweep(
    p: &Potential,
    x_list: &[f64],
    lambda: (f64, f64),
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<FSweep> {
    let (grid, _) = midpoint_grid(lambda, grid_n)?;
    let xs = sorted_x_list(p, x_list)?;
    let values = sweep(&grid, |l| {
        Ok(propagate_fundamental_many(p, l, &xs, cfg)?
            .iter()
            .map(f_from_state)
            .collect())
    })?;
    Ok(FSweep {
        lambda,
        grid,
        xs,
        values,
    })
}

impl FSweep {
    fn step(&self) -> f64 {
        (self.lambda.1 - self.lambda.0) / self.grid.len() as f64
    }

    /// (x, μ(Λ ∩ F_x⁻¹(S))) per x; poles count as outside S.
    pub fn measures(&self, target: &Target) -> Result<Vec<(f64, f64)>> {
        count_rows(
            &self.grid,
            self.step(),
            &self.xs,
            &self.values,
            |l, f| match f {
                Meromorphic::Finite(f) => Ok(target.at(l)?.membership(*f) == Membership::Inside),
                Meromorphic::Pole => Ok(false),
            },
        )
    }

    pub fn table(&self, model: &BoundaryM, target: &Target) -> Result<Vec<TableRow>> {
        let limit = theorem2_limit(model, target, self.lambda, self.grid.len())?;
        Ok(rows(self.measures(target)?, limit))
    }
}

fn rows(measures: Vec<(f64, f64)>, limit: f64) -> Vec<TableRow> {
    measures
        .into_iter()
        .map(|(x, empirical)| TableRow {
            x,
            empirical,
            limit,
            error: (empirical - limit).abs(),
        })
        .collect()
}

/// Midpoint estimates of μ(Λ ∩ F_x⁻¹(S)) for each x in `x_list` (returned in ascending x).
pub fn preimage_measures(
    p: &Potential,
    x_list: &[f64],
    lambda: (f64, f64),
    target: &Target,
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    f_sweep(p, x_list, lambda, grid_n, cfg)?.measures(target)
}

pub fn preimage_measure(
    p: &Potential,
    x: f64,
    lambda: (f64, f64),
    target: &Target,
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    Ok(preimage_measures(p, &[x], lambda, target, grid_n, cfg)?[0].1)
}

/// Midpoint quadrature of ∫_Λ ω(λ, S_λ, m⁺(λ)) dλ.
pub fn theorem2_limit(
    model: &BoundaryM,
    target: &Target,
    lambda: (f64, f64),
    grid_n: usize,
) -> Result<f64> {
    let (grid, h) = midpoint_grid(lambda, grid_n)?;
    let weights: Vec<f64> = grid
        .par_iter()
        .map(|&l| {
            let (a, b) = model.eval(l)?;
            omega_or_excluded(&target.at(l)?, Meromorphic::Finite(Complex64::new(a, b)))
        })
        .collect::<Result<_>>()?;
    Ok(h * weights.iter().sum::<f64>())
}

/// Empirical preimage measure against its limit, one row per x (ascending).
pub fn theorem2_table(
    p: &Potential,
    model: &BoundaryM,
    target: &Target,
    lambda: (f64, f64),
    x_list: &[f64],
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<TableRow>> {
    f_sweep(p, x_list, lambda, grid_n, cfg)?.table(model, target)
}

fn reduce_mod_pi(theta: f64) -> f64 {
    let r = theta - (theta / PI).floor() * PI;
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// θ̃₀(x, λ) for each x (ascending input required), from m⁺(λ) given by `model`.
pub fn theta0_mod_pi_many(
    p: &Potential,
    lambda: f64,
    model: &BoundaryM,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let (a, b) = model.eval(lambda)?;
    let raw = accumulate_theta0_many(p, lambda, a, b, xs, cfg)?;
    Ok(raw.into_iter().map(reduce_mod_pi).collect())
}

pub fn theta0_mod_pi(
    p: &Potential,
    lambda: f64,
    model: &BoundaryM,
    x: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    Ok(theta0_mod_pi_many(p, lambda, model, &[x], cfg)?[0])
}

/// (1/π) ∫_Λ (D − C) dλ by the midpoint rule.
pub fn band_limit(band: &BandSpec, lambda: (f64, f64), grid_n: usize) -> Result<f64> {
    let (grid, h) = midpoint_grid(lambda, grid_n)?;
    let mut total = 0.0;
    for &l in &grid {
        let (c, d) = band.at(l)?;
        total += d - c;
    }
    Ok(h * total / PI)
}

/// θ̃₀(x, λ) on a midpoint λ-grid for each x in an ascending schedule.
#[derive(Debug, Clone)]
pub struct Theta0Sweep {
    pub lambda: (f64, f64),
    pub grid: Vec<f64>,
    pub xs: Vec<f64>,
    /// `values[i][k]` = θ̃₀(xs[k], grid[i]).
    pub values: Vec<Vec<f64>>,
}

pub fn theta0_sweep(
    p: &Potential,
    model: &BoundaryM,
    lambda: (f64, f64),
    x_list: &[f64],
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<Theta0Sweep> {
    let (grid, _) = midpoint_grid(lambda, grid_n)?;
    let xs = sorted_x_list(p, x_list)?;
    let values = sweep(&grid, |l| theta0_mod_pi_many(p, l, model, &xs, cfg))?;
    Ok(Theta0Sweep {
        lambda,
        grid,
        xs,
        values,
    })
}

impl Theta0Sweep {
    /// Empirical measure of {C < θ̃₀ < D} against (1/π)∫(D − C), one row per x.
    pub fn band_table(&self, band: &BandSpec) -> Result<Vec<TableRow>> {
        let h = (self.lambda.1 - self.lambda.0) / self.grid.len() as f64;
        let limit = band_limit(band, self.lambda, self.grid.len())?;
        let measures = count_rows(&self.grid, h, &self.xs, &self.values, |l, t| {
            let (c, d) = band.at(l)?;
            Ok(c < *t && *t < d)
        })?;
        Ok(rows(measures, limit))
    }
}

/// Measure of {λ ∈ Λ : C(λ) < θ̃₀(x, λ) < D(λ)} against (1/π)∫(D − C), one row per x.
pub fn uad_check(
    p: &Potential,
    model: &BoundaryM,
    lambda: (f64, f64),
    band: &BandSpec,
    x_list: &[f64],
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<TableRow>> {
    // reject a bad band before the expensive sweep
    band_limit(band, lambda, grid_n)?;
    theta0_sweep(p, model, lambda, x_list, grid_n, cfg)?.band_table(band)
}

/// ∫ₐᴺ y² / ∫ₐᴺ |y|² for y = u + M v.
pub fn condition_a_ratio(
    p: &Potential,
    lambda: f64,
    m: Complex64,
    n: f64,
    cfg: &IntegratorConfig,
) -> Result<Complex64> {
    Ok(condition_a_ratios(p, lambda, m, &[n], cfg)?[0])
}

/// Condition A ratio at each N (ascending input required).
pub fn condition_a_ratios(
    p: &Potential,
    lambda: f64,
    m: Complex64,
    ns: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Complex64>> {
    if !(m.im > 0.0) || !m.re.is_finite() || !m.im.is_finite() {
        return invalid(format!("Condition A needs Im M > 0, got {m}"));
    }
    for &n in ns {
        check_x(p, n)?;
    }
    let ints = quadratic_integrals_many(p, lambda, ns, cfg)?;
    Ok(ints
        .iter()
        .map(|q| {
            let sq = q.uu + 2.0 * m * q.uv + m * m * q.vv;
            let abs_sq = q.uu + 2.0 * m.re * q.uv + m.norm_sqr() * q.vv;
            sq / abs_sq
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn big_f_free_examples() {
        let p = Potential::zero(0.0);
        let f = big_f(&p, PI / 4.0, 1.0, &cfg()).unwrap().finite().unwrap();
        assert!((f + 1.0).abs() < 1e-9);
        let f = big_f(&p, PI / 2.0, 1.0, &cfg()).unwrap().finite().unwrap();
        assert!(f.abs() < 1e-9);
        assert!(big_f(&p, 0.0, 1.0, &cfg()).is_err());
    }

    #[test]
    fn pole_detection() {
        let s = SchrodingerState {
            x: 1.0,
            u: -1.0,
            uprime: 0.0,
            v: 1e-13,
            vprime: -1.0,
        };
        assert!(f_from_state(&s).is_pole());
    }

    #[test]
    fn m_truncated_real_matches_big_f() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let m = m_truncated(&p, 3.0, Complex64::new(2.0, 0.0), &cfg())
            .unwrap()
            .finite()
            .unwrap();
        let f = big_f(&p, 3.0, 2.0, &cfg()).unwrap().finite().unwrap();
        assert_eq!(m.re, f);
        assert!(m_truncated(&p, 3.0, Complex64::new(2.0, -0.1), &cfg()).is_err());
    }

    #[test]
    fn m_truncated_approaches_free_m() {
        let p = Potential::zero(0.0);
        let z = Complex64::new(1.0, 0.1);
        let m = m_truncated(&p, 200.0, z, &cfg()).unwrap().finite().unwrap();
        assert!((m - Complex64::i() * z.sqrt()).norm() < 1e-3);
    }

    #[test]
    fn step_function_indexing() {
        let s = LambdaFn::step(vec![2.5], vec![PI / 2.0, PI]).unwrap();
        assert_eq!(s.eval(2.0), PI / 2.0);
        assert_eq!(s.eval(2.5), PI / 2.0);
        assert_eq!(s.eval(3.0), PI);
        assert!(LambdaFn::step(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn band_validation() {
        assert!(BandSpec::constant(1.0, 0.5).at(0.0).is_err());
        assert!(BandSpec::constant(0.0, 4.0).at(0.0).is_err());
        let b = BandSpec {
            c: LambdaFn::Constant(0.0),
            d: LambdaFn::step(vec![2.5], vec![PI / 2.0, PI]).unwrap(),
        };
        assert!((band_limit(&b, (1.0, 4.0), 1000).unwrap() - 2.25).abs() < 1e-12);
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_mod_pi(2.0), 2.0);
        assert!((reduce_mod_pi(4.0) - (4.0 - PI)).abs() < 1e-15);
        assert_eq!(reduce_mod_pi(0.0), 0.0);
        assert!(reduce_mod_pi(-1e-300) < PI);
    }

    #[test]
    fn theta0_free_examples() {
        let p = Potential::zero(0.0);
        let m = BoundaryM::free();
        assert!((theta0_mod_pi(&p, 4.0, &m, 1.0, &cfg()).unwrap() - 2.0).abs() < 1e-9);
        assert!((theta0_mod_pi(&p, 16.0, &m, 1.0, &cfg()).unwrap() - (4.0 - PI)).abs() < 1e-9);
        assert_eq!(theta0_mod_pi(&p, 4.0, &m, 0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn full_and_empty_targets() {
        let p = Potential::zero(0.0);
        let full = Target::Fixed(IntervalUnion::real_line());
        let m = preimage_measure(&p, 7.0, (1.0, 4.0), &full, 200, &cfg()).unwrap();
        assert!((m - 3.0).abs() < 1e-12);
        let none = Target::Fixed(IntervalUnion::empty());
        assert_eq!(
            preimage_measure(&p, 7.0, (1.0, 4.0), &none, 200, &cfg()).unwrap(),
            0.0
        );
    }

    #[test]
    fn theorem2_free_limit() {
        let s = Target::Fixed(IntervalUnion::single(0.0, f64::INFINITY).unwrap());
        let l = theorem2_limit(&BoundaryM::free(), &s, (1.0, 4.0), 1000).unwrap();
        assert!((l - 1.5).abs() < 1e-12);
    }

    #[test]
    fn condition_a_free() {
        let p = Potential::zero(0.0);
        let r = condition_a_ratio(&p, 1.0, Complex64::i(), 100.0, &cfg()).unwrap();
        assert!(r.norm() <= 0.01);
        let r = condition_a_ratio(&p, 1.0, Complex64::i(), 1e-3, &cfg()).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-5);
        assert!(condition_a_ratio(&p, 1.0, Complex64::new(1.0, 0.0), 10.0, &cfg()).is_err());
    }
}
