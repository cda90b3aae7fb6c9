//! Quadratic forms R = a·u² + b·uv + c·v² of Schrödinger solutions, the
//! indefinite inner product on Appell triples, connection coefficients by
//! matching at large x, and the spectral density derived from them.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::ode::engine::{continue_fundamental, continue_fundamental_forward};
use crate::ode::{propagate_fundamental_many, AppellFrame, AppellVector, IntegratorConfig};
use crate::potential::Potential;

/// Threshold on |q(X)|/λ enforced at caller-supplied match points.
pub const MATCH_GATE: f64 = 1e-3;
/// Threshold on |q(X)|/λ used to place the default match points.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 1e-4;
/// Relative error estimate above which a result is flagged low-confidence.
pub const LOW_CONFIDENCE: f64 = 1e-4;

/// Coefficients of R = a·u² + b·uv + c·v².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FormCoefficients {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// 4ac − b², equal to 4 for normalized forms.
    pub fn discriminant(&self) -> f64 {
        4.0 * self.a * self.c - self.b * self.b
    }

    /// R at a point of the fundamental system.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.a * u * u + self.b * u * v + self.c * v * v
    }
}

pub fn inner_product(x: &AppellVector, y: &AppellVector) -> f64 {
    x.inner(y)
}

/// 2(a₁c₂ + c₁a₂) − b₁b₂.
pub fn inner_product_coeffs(f1: &FormCoefficients, f2: &FormCoefficients) -> f64 {
    2.0 * (f1.a * f2.c + f1.c * f2.a) - f1.b * f2.b
}

/// Coefficients of |u + m v|²/Im m for m = A + iB.
pub fn r0_coefficients(m_re: f64, m_im: f64) -> Result<FormCoefficients> {
    if !(m_im > 0.0) || !m_re.is_finite() || !m_im.is_finite() {
        return invalid(format!(
            "need finite A and B > 0, got A = {m_re}, B = {m_im}"
        ));
    }
    Ok(FormCoefficients::new(
        1.0 / m_im,
        2.0 * m_re / m_im,
        (m_re * m_re + m_im * m_im) / m_im,
    ))
}

/// Density f and boundary value m⁺ = A + iB read off a connection form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub f: f64,
    pub m_re: f64,
    pub m_im: f64,
}

pub fn density_from_coeffs(coeffs: &FormCoefficients) -> Result<SpectralDensity> {
    let a = coeffs.a;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::MatchingFailed(format!(
            "connection coefficient a = {a} is not positive"
        )));
    }
    Ok(SpectralDensity {
        f: 1.0 / (PI * a),
        m_re: coeffs.b / (2.0 * a),
        m_im: 1.0 / a,
    })
}

/// How to place the matching points.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchPoints {
    /// {X, 2X, 4X} with X the decay point of q at threshold 1e−4·λ.
    Auto,
    /// Caller-chosen points, each gated at |q| ≤ 1e−3·λ.
    Explicit(Vec<f64>),
}

/// Connection coefficients with their per-point estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResult {
    pub lambda: f64,
    pub coeffs: FormCoefficients,
    pub match_points: Vec<f64>,
    pub per_point: Vec<FormCoefficients>,
    /// Relative gap between the extrapolated value and the farthest estimate.
    pub error_estimate: f64,
    pub low_confidence: bool,
}

fn default_match_points(p: &Potential, lambda: f64) -> Result<Vec<f64>> {
    let x0 = p
        .decay_point(DEFAULT_MATCH_THRESHOLD * lambda)
        .ok_or_else(|| {
            Error::MatchingFailed("potential does not decay below the matching threshold".into())
        })?;
    let x0 = x0.max(p.a() + 10.0);
    Ok(vec![x0, 2.0 * x0, 4.0 * x0])
}

fn check_match_points(p: &Potential, lambda: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return invalid("at least one match point is required");
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &x in &sorted {
        if !x.is_finite() || x <= p.a() {
            return invalid(format!(
                "match point {x} must be finite and beyond a = {}",
                p.a()
            ));
        }
        if p.q(x).abs() > MATCH_GATE * lambda {
            return Err(Error::MatchingFailed(format!(
                "match point {x} lies inside the decay region: |q| = {:e} > {:e}",
                p.q(x).abs(),
                MATCH_GATE * lambda
            )));
        }
    }
    Ok(sorted)
}

/// q′ for the WKB target; piecewise-linear tables fall back to a centred difference.
fn slope_of_q(p: &Potential, x: f64) -> f64 {
    match p.dq(x) {
        Ok(d) => d,
        Err(_) => {
            let h = 1e-4 * x.abs().max(1.0);
            (p.q(x + h) - p.q(x - h)) / (2.0 * h)
        }
    }
}

/// Slowly varying Appell solution at X: R ≈ (λ − q)^{−1/2}, Q = −R′, P = (λ − q)R − Q′/2.
fn wkb_target(p: &Potential, lambda: f64, x: f64) -> Result<AppellVector> {
    let w = lambda - p.q(x);
    if !(w > 0.0) {
        return Err(Error::MatchingFailed(format!(
            "lambda - q(X) = {w} is not positive at X = {x}"
        )));
    }
    let s = w.sqrt();
    Ok(AppellVector::new(
        s,
        -slope_of_q(p, x) / (2.0 * w * s),
        1.0 / s,
    ))
}

/// Solve the 3×3 system [U₁ U₂ U₃]·c = t by Gaussian elimination with partial pivoting.
fn solve_frame(frame: &AppellFrame, t: &AppellVector) -> Result<FormCoefficients> {
    let col = |v: &AppellVector| [v.p, v.q, v.r];
    let cols = frame.columns.map(|c| col(&c));
    let mut m = [[0.0; 4]; 3];
    let rhs = col(t);
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = cols[j][i];
        }
        m[i][3] = rhs[i];
    }
    let scale = m
        .iter()
        .flat_map(|r| r[..3].iter())
        .fold(0.0f64, |s, v| s.max(v.abs()));
    for k in 0..3 {
        let piv = (k..3)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        if m[piv][k].abs() <= 1e-14 * scale {
            return Err(Error::MatchingFailed(format!(
                "singular Appell frame at x = {}",
                frame.x
            )));
        }
        m.swap(k, piv);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..4 {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    Ok(FormCoefficients::new(x[0], x[1], x[2]))
}

/// Least-squares intercept of y = c₀ + c₁/X.
fn extrapolate(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n == 1 {
        return ys[0];
    }
    let t: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let stt: f64 = t.iter().map(|ti| (ti - tm) * (ti - tm)).sum();
    if stt == 0.0 {
        return ym;
    }
    let sty: f64 = t.iter().zip(ys).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    ym - sty / stt * tm
}

/// Coordinates (ã, b̃, c̃) of the Appell solution that behaves like (√λ, 0, 1/√λ) at infinity.
pub fn connection_coefficients(
    p: &Potential,
    lambda: f64,
    match_points: &MatchPoints,
    cfg: &IntegratorConfig,
) -> Result<ConnectionResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid(format!(
            "connection coefficients need lambda > 0, got {lambda}"
        ));
    }
    let xs = match match_points {
        MatchPoints::Auto => default_match_points(p, lambda)?,
        MatchPoints::Explicit(xs) => check_match_points(p, lambda, xs)?,
    };
    let states = propagate_fundamental_many(p, lambda, &xs, cfg)?;
    let per_point = states
        .iter()
        .map(|s| {
            solve_frame(
                &AppellFrame::from_fundamental(s),
                &wkb_target(p, lambda, s.x)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let pick = |f: fn(&FormCoefficients) -> f64| -> f64 {
        extrapolate(&xs, &per_point.iter().map(f).collect::<Vec<_>>())
    };
    let coeffs = FormCoefficients::new(pick(|c| c.a), pick(|c| c.b), pick(|c| c.c));
    let last = per_point[per_point.len() - 1];
    let size = coeffs.a.abs().max(coeffs.b.abs()).max(coeffs.c.abs());
    let gap = (coeffs.a - last.a)
        .abs()
        .max((coeffs.b - last.b).abs())
        .max((coeffs.c - last.c).abs());
    let error_estimate = if size > 0.0 {
        gap / size
    } else {
        f64::INFINITY
    };
    Ok(ConnectionResult {
        lambda,
        coeffs,
        match_points: xs,
        per_point,
        error_estimate,
        low_confidence: !(error_estimate <= LOW_CONFIDENCE),
    })
}

/// Spectral density and boundary value at one λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityResult {
    pub lambda: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub c_tilde: f64,
    pub f: f64,
    pub m_re: f64,
    pub m_im: f64,
    pub error_estimate: f64,
    pub low_confidence: bool,
}

pub fn spectral_density(
    p: &Potential,
    lambda: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityResult> {
    let conn = connection_coefficients(p, lambda, &MatchPoints::Auto, cfg)?;
    let d = density_from_coeffs(&conn.coeffs)?;
    let FormCoefficients { a, b, c } = conn.coeffs;
    Ok(DensityResult {
        lambda,
        a_tilde: a,
        b_tilde: b,
        c_tilde: c,
        f: d.f,
        m_re: d.m_re,
        m_im: d.m_im,
        error_estimate: conn.error_estimate,
        low_confidence: conn.low_confidence,
    })
}

const D1: [f64; 7] = [
    -1.0 / 60.0,
    9.0 / 60.0,
    -45.0 / 60.0,
    0.0,
    45.0 / 60.0,
    -9.0 / 60.0,
    1.0 / 60.0,
];
const D3: [f64; 7] = [
    1.0 / 8.0,
    -1.0,
    13.0 / 8.0,
    0.0,
    -13.0 / 8.0,
    1.0,
    -1.0 / 8.0,
];

/// Max over `x_samples` of |R‴ + 4(λ−q)R′ − 2q′R|, with derivatives from 7-point
/// central differences of the reconstructed R. The residual is normalized by the
/// largest of |R‴|, 4|λ−q||R′|, 2|q′R| and 8|λ−q|^{3/2}|R|; the last term is the size
/// of R‴ for an oscillating form and keeps constant solutions (q ≡ 0) away from 0/0.
pub fn third_order_residual(
    p: &Potential,
    lambda: f64,
    coeffs: &FormCoefficients,
    x_samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if coeffs.a == 0.0 && coeffs.b == 0.0 && coeffs.c == 0.0 {
        return Ok(0.0);
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid(format!("residual needs lambda > 0, got {lambda}"));
    }
    let h = 0.03 / lambda.sqrt();
    let mut sorted = x_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(&x) = sorted.first() {
        if !(x - 3.0 * h > p.a()) {
            return invalid(format!(
                "sample {x} is too close to a = {} for the stencil",
                p.a()
            ));
        }
    }
    let fine = IntegratorConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        dense_output: false,
        ..*cfg
    };
    let centres = propagate_fundamental_many(p, lambda, &sorted, cfg)?;

    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for s in &centres {
        let x = s.x;
        let dq = p.dq(x)?;
        let start = continue_fundamental(p, lambda, s, &[x - 3.0 * h], &fine)?[0];
        let stencil: Vec<f64> = (0..7).map(|k| x + (k as f64 - 3.0) * h).collect();
        let states = continue_fundamental_forward(p, lambda, &start, &stencil[1..], &fine)?;
        let r: Vec<f64> = std::iter::once(&start)
            .chain(&states)
            .map(|st| coeffs.eval(st.u, st.v))
            .collect();
        let r1: f64 = D1.iter().zip(&r).map(|(w, v)| w * v).sum::<f64>() / h;
        let r3: f64 = D3.iter().zip(&r).map(|(w, v)| w * v).sum::<f64>() / (h * h * h);
        let w = lambda - p.q(x);
        let r0 = coeffs.eval(s.u, s.v);
        let res = r3 + 4.0 * w * r1 - 2.0 * dq * r0;
        worst = worst.max(res.abs());
        scale = scale
            .max(r3.abs())
            .max(4.0 * w.abs() * r1.abs())
            .max(2.0 * (dq * r0).abs())
            .max(8.0 * w.abs().powf(1.5) * r0.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::bessel_connection;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn inner_products() {
        let u1 = AppellVector::new(0.0, 0.0, 1.0);
        let u2 = AppellVector::new(0.0, -1.0, 0.0);
        let u3 = AppellVector::new(1.0, 0.0, 0.0);
        assert_eq!(inner_product(&u1, &u1), 0.0);
        assert_eq!(inner_product(&u1, &u3), 2.0);
        assert_eq!(inner_product(&u2, &u2), -1.0);
        let one = FormCoefficients::new(1.0, 0.0, 1.0);
        assert_eq!(inner_product_coeffs(&one, &one), 4.0);
        let e1 = FormCoefficients::new(1.0, 0.0, 0.0);
        let e3 = FormCoefficients::new(0.0, 0.0, 1.0);
        assert_eq!(inner_product_coeffs(&e1, &e3), 2.0);
    }

    #[test]
    fn r0_examples() {
        assert_eq!(
            r0_coefficients(0.0, 1.0).unwrap(),
            FormCoefficients::new(1.0, 0.0, 1.0)
        );
        assert_eq!(
            r0_coefficients(0.0, 2.0).unwrap(),
            FormCoefficients::new(0.5, 0.0, 2.0)
        );
        let c = r0_coefficients(1.0, 1.0).unwrap();
        assert_eq!(c, FormCoefficients::new(1.0, 2.0, 2.0));
        assert_eq!(c.discriminant(), 4.0);
        assert!(r0_coefficients(1.0, 0.0).is_err());
    }

    #[test]
    fn density_examples() {
        let d = density_from_coeffs(&FormCoefficients::new(0.5, 0.0, 2.0)).unwrap();
        assert!((d.f - 2.0 / PI).abs() < 1e-15);
        assert_eq!((d.m_re, d.m_im), (0.0, 2.0));
        let d = density_from_coeffs(&FormCoefficients::new(1.0, 0.0, 1.0)).unwrap();
        assert_eq!((d.f, d.m_re, d.m_im), (1.0 / PI, 0.0, 1.0));
        assert!(density_from_coeffs(&FormCoefficients::new(-1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn free_connection() {
        let r = connection_coefficients(&Potential::zero(0.0), 4.0, &MatchPoints::Auto, &cfg())
            .unwrap();
        let c = r.coeffs;
        assert!((c.a - 0.5).abs() < 1e-8 && c.b.abs() < 1e-8 && (c.c - 2.0).abs() < 1e-8);
        assert!(!r.low_confidence);
    }

    #[test]
    fn half_order_is_free() {
        let p = Potential::inverse_square(0.5, 1.0).unwrap();
        let r = connection_coefficients(&p, 1.0, &MatchPoints::Auto, &cfg()).unwrap();
        assert!((r.coeffs.a - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bessel_order_zero() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let r = connection_coefficients(&p, 1.0, &MatchPoints::Auto, &cfg()).unwrap();
        let exact = bessel_connection(0.0, 1.0, 1.0).unwrap();
        assert!((r.coeffs.a - 0.931_979_836_315_314_6).abs() < 1e-6);
        assert!((r.coeffs.a - exact.a).abs() < 1e-6 * exact.a);
        assert!((r.coeffs.discriminant() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn match_point_gate() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let err = connection_coefficients(&p, 1.0, &MatchPoints::Explicit(vec![2.0]), &cfg());
        assert!(matches!(err, Err(Error::MatchingFailed(_))));
        assert!(connection_coefficients(&p, -1.0, &MatchPoints::Auto, &cfg()).is_err());
    }

    #[test]
    fn extrapolation_is_exact_for_affine_in_inverse_x() {
        let xs = [10.0, 20.0, 40.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 5.0 / x).collect();
        assert!((extrapolate(&xs, &ys) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn residual_zero_potential() {
        let p = Potential::zero(0.0);
        let c = FormCoefficients::new(1.0, 0.3, 2.0);
        let r = third_order_residual(&p, 4.0, &c, &[1.0, 2.5, 7.0], &cfg()).unwrap();
        assert!(r < 1e-6, "residual {r}");
        assert_eq!(
            third_order_residual(
                &p,
                4.0,
                &FormCoefficients::new(0.0, 0.0, 0.0),
                &[1.0],
                &cfg()
            )
            .unwrap(),
            0.0
        );
    }
}
