use std::ops::{Mul, Sub};

use num_complex::Complex64;

use super::IntegratorConfig;
use super::{Solver, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::potential::Potential;

/// Solution pair (u, v) and derivatives at `x`, seeded by u(a)=1, u′(a)=0,
/// v(a)=0, v′(a)=1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerState<T> {
    pub x: f64,
    pub u: T,
    pub uprime: T,
    pub v: T,
    pub vprime: T,
}

impl<T> SchrodingerState<T>
where
    T: Copy + Mul<Output = T> + Sub<Output = T>,
{
    /// u v′ − u′ v, identically 1 for the exact solution.
    pub fn wronskian(&self) -> T {
        self.u * self.vprime - self.uprime * self.v
    }
}

impl SchrodingerState<f64> {
    pub fn wronskian_drift(&self) -> f64 {
        (self.wronskian() - 1.0).abs()
    }
}

impl SchrodingerState<Complex64> {
    pub fn wronskian_drift(&self) -> f64 {
        (self.wronskian() - 1.0).norm()
    }
}

/// One solution (P, Q, R) of the Appell system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppellVector {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl AppellVector {
    pub const fn new(p: f64, q: f64, r: f64) -> Self {
        Self { p, q, r }
    }

    /// Indefinite inner product 2(P R̃ + P̃ R) − Q Q̃.
    pub fn inner(&self, other: &Self) -> f64 {
        2.0 * (self.p * other.r + other.p * self.r) - self.q * other.q
    }
}

/// Gram matrix of the frame seeded at x = a.
pub const GRAM_REFERENCE: [[f64; 3]; 3] = [[0.0, 0.0, 2.0], [0.0, -1.0, 0.0], [2.0, 0.0, 0.0]];

/// Appell solution frame [U₁ U₂ U₃] at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppellFrame {
    pub x: f64,
    pub columns: [AppellVector; 3],
}

impl AppellFrame {
    /// Frame at the regular endpoint: U₁=(0,0,1), U₂=(0,−1,0), U₃=(1,0,0).
    pub fn initial(x: f64) -> Self {
        Self {
            x,
            columns: [
                AppellVector::new(0.0, 0.0, 1.0),
                AppellVector::new(0.0, -1.0, 0.0),
                AppellVector::new(1.0, 0.0, 0.0),
            ],
        }
    }

    /// Frame (2.18-style) built from a fundamental system.
    pub fn from_fundamental(s: &SchrodingerState<f64>) -> Self {
        let (u, up, v, vp) = (s.u, s.uprime, s.v, s.vprime);
        Self {
            x: s.x,
            columns: [
                AppellVector::new(up * up, -2.0 * u * up, u * u),
                AppellVector::new(up * vp, -(up * v + u * vp), u * v),
                AppellVector::new(vp * vp, -2.0 * v * vp, v * v),
            ],
        }
    }

    pub fn gram(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.columns[i].inner(&self.columns[j])))
    }

    /// Largest deviation of the Gram matrix from its value at x = a.
    pub fn gram_drift(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((g[i][j] - GRAM_REFERENCE[i][j]).abs());
            }
        }
        worst
    }

    /// Combination a·U₁ + b·U₂ + c·U₃.
    pub fn combine(&self, a: f64, b: f64, c: f64) -> AppellVector {
        let [u1, u2, u3] = self.columns;
        AppellVector::new(
            a * u1.p + b * u2.p + c * u3.p,
            a * u1.q + b * u2.q + c * u3.q,
            a * u1.r + b * u2.r + c * u3.r,
        )
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return invalid(format!("spectral parameter must be finite, got {lambda}"));
    }
    Ok(())
}

fn check_checkpoints(p: &Potential, xs: &[f64]) -> Result<()> {
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return invalid(format!("checkpoint {x} is not finite"));
        }
        if x < p.a() {
            return Err(Error::BeforeEndpoint {
                x_target: x,
                a: p.a(),
            });
        }
        if i > 0 && x < xs[i - 1] {
            return invalid("checkpoints must be nondecreasing");
        }
    }
    Ok(())
}

/// Integrate from x = a through every checkpoint, mapping the state at each.
fn staged<F, T, const N: usize>(
    p: &Potential,
    rhs: F,
    y0: [f64; N],
    xs: &[f64],
    cfg: &IntegratorConfig,
    mut map: impl FnMut(f64, &[f64; N]) -> T,
) -> Result<Vec<T>>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    cfg.validate()?;
    check_checkpoints(p, xs)?;
    let mut solver = Solver::new(rhs, p.a(), y0, cfg);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        solver.advance_to(x)?;
        out.push(map(solver.x(), solver.y()));
    }
    Ok(out)
}

fn real_rhs(p: &Potential, lambda: f64) -> impl Fn(f64, &[f64; 4], &mut [f64; 4]) + '_ {
    move |x, y, dy| {
        let w = p.q(x) - lambda;
        dy[0] = y[1];
        dy[1] = w * y[0];
        dy[2] = y[3];
        dy[3] = w * y[2];
    }
}

fn real_state(x: f64, y: &[f64]) -> SchrodingerState<f64> {
    SchrodingerState {
        x,
        u: y[0],
        uprime: y[1],
        v: y[2],
        vprime: y[3],
    }
}

/// (u, u′, v, v′) at every x in `xs` (nondecreasing) for real λ.
pub fn propagate_fundamental_many(
    p: &Potential,
    lambda: f64,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SchrodingerState<f64>>> {
    check_lambda(lambda)?;
    staged(
        p,
        real_rhs(p, lambda),
        [1.0, 0.0, 0.0, 1.0],
        xs,
        cfg,
        |x, y| real_state(x, y),
    )
}

/// Fundamental system at `x_target` for real λ.
pub fn propagate_fundamental(
    p: &Potential,
    lambda: f64,
    x_target: f64,
    cfg: &IntegratorConfig,
) -> Result<SchrodingerState<f64>> {
    Ok(propagate_fundamental_many(p, lambda, &[x_target], cfg)?[0])
}

/// Fundamental system for complex λ, integrated as a doubled real system.
pub fn propagate_fundamental_complex_many(
    p: &Potential,
    z: Complex64,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SchrodingerState<Complex64>>> {
    check_lambda(z.re)?;
    check_lambda(z.im)?;
    let (lr, li) = (z.re, z.im);
    // layout: u, u′, v, v′ as (re, im) pairs
    let rhs = move |x: f64, y: &[f64; 8], dy: &mut [f64; 8]| {
        let w = p.q(x) - lr;
        for base in [0, 4] {
            let (re, im) = (y[base], y[base + 1]);
            dy[base] = y[base + 2];
            dy[base + 1] = y[base + 3];
            dy[base + 2] = w * re + li * im;
            dy[base + 3] = w * im - li * re;
        }
    };
    let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    staged(p, rhs, y0, xs, cfg, |x, y| SchrodingerState {
        x,
        u: Complex64::new(y[0], y[1]),
        uprime: Complex64::new(y[2], y[3]),
        v: Complex64::new(y[4], y[5]),
        vprime: Complex64::new(y[6], y[7]),
    })
}

pub fn propagate_fundamental_complex(
    p: &Potential,
    z: Complex64,
    x_target: f64,
    cfg: &IntegratorConfig,
) -> Result<SchrodingerState<Complex64>> {
    Ok(propagate_fundamental_complex_many(p, z, &[x_target], cfg)?[0])
}

/// Dense trajectory of (u, u′, v, v′) on [a, x_end]; dense output is forced on.
pub fn fundamental_trajectory(
    p: &Potential,
    lambda: f64,
    x_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<4>> {
    check_lambda(lambda)?;
    let cfg = IntegratorConfig {
        dense_output: true,
        ..*cfg
    };
    cfg.validate()?;
    check_checkpoints(p, &[x_end])?;
    let mut solver = Solver::new(real_rhs(p, lambda), p.a(), [1.0, 0.0, 0.0, 1.0], &cfg);
    solver.advance_to(x_end)?;
    Ok(solver.into_trajectory().expect("dense output enabled"))
}

/// Appell frames at every x in `xs`, integrating the 3×3 companion system.
pub fn propagate_appell_many(
    p: &Potential,
    lambda: f64,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<AppellFrame>> {
    check_lambda(lambda)?;
    let rhs = move |x: f64, y: &[f64; 9], dy: &mut [f64; 9]| {
        let w = lambda - p.q(x);
        for j in 0..3 {
            let (pp, qq, rr) = (y[3 * j], y[3 * j + 1], y[3 * j + 2]);
            dy[3 * j] = w * qq;
            dy[3 * j + 1] = -2.0 * pp + 2.0 * w * rr;
            dy[3 * j + 2] = -qq;
        }
    };
    let y0 = [0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0];
    staged(p, rhs, y0, xs, cfg, |x, y| AppellFrame {
        x,
        columns: std::array::from_fn(|j| AppellVector::new(y[3 * j], y[3 * j + 1], y[3 * j + 2])),
    })
}

pub fn propagate_appell(
    p: &Potential,
    lambda: f64,
    x_target: f64,
    cfg: &IntegratorConfig,
) -> Result<AppellFrame> {
    Ok(propagate_appell_many(p, lambda, &[x_target], cfg)?[0])
}

/// θ₀ at every x in `xs`, accumulated as an extra quadrature component:
/// θ₀′ = B / ((u + A v)² + B² v²).
pub fn accumulate_theta0_many(
    p: &Potential,
    lambda: f64,
    m_re: f64,
    m_im: f64,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !(m_im > 0.0) || !m_re.is_finite() || !m_im.is_finite() {
        return invalid(format!(
            "theta0 needs finite A and B > 0, got A = {m_re}, B = {m_im}"
        ));
    }
    let rhs = move |x: f64, y: &[f64; 5], dy: &mut [f64; 5]| {
        let w = p.q(x) - lambda;
        dy[0] = y[1];
        dy[1] = w * y[0];
        dy[2] = y[3];
        dy[3] = w * y[2];
        let re = y[0] + m_re * y[2];
        let im = m_im * y[2];
        dy[4] = m_im / (re * re + im * im);
    };
    staged(p, rhs, [1.0, 0.0, 0.0, 1.0, 0.0], xs, cfg, |_, y| y[4])
}

pub fn accumulate_theta0(
    p: &Potential,
    lambda: f64,
    m_re: f64,
    m_im: f64,
    x_target: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    Ok(accumulate_theta0_many(p, lambda, m_re, m_im, &[x_target], cfg)?[0])
}

/// ∫ₐˣ u², ∫ₐˣ uv, ∫ₐˣ v² for real λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticIntegrals {
    pub x: f64,
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
}

pub fn quadratic_integrals_many(
    p: &Potential,
    lambda: f64,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<QuadraticIntegrals>> {
    check_lambda(lambda)?;
    let rhs = move |x: f64, y: &[f64; 7], dy: &mut [f64; 7]| {
        let w = p.q(x) - lambda;
        dy[0] = y[1];
        dy[1] = w * y[0];
        dy[2] = y[3];
        dy[3] = w * y[2];
        dy[4] = y[0] * y[0];
        dy[5] = y[0] * y[2];
        dy[6] = y[2] * y[2];
    };
    staged(
        p,
        rhs,
        [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        xs,
        cfg,
        |x, y| QuadraticIntegrals {
            x,
            uu: y[4],
            uv: y[5],
            vv: y[6],
        },
    )
}

/// Continue a real fundamental system from a known state to each x in `xs`.
/// Integrate forward from `from` through ascending checkpoints with one solver.
pub(crate) fn continue_fundamental_forward(
    p: &Potential,
    lambda: f64,
    from: &SchrodingerState<f64>,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SchrodingerState<f64>>> {
    if xs.windows(2).any(|w| w[1] < w[0]) || xs.first().is_some_and(|&x| x < from.x) {
        return invalid("checkpoints must be ascending and past the starting point");
    }
    let y0 = [from.u, from.uprime, from.v, from.vprime];
    let mut s = Solver::new(real_rhs(p, lambda), from.x, y0, cfg);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        s.advance_to(x)?;
        out.push(real_state(x, s.y()));
    }
    Ok(out)
}

pub(crate) fn continue_fundamental(
    p: &Potential,
    lambda: f64,
    from: &SchrodingerState<f64>,
    xs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SchrodingerState<f64>>> {
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let y0 = [from.u, from.uprime, from.v, from.vprime];
        // integrate in whichever direction is needed by reflecting x
        let state = if x >= from.x {
            let mut s = Solver::new(real_rhs(p, lambda), from.x, y0, cfg);
            s.advance_to(x)?;
            real_state(x, s.y())
        } else {
            let x0 = from.x;
            let rhs = move |t: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
                let w = p.q(x0 - t) - lambda;
                dy[0] = -y[1];
                dy[1] = -w * y[0];
                dy[2] = -y[3];
                dy[3] = -w * y[2];
            };
            let mut s = Solver::new(rhs, 0.0, y0, cfg);
            s.advance_to(x0 - x)?;
            real_state(x, s.y())
        };
        out.push(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn free_quarter_period() {
        let p = Potential::zero(0.0);
        let s = propagate_fundamental(&p, 1.0, PI / 2.0, &cfg()).unwrap();
        assert!(s.u.abs() < 1e-10);
        assert!((s.v - 1.0).abs() < 1e-10);
        assert!((s.uprime + 1.0).abs() < 1e-10);
        assert!(s.vprime.abs() < 1e-10);
    }

    #[test]
    fn free_full_period_lambda_four() {
        let p = Potential::zero(0.0);
        let s = propagate_fundamental(&p, 4.0, PI, &cfg()).unwrap();
        assert!((s.u - 1.0).abs() < 1e-10);
        assert!(s.v.abs() < 1e-10);
    }

    #[test]
    fn rejects_target_left_of_endpoint() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let err = propagate_fundamental(&p, 1.0, 0.5, &cfg()).unwrap_err();
        assert!(matches!(err, Error::BeforeEndpoint { .. }));
    }

    #[test]
    fn state_at_endpoint_is_identity() {
        let p = Potential::inverse_square(2.0, 1.0).unwrap();
        let s = propagate_fundamental(&p, 3.0, 1.0, &cfg()).unwrap();
        assert_eq!((s.u, s.uprime, s.v, s.vprime), (1.0, 0.0, 0.0, 1.0));
        let f = propagate_appell(&p, 3.0, 1.0, &cfg()).unwrap();
        assert_eq!(f, AppellFrame::initial(1.0));
    }

    #[test]
    fn appell_r_components_free() {
        let p = Potential::zero(0.0);
        let f = propagate_appell(&p, 1.0, PI, &cfg()).unwrap();
        assert!((f.columns[0].r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complex_matches_real_for_real_lambda() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let r = propagate_fundamental(&p, 2.0, 7.0, &cfg()).unwrap();
        let c = propagate_fundamental_complex(&p, Complex64::new(2.0, 0.0), 7.0, &cfg()).unwrap();
        assert!((c.u.re - r.u).abs() < 1e-9 && c.u.im == 0.0);
        assert!((c.v.re - r.v).abs() < 1e-9 && c.v.im == 0.0);
    }

    #[test]
    fn complex_free_closed_form() {
        let p = Potential::zero(0.0);
        let z = Complex64::new(1.0, 0.3);
        let k = z.sqrt();
        let s = propagate_fundamental_complex(&p, z, 5.0, &cfg()).unwrap();
        assert!((s.u - (k * 5.0).cos()).norm() < 1e-9);
        assert!((s.v - (k * 5.0).sin() / k).norm() < 1e-9);
        assert!(s.wronskian_drift() < 1e-9);
    }

    #[test]
    fn theta0_free_closed_form() {
        let p = Potential::zero(0.0);
        let t = accumulate_theta0(&p, 1.0, 0.0, 1.0, 2.0, &cfg()).unwrap();
        assert!((t - 2.0).abs() < 1e-10);
        let t = accumulate_theta0(&p, 4.0, 0.0, 2.0, 3.0, &cfg()).unwrap();
        assert!((t - 6.0).abs() < 1e-9);
        assert_eq!(
            accumulate_theta0(&p, 4.0, 0.0, 2.0, 0.0, &cfg()).unwrap(),
            0.0
        );
    }

    #[test]
    fn theta0_rejects_nonpositive_b() {
        let p = Potential::zero(0.0);
        assert!(accumulate_theta0(&p, 1.0, 0.0, 0.0, 1.0, &cfg()).is_err());
        assert!(accumulate_theta0(&p, 1.0, 0.0, -1.0, 1.0, &cfg()).is_err());
    }

    #[test]
    fn continue_backwards_and_forwards() {
        let p = Potential::inverse_square(0.0, 1.0).unwrap();
        let mid = propagate_fundamental(&p, 2.0, 6.0, &cfg()).unwrap();
        let direct = propagate_fundamental_many(&p, 2.0, &[5.5, 6.5], &cfg()).unwrap();
        let cont = continue_fundamental(&p, 2.0, &mid, &[5.5, 6.5], &cfg()).unwrap();
        for (d, c) in direct.iter().zip(&cont) {
            assert!((d.u - c.u).abs() < 1e-9 && (d.v - c.v).abs() < 1e-9);
        }
    }

    #[test]
    fn trajectory_sampling() {
        let p = Potential::zero(0.0);
        let t = fundamental_trajectory(&p, 1.0, 10.0, &cfg()).unwrap();
        let y = t.sample(4.2).unwrap();
        assert!((y[0] - 4.2f64.cos()).abs() < 1e-8);
    }
}
