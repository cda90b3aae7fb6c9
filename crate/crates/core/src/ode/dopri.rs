//! Dormand–Prince 5(4) with PI step-size control and the 4th-order continuous
//! extension, on fixed-size real state vectors.

use crate::error::{Error, Result};

use super::dense::Segment;
use super::IntegratorConfig;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
// h_new/h is kept within [1/FAC_MAX_INV, 1/FAC_MIN_INV]
const FAC_MIN_INV: f64 = 1.0 / 10.0;
const FAC_MAX_INV: f64 = 1.0 / 0.2;
const MAX_STEPS: usize = 20_000_000;

pub(crate) struct Dopri5<F, const N: usize> {
    rhs: F,
    x: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    facold: f64,
    rtol: f64,
    atol: f64,
    max_step: f64,
    steps: usize,
    dense: Option<Vec<Segment<N>>>,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    pub(crate) fn new(rhs: F, x0: f64, y0: [f64; N], cfg: &IntegratorConfig) -> Self {
        let mut k1 = [0.0; N];
        rhs(x0, &y0, &mut k1);
        Self {
            rhs,
            x: x0,
            y: y0,
            k1,
            h: 0.0,
            facold: 1e-4,
            rtol: cfg.rel_tol,
            atol: cfg.abs_tol,
            max_step: cfg.max_step,
            steps: 0,
            dense: cfg.dense_output.then(Vec::new),
        }
    }

    pub(crate) fn x(&self) -> f64 {
        self.x
    }

    pub(crate) fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub(crate) fn into_segments(self) -> Option<Vec<Segment<N>>> {
        self.dense
    }

    fn scale(&self, y0: f64, y1: f64) -> f64 {
        self.atol + self.rtol * y0.abs().max(y1.abs())
    }

    fn initial_step(&self, direction_len: f64) -> f64 {
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let sk = self.atol + self.rtol * self.y[i].abs();
            dnf += (self.k1[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.max_step).min(direction_len);
        let y1 = axpy(&self.y, h, &[(1.0, &self.k1)]);
        let mut f1 = [0.0; N];
        (self.rhs)(self.x + h, &y1, &mut f1);
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.atol + self.rtol * self.y[i].abs();
            der2 += ((f1[i] - self.k1[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.abs().max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1).min(self.max_step)
    }

    /// Integrate forward until exactly `x_end`.
    pub(crate) fn advance_to(&mut self, x_end: f64) -> Result<()> {
        if x_end <= self.x {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(x_end - self.x);
        }
        let mut last = false;
        let mut reject = false;
        loop {
            if self.steps >= MAX_STEPS {
                return Err(Error::TooManySteps {
                    max_steps: MAX_STEPS,
                    x_target: x_end,
                });
            }
            let mut h = self.h.min(self.max_step);
            if 0.1 * h <= self.x.abs().max(1.0) * f64::EPSILON {
                return Err(Error::StepSizeUnderflow { x: self.x, h });
            }
            if self.x + 1.01 * h >= x_end {
                h = x_end - self.x;
                last = true;
            }
            self.steps += 1;

            let x = self.x;
            let y = &self.y;
            let k1 = &self.k1;
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            let y2 = axpy(y, h, &[(A21, k1)]);
            (self.rhs)(x + C2 * h, &y2, &mut k2);
            let y3 = axpy(y, h, &[(A31, k1), (A32, &k2)]);
            (self.rhs)(x + C3 * h, &y3, &mut k3);
            let y4 = axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]);
            (self.rhs)(x + C4 * h, &y4, &mut k4);
            let y5 = axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            (self.rhs)(x + C5 * h, &y5, &mut k5);
            let y6 = axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let xph = x + h;
            (self.rhs)(xph, &y6, &mut k6);
            let ynew = axpy(
                y,
                h,
                &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            (self.rhs)(xph, &ynew, &mut k7);

            let mut err = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.scale(y[i], ynew[i]);
                err += (e / sk).powi(2);
            }
            let err = (err / N as f64).sqrt();

            let fac11 = err.powf(EXPO1);
            if err <= 1.0 {
                let fac = (fac11 / self.facold.powf(BETA)) / SAFETY;
                let fac = fac.clamp(FAC_MIN_INV, FAC_MAX_INV);
                let mut hnew = h / fac;
                self.facold = err.max(1e-4);

                if let Some(dense) = self.dense.as_mut() {
                    let mut rcont = [[0.0; N]; 5];
                    for i in 0..N {
                        let ydiff = ynew[i] - y[i];
                        let bspl = h * k1[i] - ydiff;
                        rcont[0][i] = y[i];
                        rcont[1][i] = ydiff;
                        rcont[2][i] = bspl;
                        rcont[3][i] = ydiff - h * k7[i] - bspl;
                        rcont[4][i] = h
                            * (D1 * k1[i]
                                + D3 * k3[i]
                                + D4 * k4[i]
                                + D5 * k5[i]
                                + D6 * k6[i]
                                + D7 * k7[i]);
                    }
                    dense.push(Segment::Quartic { x0: x, h, rcont });
                }

                self.k1 = k7;
                self.y = ynew;
                self.x = if last { x_end } else { xph };
                if reject {
                    hnew = hnew.min(h);
                }
                reject = false;
                // a step shortened to land on x_end must not shrink the next one
                if !last {
                    self.h = hnew;
                } else {
                    self.h = self.h.max(hnew);
                    return Ok(());
                }
            } else {
                let hnew = h / (fac11 / SAFETY).min(FAC_MAX_INV);
                reject = true;
                last = false;
                self.h = hnew;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dense: bool) -> IntegratorConfig {
        IntegratorConfig {
            dense_output: dense,
            ..IntegratorConfig::default()
        }
    }

    #[test]
    fn exponential_decay() {
        let mut s = Dopri5::new(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0],
            0.0,
            [1.0],
            &cfg(false),
        );
        s.advance_to(5.0).unwrap();
        assert_eq!(s.x(), 5.0);
        assert!((s.y()[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_staged() {
        let rhs = |_: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut s = Dopri5::new(rhs, 0.0, [1.0, 0.0], &cfg(false));
        for k in 1..=10 {
            let x = k as f64 * 3.0;
            s.advance_to(x).unwrap();
            assert!((s.y()[0] - x.cos()).abs() < 1e-9, "at {x}");
        }
    }

    #[test]
    fn dense_output_interpolates() {
        let rhs = |_: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut s = Dopri5::new(rhs, 0.0, [0.0, 1.0], &cfg(true));
        s.advance_to(10.0).unwrap();
        let traj = crate::ode::dense::Trajectory {
            segments: s.into_segments().unwrap(),
        };
        assert_eq!(traj.span(), Some((0.0, 10.0)));
        for i in 0..100 {
            let x = 0.1 * i as f64 + 0.037;
            let y = traj.sample(x).unwrap();
            assert!((y[0] - x.sin()).abs() < 1e-8, "at {x}: {}", y[0] - x.sin());
        }
        assert!(traj.sample(10.5).is_none());
    }

    #[test]
    fn tolerance_scaling() {
        // tighter tolerance must give smaller error on a nontrivial problem
        let run = |rtol: f64| {
            let c = IntegratorConfig {
                rel_tol: rtol,
                abs_tol: rtol * 1e-2,
                ..IntegratorConfig::default()
            };
            let rhs = |x: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = x.cos() * y[0];
            let mut s = Dopri5::new(rhs, 0.0, [1.0], &c);
            s.advance_to(20.0).unwrap();
            (s.y()[0] - 20f64.sin().exp()).abs()
        };
        assert!(run(1e-10) < run(1e-6));
    }
}
