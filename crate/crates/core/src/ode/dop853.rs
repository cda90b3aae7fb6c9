//! Dormand–Prince 8(5,3) with the 7th-order continuous extension, on
//! fixed-size real state vectors.

use crate::error::{Error, Result};

use super::dense::Segment;
use super::IntegratorConfig;

const C: [f64; 16] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
    1.0,
    0.1,
    0.2,
    0.7777777777777778,
];
const A: [[f64; 16]; 16] = [
    [
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        0.05260015195876773,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.0197250569845379,
        0.0591751709536137,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.02958758547680685,
        0.0,
        0.08876275643042054,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.2413651341592667,
        0.0,
        -0.8845494793282861,
        0.924834003261792,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037037037037037035,
        0.0,
        0.0,
        0.17082860872947386,
        0.12546768756682242,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037109375,
        0.0,
        0.0,
        0.17025221101954405,
        0.06021653898045596,
        -0.017578125,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.054293734116568765,
        0.0,
        0.0,
        0.0,
        0.0,
        4.450312892752409,
        1.8915178993145003,
        -5.801203960010585,
        0.3111643669578199,
        -0.1521609496625161,
        0.20136540080403034,
        0.04471061572777259,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.056167502283047954,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.25350021021662483,
        -0.2462390374708025,
        -0.12419142326381637,
        0.15329179827876568,
        0.00820105229563469,
        0.007567897660545699,
        -0.008298,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.03183464816350214,
        0.0,
        0.0,
        0.0,
        0.0,
        0.028300909672366776,
        0.053541988307438566,
        -0.05492374857139099,
        0.0,
        0.0,
        -0.00010834732869724932,
        0.0003825710908356584,
        -0.00034046500868740456,
        0.1413124436746325,
        0.0,
        0.0,
    ],
    [
        -0.42889630158379194,
        0.0,
        0.0,
        0.0,
        0.0,
        -4.697621415361164,
        7.683421196062599,
        4.06898981839711,
        0.3567271874552811,
        0.0,
        0.0,
        0.0,
        -0.0013990241651590145,
        2.9475147891527724,
        -9.15095847217987,
        0.0,
    ],
];
const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];
const E3: [f64; 13] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
    0.0,
];
const E5: [f64; 13] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
    0.0,
];
const D: [[f64; 16]; 4] = [
    [
        -8.428938276109013,
        0.0,
        0.0,
        0.0,
        0.0,
        0.5667149535193777,
        -3.0689499459498917,
        2.38466765651207,
        2.117034582445028,
        -0.871391583777973,
        2.2404374302607883,
        0.6315787787694688,
        -0.08899033645133331,
        18.148505520854727,
        -9.194632392478356,
        -4.436036387594894,
    ],
    [
        10.427508642579134,
        0.0,
        0.0,
        0.0,
        0.0,
        242.28349177525817,
        165.20045171727028,
        -374.5467547226902,
        -22.113666853125306,
        7.733432668472264,
        -30.674084731089398,
        -9.332130526430229,
        15.697238121770845,
        -31.139403219565178,
        -9.35292435884448,
        35.81684148639408,
    ],
    [
        19.985053242002433,
        0.0,
        0.0,
        0.0,
        0.0,
        -387.0373087493518,
        -189.17813819516758,
        527.8081592054236,
        -11.57390253995963,
        6.8812326946963,
        -1.0006050966910838,
        0.7777137798053443,
        -2.778205752353508,
        -60.19669523126412,
        84.32040550667716,
        11.99229113618279,
    ],
    [
        -25.69393346270375,
        0.0,
        0.0,
        0.0,
        0.0,
        -154.18974869023643,
        -231.5293791760455,
        357.6391179106141,
        93.40532418362432,
        -37.45832313645163,
        104.0996495089623,
        29.8402934266605,
        -43.53345659001114,
        96.32455395918828,
        -39.17726167561544,
        -149.72683625798564,
    ],
];

const SAFETY: f64 = 0.9;
// h_new/h is kept within [1/FAC_MAX_INV, 1/FAC_MIN_INV]
const FAC_MIN_INV: f64 = 1.0 / 6.0;
const FAC_MAX_INV: f64 = 1.0 / 0.333;
const EXPO: f64 = 1.0 / 8.0;
const MAX_STEPS: usize = 20_000_000;
const STAGES: usize = 12;

pub(crate) struct Dop853<F, const N: usize> {
    rhs: F,
    x: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
    max_step: f64,
    steps: usize,
    dense: Option<Vec<Segment<N>>>,
}

#[inline]
fn combine<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], k: &[[f64; N]]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        for (c, kj) in coeffs.iter().zip(k) {
            acc += c * kj[i];
        }
        out[i] = y[i] + h * acc;
    }
    out
}

impl<F, const N: usize> Dop853<F, N>
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

    fn initial_step(&self, span: f64) -> f64 {
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
        h = h.min(self.max_step).min(span);
        let y1: [f64; N] = std::array::from_fn(|i| self.y[i] + h * self.k1[i]);
        let mut f1 = [0.0; N];
        (self.rhs)(self.x + h, &y1, &mut f1);
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.atol + self.rtol * self.y[i].abs();
            der2 += ((f1[i] - self.k1[i]) / sk).powi(2);
        }
        let der12 = (der2.sqrt() / h).max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(EXPO)
        };
        (100.0 * h).min(h1).min(self.max_step).min(span)
    }

    fn dense_segment(&self, k: &mut [[f64; N]; 16], h: f64, ynew: &[f64; N]) -> Segment<N> {
        for s in 13..16 {
            let ys = combine(&self.y, h, &A[s][..s], &k[..s]);
            let mut ks = [0.0; N];
            (self.rhs)(self.x + C[s] * h, &ys, &mut ks);
            k[s] = ks;
        }
        let mut f = [[0.0; N]; 7];
        for i in 0..N {
            let dy = ynew[i] - self.y[i];
            f[0][i] = dy;
            f[1][i] = h * k[0][i] - dy;
            f[2][i] = 2.0 * dy - h * (k[12][i] + k[0][i]);
            for (r, drow) in D.iter().enumerate() {
                let mut acc = 0.0;
                for (d, kj) in drow.iter().zip(k.iter()) {
                    acc += d * kj[i];
                }
                f[3 + r][i] = h * acc;
            }
        }
        Segment::Septic {
            x0: self.x,
            h,
            y0: self.y,
            f,
        }
    }

    /// Integrate forward until exactly `x_end`.
    pub(crate) fn advance_to(&mut self, x_end: f64) -> Result<()> {
        if x_end <= self.x {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(x_end - self.x);
        }
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
            let mut last = false;
            if self.x + 1.01 * h >= x_end {
                h = x_end - self.x;
                last = true;
            }
            self.steps += 1;

            let mut k = [[0.0; N]; 16];
            k[0] = self.k1;
            for s in 1..STAGES {
                let ys = combine(&self.y, h, &A[s][..s], &k[..s]);
                (self.rhs)(self.x + C[s] * h, &ys, &mut k[s]);
            }
            let ynew = combine(&self.y, h, &B, &k[..STAGES]);
            let xph = self.x + h;
            (self.rhs)(xph, &ynew, &mut k[12]);

            let (mut err5, mut err3) = (0.0, 0.0);
            for i in 0..N {
                let sk = self.atol + self.rtol * self.y[i].abs().max(ynew[i].abs());
                let (mut e5, mut e3) = (0.0, 0.0);
                for j in 0..13 {
                    e5 += E5[j] * k[j][i];
                    e3 += E3[j] * k[j][i];
                }
                err5 += (e5 / sk).powi(2);
                err3 += (e3 / sk).powi(2);
            }
            let err = if err5 == 0.0 && err3 == 0.0 {
                0.0
            } else {
                h * err5 / ((err5 + 0.01 * err3) * N as f64).sqrt()
            };

            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let fac = (fac11 / SAFETY).clamp(FAC_MIN_INV, FAC_MAX_INV);
                let mut hnew = h / fac;
                if self.dense.is_some() {
                    let seg = self.dense_segment(&mut k, h, &ynew);
                    if let Some(d) = self.dense.as_mut() {
                        d.push(seg);
                    }
                }
                self.k1 = k[12];
                self.y = ynew;
                self.x = if last { x_end } else { xph };
                if reject {
                    hnew = hnew.min(h);
                }
                // a step shortened to land on x_end must not shrink the next one
                if last {
                    self.h = self.h.max(hnew);
                    return Ok(());
                }
                self.h = hnew;
                reject = false;
            } else {
                self.h = h / (fac11 / SAFETY).min(FAC_MAX_INV);
                reject = true;
            }
        }
    }
}
