//! Ascending power series for J_ν, with Y_ν from the J_{±ν} combination
//! (non-integer ν) or the logarithmic limit formula (integer ν).
//!
//! Cancellation grows like e^x, so this branch is meant for x ≲ 12.

use std::f64::consts::PI;

use crate::special::{digamma_int, rgamma};

fn j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let d = -half * half;
    // ν is never a negative integer here, so 1/Γ(ν+1) ≠ 0
    let mut term = half.powf(nu) * rgamma(nu + 1.0);
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= d / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && kf > half {
            break;
        }
    }
    sum
}

fn y_integer(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let nf = n as f64;
    let mut finite = 0.0;
    if n > 0 {
        // Σ_{k<n} (n−k−1)!/k! (x²/4)^k
        let q = half * half;
        let mut fact_nk1: f64 = (1..n).map(|i| i as f64).product(); // (n−1)!
        let mut fact_k = 1.0;
        let mut qk = 1.0;
        for k in 0..n {
            if k > 0 {
                fact_k *= k as f64;
                fact_nk1 /= (n - k) as f64;
                qk *= q;
            }
            finite += fact_nk1 / fact_k * qk;
        }
        finite *= half.powf(-nf);
    }
    let d = -half * half;
    let mut term: f64 = 1.0 / (1..=n).map(|i| i as f64).product::<f64>(); // 1/(k! (n+k)!) at k=0
    let mut sum = (digamma_int(1) + digamma_int(n + 1)) * term;
    for k in 1..500u32 {
        let kf = k as f64;
        term *= d / (kf * (kf + nf));
        let t = (digamma_int(k + 1) + digamma_int(n + k + 1)) * term;
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() && kf > half {
            break;
        }
    }
    -finite / PI + 2.0 / PI * half.ln() * j_series(nf, x) - half.powf(nf) * sum / PI
}

fn y_series(nu: f64, x: f64) -> f64 {
    if nu.fract() == 0.0 {
        y_integer(nu as u32, x)
    } else {
        let (s, c) = (nu * PI).sin_cos();
        (j_series(nu, x) * c - j_series(-nu, x)) / s
    }
}

/// (J_ν, Y_ν, J′_ν, Y′_ν) from the ascending series.
pub fn jy_series(nu: f64, x: f64) -> (f64, f64, f64, f64) {
    let j = j_series(nu, x);
    let y = y_series(nu, x);
    let jp = nu / x * j - j_series(nu + 1.0, x);
    let yp = nu / x * y - y_series(nu + 1.0, x);
    (j, y, jp, yp)
}
