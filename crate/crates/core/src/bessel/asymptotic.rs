//! Hankel's large-argument expansion of J_ν and Y_ν.

use std::f64::consts::PI;

/// Returns (P, Q), summing until terms stop decreasing.
fn pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() >= prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        // a_k/x^k alternates between Q (odd k) and P (even k) with sign (−1)^⌊k/2⌋
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn jy_plain(nu: f64, x: f64) -> (f64, f64) {
    let (p, q) = pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// (J_ν, Y_ν, J′_ν, Y′_ν) from the asymptotic expansion; accurate for x ≫ ν².
pub fn jy_hankel(nu: f64, x: f64) -> (f64, f64, f64, f64) {
    let (j, y) = jy_plain(nu, x);
    let (j1, y1) = jy_plain(nu + 1.0, x);
    (j, y, nu / x * j - j1, nu / x * y - y1)
}
