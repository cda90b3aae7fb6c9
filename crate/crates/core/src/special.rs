//! Gamma-function helpers used by the Bessel routines.

#![allow(clippy::excessive_precision)] // coefficient tables keep all reference digits

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// 1/Γ(z) = Σ_{k≥1} c_k z^k, coefficients c_1 … c_30.
const RGAMMA_TAYLOR: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
    1.714_406_321_927_337_433_4e-20,
];

/// 1/Γ(1 + t) for |t| ≤ 1/2.
#[inline]
pub(crate) fn rgamma_one_plus(t: f64) -> f64 {
    RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Temme's auxiliary functions for |μ| ≤ 1/2:
/// (Γ₁(μ), Γ₂(μ), 1/Γ(1+μ), 1/Γ(1−μ)).
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    // even/odd split of the series in μ avoids the 0/0 in Γ₁ at μ = 0
    let mut even = 0.0; // Σ c_{2j} μ^{2j-2}
    let mut odd = 0.0; // Σ c_{2j+1} μ^{2j}
    for j in (0..15).rev() {
        odd = odd * mu2 + RGAMMA_TAYLOR[2 * j];
        even = even * mu2 + RGAMMA_TAYLOR[2 * j + 1];
    }
    let gampl = odd + mu * even;
    let gammi = odd - mu * even;
    (-even, odd, gampl, gammi)
}

/// 1/Γ(x) for any real x; exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 171.0 {
        return 0.0;
    }
    let mut x = x;
    let mut scale = 1.0;
    while x > 1.5 {
        x -= 1.0;
        scale /= x;
    }
    while x < 0.5 {
        scale *= x;
        x += 1.0;
    }
    scale * rgamma_one_plus(x - 1.0)
}

pub fn gamma(x: f64) -> f64 {
    1.0 / rgamma(x)
}

/// ψ(n) for positive integer n: −γ + Σ_{k<n} 1/k.
pub fn digamma_int(n: u32) -> f64 {
    assert!(n >= 1, "digamma_int needs n >= 1");
    (1..n).fold(-EULER_GAMMA, |acc, k| acc + 1.0 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(1.5) - 0.886_226_925_452_758).abs() < 1e-15);
        // Γ(−1/2) = −2√π
        assert!((gamma(-0.5) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn gamma_recurrence() {
        for i in 1..40 {
            let x = 0.13 * i as f64 + 0.01;
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!(((lhs - rhs) / lhs).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn temme_gammas_at_zero() {
        let (g1, g2, gp, gm) = temme_gammas(0.0);
        assert!((g1 + EULER_GAMMA).abs() < 1e-16);
        assert_eq!((g2, gp, gm), (1.0, 1.0, 1.0));
        let mu = 0.3;
        let (g1, g2, gp, gm) = temme_gammas(mu);
        assert!((gp - 1.0 / gamma(1.0 + mu)).abs() < 1e-15);
        assert!((gm - 1.0 / gamma(1.0 - mu)).abs() < 1e-15);
        assert!((g1 - (gm - gp) / (2.0 * mu)).abs() < 1e-14);
        assert!((g2 - (gm + gp) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn digamma_integers() {
        assert!((digamma_int(1) + EULER_GAMMA).abs() < 1e-16);
        assert!((digamma_int(4) - (1.0 + 0.5 + 1.0 / 3.0 - EULER_GAMMA)).abs() < 1e-15);
    }
}
