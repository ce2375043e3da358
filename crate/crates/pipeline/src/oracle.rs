//! Spherical functions of the hyperbolic plane SL(2,ℝ)/SO(2) on a_Z = ℝH.
//!
//! φ_ν(exp(xH)) solves φ'' + 2coth(2x)φ' + (1+ν²)φ = 0 with φ(0) = 1 and is even in x.

use num_complex::Complex64 as C;
use sphct_cterm::{CtermError, Result};
use std::f64::consts::PI;

/// Trapezoid step in y = log v; the integrand is analytic in a strip, so the error is
/// far below 1e-12 at this step.
const STEP: f64 = 0.05;
const Y_MARGIN: f64 = 40.0;

/// (φ_ν(x), φ_ν'(x)) from the integral
/// φ(x) = Re (2/π) ∫ e^{−2x} v (e^{−2x}(1+v²)/(1+e^{−4x}v²))^{(iν−1)/2} / (1+e^{−4x}v²) dy, v = e^y.
pub fn spherical(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(CtermError::Invalid("spherical function needs finite ν and x".into()));
    }
    if x < 0.0 {
        let (p, d) = spherical(nu, -x)?;
        return Ok((p, -d));
    }
    let mu = C::new(-0.5, 0.5 * nu);
    let e2 = (-2.0 * x).exp();
    let e4 = e2 * e2;
    let (lo, hi) = (-Y_MARGIN, 4.0 * x + Y_MARGIN);
    let n = ((hi - lo) / STEP).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let (mut val, mut der) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for k in 0..=n {
        let y = lo + k as f64 * h;
        let v = y.exp();
        let v2 = v * v;
        let q = 1.0 + e4 * v2;
        let base = e2 * (1.0 + v2) / q;
        let f = (2.0 / PI) * e2 * v * (mu * base.ln()).exp() / q;
        let r = 4.0 * e4 * v2 / q;
        let dlog = C::new(-2.0, 0.0) + mu * (r - 2.0) + r;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        val += f * w;
        der += f * dlog * w;
    }
    let (val, der) = (val * h, der * h);
    if !val.re.is_finite() || !der.re.is_finite() {
        return Err(CtermError::QuadratureFailure { tol: 1e-10, estimate: f64::INFINITY });
    }
    Ok((val.re, der.re))
}

/// Samples φ_ν on a grid.
pub fn spherical_samples(nu: f64, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&x| spherical(nu, x).map(|p| p.0)).collect()
}

/// Γ(z) by the Lanczos approximation (g = 7, 9 terms), with reflection for Re z < ½.
pub fn gamma(z: C) -> C {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        return C::new(PI, 0.0) / ((z * PI).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// c(ν) = Γ(iν/2) / (√π Γ(½ + iν/2)), so that φ_ν(x) ~ c(ν)e^{(−1+iν)x} + c(−ν)e^{(−1−iν)x}.
pub fn c_function(nu: f64) -> C {
    let z = C::new(0.0, 0.5 * nu);
    gamma(z) / (PI.sqrt() * gamma(z + 0.5))
}

/// Coefficients of f(x) = Σ_k a_k e^{(μ−4k)x}, μ = −1+iν, a_0 = 1, solving the radial
/// equation term by term.
pub fn series_coefficients(nu: f64, terms: usize) -> Vec<C> {
    let mu = C::new(-1.0, nu);
    let mut a = vec![C::new(1.0, 0.0)];
    for k in 1..terms {
        let kf = k as f64;
        let denom = C::new(16.0 * kf * kf, -8.0 * kf * nu);
        let mut s = C::new(0.0, 0.0);
        for j in 1..=k {
            s += (mu - 4.0 * (k - j) as f64) * a[k - j];
        }
        a.push(-4.0 * s / denom);
    }
    a
}

/// φ_ν(x) for x > 0 from the expansion c(ν)f_ν + c(−ν)f_{−ν}; valid for ν ≠ 0.
pub fn spherical_series(nu: f64, x: f64, terms: usize) -> C {
    let mut total = C::new(0.0, 0.0);
    for s in [nu, -nu] {
        let mu = C::new(-1.0, s);
        let a = series_coefficients(s, terms);
        let f: C = a.iter().enumerate().map(|(k, ak)| ak * ((mu - 4.0 * k as f64) * x).exp()).sum();
        total += c_function(s) * f;
    }
    total
}

/// The exponent gap between the leading term and the first nonzero correction of the
/// expansion, i.e. the remainder rate along x → ∞.
pub fn remainder_exponent(nu: f64) -> f64 {
    let a = series_coefficients(nu, 8);
    let k = (1..a.len()).find(|&k| a[k].norm() > 1e-14).unwrap_or(a.len());
    4.0 * k as f64
}

/// |φ'' + 2coth(2x)φ' + (1+ν²)φ| at x ≠ 0, with φ'' from a fourth-order stencil on φ'.
pub fn eigen_residual(nu: f64, x: f64) -> Result<f64> {
    let h = 5e-3;
    let d = |k: f64| spherical(nu, x + k * h).map(|p| p.1);
    let dd = (d(-2.0)? - 8.0 * d(-1.0)? + 8.0 * d(1.0)? - d(2.0)?) / (12.0 * h);
    let (p, dp) = spherical(nu, x)?;
    Ok((dd + 2.0 / (2.0 * x).tanh() * dp + (1.0 + nu * nu) * p).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    // P_{−1/2+iν/2}(cosh 2x) and its x-derivative, 20 digits
    const TABLE: [(f64, [(f64, f64, f64); 4]); 3] = [
        (0.5, [
            (0.3, 0.972_480_309_517_569_2, -0.179_522_214_699_921_36),
            (1.0, 0.748_352_420_781_931_3, -0.405_983_607_601_440_9),
            (2.5, 0.228_749_789_876_211_26, -0.228_001_105_164_095_34),
            (6.0, -0.001_186_119_343_399_110_2, -0.002_216_439_985_519_665_8),
        ]),
        (1.0, [
            (0.3, 0.956_153_130_162_890_6, -0.284_807_622_357_117_16),
            (1.0, 0.615_055_374_971_018_2, -0.587_851_011_009_048_1),
            (2.5, 0.018_399_121_184_075_497, -0.153_938_311_531_790_98),
            (6.0, 0.000_915_399_621_772_933_8, 0.003_112_191_078_044_069_6),
        ]),
        (2.0, [
            (0.3, 0.892_211_968_108_171_9, -0.688_080_137_930_799_1),
            (1.0, 0.197_281_880_122_509_63, -0.945_004_916_398_030_5),
            (2.5, -0.054_658_056_221_075_255, 0.204_648_977_408_249_48),
            (6.0, 0.000_243_475_044_850_459_75, 0.005_339_730_815_219_396),
        ]),
    ];

    #[test]
    fn matches_legendre_values() {
        for (nu, rows) in TABLE {
            for (x, p, d) in rows {
                let (v, dv) = spherical(nu, x).unwrap();
                assert!((v - p).abs() < 1e-10, "ν={nu} x={x}: {v} vs {p}");
                assert!((dv - d).abs() < 1e-10, "ν={nu} x={x}: {dv} vs {d}");
            }
        }
    }

    #[test]
    fn normalized_at_origin() {
        for nu in [0.0, 0.5, 1.0, 2.0, 3.7] {
            assert!((spherical(nu, 0.0).unwrap().0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn even_in_nu() {
        for x in [0.2, 1.3, 4.0] {
            let a = spherical(1.3, x).unwrap().0;
            let b = spherical(-1.3, x).unwrap().0;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn c_function_values() {
        let want = [
            (0.5, C::new(0.430_577_060_095_719_65, -1.325_189_202_087_486_1)),
            (1.0, C::new(0.404_298_339_709_212_44, -0.728_470_580_744_929_8)),
            (2.0, C::new(0.343_591_409_929_452_1, -0.448_827_254_562_415_6)),
        ];
        for (nu, c) in want {
            assert!((c_function(nu) - c).norm() < 1e-12, "{nu}");
        }
    }

    #[test]
    fn series_agrees_with_integral() {
        for nu in [0.5, 1.0, 2.0] {
            for x in [0.8, 2.5, 6.0] {
                let s = spherical_series(nu, x, 40);
                assert!(s.im.abs() < 1e-12);
                assert!((s.re - spherical(nu, x).unwrap().0).abs() < 1e-10, "ν={nu} x={x}");
            }
        }
    }

    #[test]
    fn radial_equation_residual() {
        for nu in [0.5, 2.0] {
            for x in [0.7, 1.9] {
                let h = 1e-3;
                let (_, dp) = spherical(nu, x + h).unwrap();
                let (_, dm) = spherical(nu, x - h).unwrap();
                let (p, d) = spherical(nu, x).unwrap();
                let dd = (dp - dm) / (2.0 * h);
                let res = dd + 2.0 / (2.0 * x).tanh() * d + (1.0 + nu * nu) * p;
                assert!(res.abs() < 1e-6, "{res}");
            }
        }
    }

    #[test]
    fn eigen_residual_is_small() {
        for nu in [0.5, 1.0, 2.0] {
            for x in [-3.0, -1.0, 0.4, 2.5] {
                let r = eigen_residual(nu, x).unwrap();
                assert!(r < 1e-8, "{nu} {x} {r:e}");
            }
        }
    }

    #[test]
    fn zero_parameter_has_polynomial_factor() {
        // φ_0(x)e^{x} grows like x for large x
        let g = |x: f64| spherical(0.0, x).unwrap().0 * x.exp();
        let (a, b, c) = (g(6.0), g(8.0), g(10.0));
        assert!(b > a && c > b);
        assert!(((c - b) - (b - a)).abs() < 1e-3 * (c - b));
    }

    #[test]
    fn remainder_gap_is_four() {
        assert_eq!(remainder_exponent(1.0), 4.0);
    }
}
