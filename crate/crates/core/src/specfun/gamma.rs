//! Log-gamma for complex arguments (Lanczos, g = 7, nine terms).

use num_complex::Complex64;
use std::f64::consts::PI;

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

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln sin(pi z)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let y = z.im;
    let i = Complex64::i();
    if y > 20.0 {
        -i * PI * z + Complex64::new(-(2.0f64).ln(), PI / 2.0)
    } else if y < -20.0 {
        i * PI * z + Complex64::new(-(2.0f64).ln(), -PI / 2.0)
    } else {
        (z * PI).sin().ln()
    }
}

/// Principal-ish branch of `ln Gamma(z)`; the imaginary part is only
/// meaningful modulo `2 pi`, which is all that exponentiation needs.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_lanczos(z)
    } else if z.re >= 0.0 {
        ln_gamma_lanczos(z + 1.0) - z.ln()
    } else {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z)
    }
}

/// `ln Gamma(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// `Gamma(x)` for real `x > 0`.
pub fn gamma_real(x: f64) -> f64 {
    ln_gamma_real(x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn real_values() {
        assert_relative_eq!(gamma_real(5.0), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma_real(1.5), PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.1), 9.513_507_698_668_732, max_relative = 1e-13);
    }

    #[test]
    fn complex_values() {
        let cases = [
            ((1.0, 1.0), (-0.650_923_199_301_856_34, -0.301_640_320_467_533_2)),
            ((0.0, 2.0), (-2.569_225_966_990_874_7, -1.441_150_010_485_108_3)),
            ((0.5, 10.0), (-14.789_024_734_744_293, 13.030_020_034_911_09)),
        ];
        for ((zr, zi), (lr, li)) in cases {
            let v = ln_gamma(Complex64::new(zr, zi));
            assert!((v.re - lr).abs() < 1e-12, "re at {zr}+{zi}i: {} vs {lr}", v.re);
            let d = (v.im - li).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-11, "im at {zr}+{zi}i: {} vs {li}", v.im);
        }
    }

    #[test]
    fn imaginary_axis() {
        let cases = [
            (0.3, 1.132_026_553_426_297_6),
            (5.0, -7.739_762_056_986_849),
            (50.0, -79.576_889_309_254_23),
            (400.0, -630.395_324_458_308),
        ];
        for (y, expected) in cases {
            let v = ln_gamma(Complex64::new(0.0, y)).re;
            assert!((v - expected).abs() < 1e-12 * expected.abs().max(1.0), "y={y}: {v}");
        }
        let z = Complex64::new(-0.3, 40.0);
        let lhs = ln_gamma(z) + ln_gamma(1.0 - z);
        let rhs = Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z);
        assert!((lhs - rhs).re.abs() < 1e-10);
    }
}
