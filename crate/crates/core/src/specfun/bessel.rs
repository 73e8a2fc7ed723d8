//! Normalized Bessel functions `J(mu, z) = Gamma(mu+1) (2/z)^mu J_mu(z)`.
//!
//! The normalization makes `J(mu, 0) = 1`; for `mu = 1/2` the function is
//! `sin z / z`.

use super::gamma::{gamma_real, ln_gamma_real};
use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 6.0;

/// Normalized Bessel function of order `mu >= 0`, even in `z`.
pub fn bessel_j_norm(mu: f64, z: f64) -> f64 {
    assert!(mu >= 0.0, "bessel_j_norm needs mu >= 0, got {mu}");
    let z = z.abs();
    if z == 0.0 {
        1.0
    } else if z <= SERIES_LIMIT {
        power_series(mu, z)
    } else if z >= hankel_threshold(mu) {
        let ln_pref = ln_gamma_real(mu + 1.0) + mu * (2.0 / z).ln();
        ln_pref.exp() * hankel_j(mu, z)
    } else {
        miller(mu, z)
    }
}

/// Derivative in `z`: `-z J(mu+1, z) / (2 (mu+1))`.
pub fn bessel_j_norm_deriv(mu: f64, z: f64) -> f64 {
    -z * bessel_j_norm(mu + 1.0, z) / (2.0 * (mu + 1.0))
}

/// Ordinary Bessel function `J_mu(z)` for `z > 0`.
pub fn bessel_j(mu: f64, z: f64) -> f64 {
    assert!(z > 0.0);
    if z >= hankel_threshold(mu) {
        hankel_j(mu, z)
    } else {
        let v = bessel_j_norm(mu, z);
        v * (mu * (z / 2.0).ln() - ln_gamma_real(mu + 1.0)).exp()
    }
}

fn hankel_threshold(mu: f64) -> f64 {
    20.0_f64.max(mu * mu)
}

fn power_series(mu: f64, z: f64) -> f64 {
    let q = -z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (mu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion of `J_mu(z)`; terminates for half-integer orders.
fn hankel_j(mu: f64, z: f64) -> f64 {
    let m4 = 4.0 * mu * mu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..80 {
        if term.abs() > last {
            break;
        }
        if k % 2 == 0 {
            p += if k % 4 == 0 { term } else { -term };
        } else {
            q += if k % 4 == 1 { term } else { -term };
        }
        last = term.abs();
        if last < 1e-18 {
            break;
        }
        let odd = (2 * k + 1) as f64;
        term *= (m4 - odd * odd) / ((k + 1) as f64 * 8.0 * z);
    }
    let chi = z - (mu / 2.0 + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller backward recurrence normalized by
/// `(z/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(z)`.
fn miller(mu: f64, z: f64) -> f64 {
    let kmax = (z.ceil() as usize) + 40;
    let mut y = vec![0.0; kmax + 2];
    y[kmax] = 1e-200;
    for k in (1..=kmax).rev() {
        y[k - 1] = 2.0 * (mu + k as f64) / z * y[k] - y[k + 1];
        if y[k - 1].abs() > 1e200 {
            for v in y.iter_mut().skip(k - 1) {
                *v *= 1e-200;
            }
        }
    }
    let mut w = 1.0;
    let mut norm = y[0];
    let mut k = 1;
    while 2 * k <= kmax {
        let kf = k as f64;
        w = if k == 1 { mu + 2.0 } else { w * (mu + 2.0 * kf) * (mu + kf - 1.0) / ((mu + 2.0 * kf - 2.0) * kf) };
        norm += w * y[2 * k];
        k += 1;
    }
    y[0] / norm
}

/// Spherical Bessel functions `j_0 .. j_{kmax}` at `x > 0`.
pub fn spherical_bessel_seq(kmax: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0);
    let mut out = vec![0.0; kmax + 1];
    if x > kmax as f64 {
        out[0] = x.sin() / x;
        if kmax >= 1 {
            out[1] = x.sin() / (x * x) - x.cos() / x;
        }
        for k in 1..kmax {
            out[k + 1] = (2 * k + 1) as f64 / x * out[k] - out[k - 1];
        }
        return out;
    }
    let start = kmax + 30 + x.ceil() as usize;
    let mut hi = 0.0;
    let mut cur = 1e-200;
    let mut stored = vec![0.0; kmax + 1];
    for k in (1..=start).rev() {
        let lo = (2 * k + 1) as f64 / x * cur - hi;
        hi = cur;
        cur = lo;
        if k - 1 <= kmax {
            stored[k - 1] = cur;
        }
        if k <= kmax {
            stored[k] = hi;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            hi *= 1e-200;
            for v in stored.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    let exact0 = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    let exact1 = if x < 1e-4 { x / 3.0 } else { x.sin() / (x * x) - x.cos() / x };
    let scale = if exact0.abs() >= exact1.abs() || kmax == 0 {
        exact0 / stored[0]
    } else {
        exact1 / stored[1]
    };
    for (o, s) in out.iter_mut().zip(stored) {
        *o = s * scale;
    }
    out
}

/// `Gamma(mu+1) 2^mu sqrt(2/pi)`: bounds `|J(mu, z)| z^{mu+1/2}` for `mu >= 1/2`.
pub fn decay_constant(mu: f64) -> f64 {
    gamma_real(mu + 1.0) * 2f64.powf(mu) * (2.0 / PI).sqrt()
}
