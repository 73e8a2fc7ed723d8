//! Spherical functions `phi_lambda(s)`: closed form on H^3, the leading-term
//! (Harish-Chandra) split on H^3, a Bessel series near the origin, and a
//! radial ODE solver valid on every space.

use super::bessel::{bessel_j_norm, decay_constant};
use crate::error::{HypError, Result};
use crate::geometry::Space;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Default radius below which the Bessel series is used.
pub const DEFAULT_R0: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    ClosedFormH3,
    BesselSeries,
    OdeOracle,
    AnkerH3,
    EuclideanBessel,
}

/// A spherical-function value together with the route that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphericalEval {
    pub value: f64,
    pub route: Route,
    pub error_bound: Option<f64>,
}

/// `sin(lambda s) / (lambda sinh s)` with the removable singularities filled in.
pub fn phi_closed_h3(lambda: f64, s: f64) -> f64 {
    sinc(lambda * s) * if s == 0.0 { 1.0 } else { s / s.sinh() }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// The two conjugate branches of `phi_lambda(s)` on H^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnkerDecomposition {
    /// `c(lambda) e^{i lambda s}`
    pub plus_term: Complex64,
    /// `c(-lambda) e^{-i lambda s}`
    pub minus_term: Complex64,
    /// `2^{-m_z/2} A(s)^{-1/2}`
    pub prefactor: f64,
    pub error: Complex64,
}

impl AnkerDecomposition {
    pub fn reconstruct(&self) -> f64 {
        (self.prefactor * (self.plus_term + self.minus_term) + self.error).re
    }
}

pub fn phi_anker_h3(lambda: f64, s: f64) -> Result<AnkerDecomposition> {
    if lambda == 0.0 || s == 0.0 {
        return Err(HypError::Pole("the H^3 branch split needs lambda != 0 and s != 0".into()));
    }
    let c_plus = Complex64::new(0.0, -1.0 / lambda);
    let e = Complex64::from_polar(1.0, lambda * s);
    Ok(AnkerDecomposition {
        plus_term: c_plus * e,
        minus_term: c_plus.conj() * e.conj(),
        prefactor: 0.5 / s.sinh(),
        error: Complex64::new(0.0, 0.0),
    })
}

/// Taylor data of the space near the origin, as power series in `s^2`.
#[derive(Debug)]
pub(crate) struct RadialSeries {
    /// `A'/A - (n-1)/s = sum_j p[j] s^{2j+1}`
    pub p: Vec<f64>,
    /// Potential difference `w(s) = sum_k w[k] s^{2k}`.
    pub w: Vec<f64>,
}

const SERIES_TERMS: usize = 120;

fn build_radial_series(space: &Space) -> RadialSeries {
    let k = SERIES_TERMS + 1;
    let mut p = vec![0.0; SERIES_TERMS];
    if let Space::DamekRicci { m_z, .. } = *space {
        let nm1 = space.dim() as f64 - 1.0;
        let mz = m_z as f64;
        // x coth x = C/S and tanh x / x = S/C in powers of x^2, where
        // C = cosh x and S = sinh x / x.
        let mut c = vec![0.0; k + 1];
        let mut sv = vec![0.0; k + 1];
        let mut fact = 1.0;
        for i in 0..=2 * k + 1 {
            if i > 0 {
                fact *= i as f64;
            }
            if i % 2 == 0 && i / 2 <= k {
                c[i / 2] = 1.0 / fact;
            }
            if i % 2 == 1 && (i - 1) / 2 <= k {
                sv[(i - 1) / 2] = 1.0 / fact;
            }
        }
        let divide = |num: &[f64], den: &[f64]| {
            let mut q = vec![0.0; num.len()];
            for i in 0..num.len() {
                let mut acc = num[i];
                for j in 1..=i {
                    acc -= den[j] * q[i - j];
                }
                q[i] = acc / den[0];
            }
            q
        };
        let xcoth = divide(&c, &sv);
        let tanh_over_x = divide(&sv, &c);
        for (j, pj) in p.iter_mut().enumerate() {
            let scale = 2f64.powi(-(2 * j as i32 + 1));
            *pj = 0.5 * nm1 * xcoth[j + 1] * scale + 0.5 * mz * tanh_over_x[j] * scale;
        }
    }
    let n = space.dim() as f64;
    let rho2 = space.rho() * space.rho();
    let mut w = vec![0.0; SERIES_TERMS];
    for kk in 0..SERIES_TERMS {
        let mut v = 0.5 * ((2 * kk + 1) as f64 + n - 1.0) * p[kk];
        if kk >= 1 {
            for i in 0..kk {
                v += 0.25 * p[i] * p[kk - 1 - i];
            }
        }
        if kk == 0 {
            v -= rho2;
        }
        w[kk] = v;
    }
    RadialSeries { p, w }
}

pub(crate) fn radial_series(space: &Space) -> Arc<RadialSeries> {
    static CACHE: OnceLock<RwLock<HashMap<Space, Arc<RadialSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(space) {
        return v.clone();
    }
    let built = Arc::new(build_radial_series(space));
    cache.write().unwrap().entry(*space).or_insert(built).clone()
}

/// `(s^{n-1} / A(s))^{1/2}`, equal to 1 at the origin.
pub fn density_ratio_sqrt(space: &Space, s: f64) -> f64 {
    match *space {
        Space::Euclidean { .. } => 1.0,
        Space::DamekRicci { m_z, .. } => {
            if s == 0.0 {
                return 1.0;
            }
            let x = s / 2.0;
            let shx = x.sinh() / x;
            let nm1 = space.dim() as f64 - 1.0;
            (shx.powf(nm1) * x.cosh().powi(m_z as i32)).powf(-0.5)
        }
    }
}

/// Frobenius expansion of `phi_lambda` at the origin: returns `(phi, phi')`.
fn frobenius(space: &Space, series: &RadialSeries, kappa: f64, s: f64) -> (f64, f64) {
    let n = space.dim() as f64;
    let p = &series.p;
    let mut coef = Vec::with_capacity(64);
    coef.push(1.0);
    let s2 = s * s;
    let mut val = 1.0;
    let mut der = 0.0;
    let mut pow = 1.0;
    for m in 0..SERIES_TERMS - 1 {
        let mut acc = kappa * coef[m];
        for k in 1..=m {
            acc += 2.0 * k as f64 * p[m - k] * coef[k];
        }
        let next = -acc / ((2 * m + 2) as f64 * (2.0 * m as f64 + n));
        coef.push(next);
        let dpow = pow * s;
        pow *= s2;
        let term = next * pow;
        val += term;
        der += (2 * m + 2) as f64 * next * dpow;
        if term.abs() < 1e-18 * val.abs().max(1e-300) && m > 2 {
            break;
        }
    }
    (val, der)
}

/// Solve `phi'' + (A'/A) phi' + (lambda^2 + rho^2) phi = 0`, `phi(0) = 1`,
/// and return `phi_lambda` at the (sorted, nonnegative) nodes.
pub fn phi_ode(space: &Space, lambda: f64, s_nodes: &[f64], tol: f64) -> Result<Vec<f64>> {
    Ok(phi_ode_with_derivative(space, lambda, s_nodes, tol)?.into_iter().map(|v| v.0).collect())
}

/// As [`phi_ode`], also returning the radial derivative.
pub fn phi_ode_with_derivative(
    space: &Space,
    lambda: f64,
    s_nodes: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(lambda >= 0.0) || !(tol > 0.0) {
        return Err(HypError::Domain(format!("phi_ode needs lambda >= 0 and tol > 0 (lambda={lambda}, tol={tol})")));
    }
    if s_nodes.iter().any(|&s| !(s >= 0.0)) || s_nodes.windows(2).any(|w| w[1] < w[0]) {
        return Err(HypError::Domain("phi_ode needs sorted nonnegative nodes".into()));
    }
    let series = radial_series(space);
    let kappa = lambda * lambda + space.rho() * space.rho();
    let s0 = 0.25f64.min(1.5 / kappa.sqrt().max(1e-300));
    let mut out = Vec::with_capacity(s_nodes.len());
    let mut idx = 0;
    while idx < s_nodes.len() && s_nodes[idx] <= s0 {
        out.push(frobenius(space, &series, kappa, s_nodes[idx]));
        idx += 1;
    }
    if idx == s_nodes.len() {
        return Ok(out);
    }
    let (v0, d0) = frobenius(space, &series, kappa, s0);
    let rtol = (tol * 0.02).max(1e-14);
    let atol = rtol * 1e-6;
    let rhs = |s: f64, y: [f64; 2]| [y[1], -space.log_density_derivative(s) * y[1] - kappa * y[0]];
    let mut dp = DormandPrince::new(s0, [v0, d0], rtol, atol, 0.1 / kappa.sqrt());
    for &target in &s_nodes[idx..] {
        let y = dp.advance_to(target, &rhs)?;
        out.push((y[0], y[1]));
    }
    Ok(out)
}

struct DormandPrince {
    s: f64,
    y: [f64; 2],
    h: f64,
    rtol: f64,
    atol: f64,
    steps: usize,
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const MAX_STEPS: usize = 50_000_000;

impl DormandPrince {
    fn new(s: f64, y: [f64; 2], rtol: f64, atol: f64, h: f64) -> Self {
        DormandPrince { s, y, h, rtol, atol, steps: 0 }
    }

    fn advance_to<F: Fn(f64, [f64; 2]) -> [f64; 2]>(&mut self, target: f64, f: &F) -> Result<[f64; 2]> {
        let comb = |y: [f64; 2], ks: &[([f64; 2], f64)], h: f64| {
            let mut r = y;
            for (k, c) in ks {
                r[0] += h * c * k[0];
                r[1] += h * c * k[1];
            }
            r
        };
        while self.s < target {
            let mut h = self.h.min(target - self.s);
            let last = h >= target - self.s;
            let s = self.s;
            let y = self.y;
            let k1 = f(s, y);
            let k2 = f(s + h / 5.0, comb(y, &[(k1, A21)], h));
            let k3 = f(s + 0.3 * h, comb(y, &[(k1, A31), (k2, A32)], h));
            let k4 = f(s + 0.8 * h, comb(y, &[(k1, A41), (k2, A42), (k3, A43)], h));
            let k5 = f(s + 8.0 / 9.0 * h, comb(y, &[(k1, A51), (k2, A52), (k3, A53), (k4, A54)], h));
            let k6 = f(s + h, comb(y, &[(k1, A61), (k2, A62), (k3, A63), (k4, A64), (k5, A65)], h));
            let ynew = comb(y, &[(k1, B1), (k3, B3), (k4, B4), (k5, B5), (k6, B6)], h);
            let k7 = f(s + h, ynew);
            let mut err: f64 = 0.0;
            for i in 0..2 {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                err = err.max((e / sc).abs());
            }
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(HypError::Convergence(format!(
                    "radial ODE exceeded {MAX_STEPS} steps at s = {s} (target {target})"
                )));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.s = if last { target } else { s + h };
                self.y = ynew;
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                h *= factor.min(0.9);
                self.h = h;
                if h < 1e-14 * s.abs().max(1.0) {
                    return Err(HypError::Convergence(format!("radial ODE step underflow at s = {s}")));
                }
            }
        }
        Ok(self.y)
    }
}

/// Bessel-series representation
/// `phi_lambda(s) = (s^{n-1}/A)^{1/2} sum_l b_l(s) s^{2l} J(alpha + l, lambda s)`
/// with `alpha = (n-2)/2` and `b_0 = 1`.
#[derive(Clone, Debug)]
pub struct BesselSeries {
    space: Space,
    order: usize,
    alpha: f64,
    r0: f64,
    /// `coeffs[l][k]`: coefficient of `s^{2k}` in `b_l`, for `l <= order + 1`.
    coeffs: Vec<Vec<f64>>,
    c_m: f64,
}

const B_TERMS: usize = 80;

impl BesselSeries {
    pub fn new(space: &Space, order: usize, r0: f64) -> Result<BesselSeries> {
        if !(r0 > 0.0 && r0 < 2.0) {
            return Err(HypError::InvalidParameter(format!("series radius must lie in (0, 2), got {r0}")));
        }
        let series = radial_series(space);
        let alpha = space.bessel_order();
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(order + 2);
        let mut b = vec![0.0; B_TERMS];
        b[0] = 1.0;
        coeffs.push(b);
        for l in 0..=order {
            let prev = &coeffs[l];
            let mut next = vec![0.0; B_TERMS];
            for k in 0..B_TERMS - 1 {
                let mut f = 0.0;
                for i in 0..=k {
                    f += series.w[i] * prev[k - i];
                }
                let kk = (k + 1) as f64;
                f -= 4.0 * kk * (kk - alpha) * prev[k + 1];
                next[k] = f / ((2 * k + l + 1) as f64 * 4.0 * (alpha + l as f64 + 1.0));
            }
            coeffs.push(next);
        }
        let sup_next: f64 = coeffs[order + 1]
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * r0.powi(2 * k as i32))
            .sum();
        let mu = alpha + order as f64 + 1.0;
        let c_m = 2.0 * sup_next * decay_constant(mu).max(1.0);
        Ok(BesselSeries { space: *space, order, alpha, r0, coeffs, c_m })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Constant in the truncation bound.
    pub fn bound_constant(&self) -> f64 {
        self.c_m
    }

    /// `b_l(s)`.
    pub fn coefficient(&self, l: usize, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs[l].iter().rev().fold(0.0, |acc, &c| acc * s2 + c)
    }

    /// Truncation bound `C_M s^{2(M+1)} min(1, |lambda s|^{-((n-1)/2+M+1)})`.
    pub fn error_bound(&self, lambda: f64, s: f64) -> f64 {
        let z = (lambda * s).abs();
        let decay = if z > 1.0 { z.powf(-(self.alpha + 0.5 + self.order as f64 + 1.0)) } else { 1.0 };
        self.c_m * s.powi(2 * (self.order as i32 + 1)) * decay
    }

    pub fn eval(&self, lambda: f64, s: f64) -> Result<SphericalEval> {
        if !(s >= 0.0 && s <= self.r0) {
            return Err(HypError::OutOfRange(format!("Bessel series needs 0 <= s <= {}, got {s}", self.r0)));
        }
        let z = lambda * s;
        let mut sum = 0.0;
        let s2 = s * s;
        let mut pow = 1.0;
        for l in 0..=self.order {
            sum += self.coefficient(l, s) * pow * bessel_j_norm(self.alpha + l as f64, z);
            pow *= s2;
        }
        Ok(SphericalEval {
            value: density_ratio_sqrt(&self.space, s) * sum,
            route: Route::BesselSeries,
            error_bound: Some(self.error_bound(lambda, s)),
        })
    }
}

type SeriesCache = RwLock<HashMap<(Space, usize), Arc<BesselSeries>>>;

/// Cached Bessel series for `(space, M)` at the default radius.
pub fn bessel_series(space: &Space, order: usize) -> Arc<BesselSeries> {
    static CACHE: OnceLock<SeriesCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&(*space, order)) {
        return v.clone();
    }
    let built = Arc::new(BesselSeries::new(space, order, DEFAULT_R0).expect("default radius is valid"));
    cache.write().unwrap().entry((*space, order)).or_insert(built).clone()
}

pub fn phi_bessel_series(space: &Space, lambda: f64, s: f64, order: usize) -> Result<SphericalEval> {
    bessel_series(space, order).eval(lambda, s)
}

const DISPATCH_ORDER: usize = 10;
const ODE_TOL: f64 = 1e-11;

/// `phi_lambda(s)` by the most accurate available route.
pub fn spherical_function(space: &Space, lambda: f64, s: f64) -> Result<SphericalEval> {
    if !(s >= 0.0) {
        return Err(HypError::Domain(format!("radius must be nonnegative, got {s}")));
    }
    match *space {
        Space::Euclidean { .. } => Ok(SphericalEval {
            value: bessel_j_norm(space.bessel_order(), lambda * s),
            route: Route::EuclideanBessel,
            error_bound: None,
        }),
        _ if space.is_h3() => Ok(SphericalEval {
            value: phi_closed_h3(lambda, s),
            route: Route::ClosedFormH3,
            error_bound: None,
        }),
        _ => {
            if s <= DEFAULT_R0 {
                let r = phi_bessel_series(space, lambda, s, DISPATCH_ORDER)?;
                if r.error_bound.unwrap_or(0.0) <= 1e-11 {
                    return Ok(r);
                }
            }
            let v = phi_ode(space, lambda.abs(), &[s], ODE_TOL)?[0];
            Ok(SphericalEval { value: v, route: Route::OdeOracle, error_bound: None })
        }
    }
}

/// `phi_lambda(s)` on a tensor grid, rows indexed by frequency.
#[derive(Clone, Debug)]
pub struct PhiTable {
    pub lambdas: Vec<f64>,
    pub s_nodes: Vec<f64>,
    /// `values[i][j] = phi_{lambdas[i]}(s_nodes[j])`
    pub values: Vec<Vec<f64>>,
}

impl PhiTable {
    /// Tabulate with one radial ODE solve per frequency (closed forms on H^3
    /// and Euclidean space). `s_nodes` must be sorted.
    pub fn new(space: &Space, lambdas: &[f64], s_nodes: &[f64]) -> Result<PhiTable> {
        if s_nodes.windows(2).any(|w| w[1] < w[0]) || s_nodes.iter().any(|&s| !(s >= 0.0)) {
            return Err(HypError::Domain("PhiTable needs sorted nonnegative radii".into()));
        }
        let space = *space;
        let rows: Vec<Result<Vec<f64>>> = crate::par::map(lambdas, |&l| match space {
            Space::Euclidean { .. } => {
                let mu = space.bessel_order();
                Ok(s_nodes.iter().map(|&s| bessel_j_norm(mu, l * s)).collect())
            }
            _ if space.is_h3() => Ok(s_nodes.iter().map(|&s| phi_closed_h3(l, s)).collect()),
            _ => phi_ode(&space, l.abs(), s_nodes, ODE_TOL),
        });
        let values = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(PhiTable { lambdas: lambdas.to_vec(), s_nodes: s_nodes.to_vec(), values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spaces() -> [Space; 3] {
        [Space::h3(), Space::damek_ricci(2, 1).unwrap(), Space::damek_ricci(4, 3).unwrap()]
    }

    #[test]
    fn closed_form_values() {
        assert!((phi_closed_h3(1.0, 1.0) - PHI_H3_1_1).abs() < 1e-15);
        assert_eq!(phi_closed_h3(3.0, 0.0), 1.0);
        assert!(phi_closed_h3(std::f64::consts::PI / 0.7, 0.7).abs() < 1e-15);
    }

    const PHI_H3_1_1: f64 = 0.716_022_915_360_433_9;

    #[test]
    fn radial_series_coefficients() {
        let h3 = radial_series(&Space::h3());
        // 2 coth s - 2/s = 2s/3 - 2s^3/45 + 4 s^5/945
        assert!((h3.p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((h3.p[1] + 2.0 / 45.0).abs() < 1e-15);
        assert!((h3.p[2] - 4.0 / 945.0).abs() < 1e-16);
        assert!(h3.w.iter().all(|w| w.abs() < 1e-14));
        let s = radial_series(&Space::damek_ricci(4, 3).unwrap());
        assert!((s.p[0] - (7.0 / 12.0 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn anker_split_reconstructs() {
        for &(l, s) in &[(1.0, 1.0), (0.3, 4.0), (17.0, 0.2)] {
            let a = phi_anker_h3(l, s).unwrap();
            assert!((a.reconstruct() - phi_closed_h3(l, s)).abs() < 1e-12);
            assert_eq!(a.error, Complex64::new(0.0, 0.0));
        }
        let a = phi_anker_h3(1.0, 1.0).unwrap();
        assert!((a.plus_term + a.minus_term).im.abs() < 1e-15);
        assert!(phi_anker_h3(0.0, 1.0).is_err());
    }

    #[test]
    fn ode_matches_closed_form_on_h3() {
        let nodes: Vec<f64> = (0..=60).map(|i| 0.05 + i as f64 * 0.095).collect();
        for &l in &[0.5, 1.0, 2.0, 8.0] {
            let v = phi_ode(&Space::h3(), l, &nodes, 1e-10).unwrap();
            for (s, x) in nodes.iter().zip(v) {
                assert!((x - phi_closed_h3(l, *s)).abs() < 1e-9, "lambda={l} s={s}");
            }
        }
    }

    #[test]
    fn ode_positive_at_bottom_of_spectrum() {
        let nodes: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        for sp in spaces() {
            let v = phi_ode(&sp, 0.0, &nodes, 1e-10).unwrap();
            assert_eq!(v[0], 1.0);
            assert!(v.iter().all(|&x| x > 0.0 && x <= 1.0));
        }
    }

    #[test]
    fn series_agrees_with_ode() {
        let nodes: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
        for sp in spaces() {
            let ser = bessel_series(&sp, 4);
            for &l in &[0.0, 1.0, 5.0, 20.0] {
                let ode = phi_ode(&sp, l, &nodes, 1e-11).unwrap();
                for (s, o) in nodes.iter().zip(ode) {
                    let r = ser.eval(l, *s).unwrap();
                    let bound = r.error_bound.unwrap();
                    assert!((r.value - o).abs() <= 10.0 * bound + 1e-10, "{sp} lambda={l} s={s}: {} vs {o} (bound {bound})", r.value);
                }
            }
        }
    }

    #[test]
    fn ode_reference_values() {
        let cases = [
            ((2, 1), 3.0, 0.5, 0.721_140_887_064_332_01),
            ((2, 1), 3.0, 2.5, 0.018_288_143_948_202_821),
            ((4, 3), 1.0, 4.0, 0.002_207_485_836_003_370_2),
            ((4, 3), 0.0, 6.0, 0.000_140_984_049_886_107_17),
        ];
        for ((mv, mz), l, s, want) in cases {
            let sp = Space::damek_ricci(mv, mz).unwrap();
            let got = phi_ode(&sp, l, &[s], 1e-12).unwrap()[0];
            assert!((got - want).abs() < 1e-10 * want.abs().max(1e-3), "({mv},{mz}) lambda={l} s={s}: {got}");
            let d = spherical_function(&sp, l, s).unwrap().value;
            assert!((d - want).abs() < 1e-10, "dispatcher ({mv},{mz}) lambda={l} s={s}: {d}");
        }
    }

    #[test]
    fn series_normalization() {
        for sp in spaces() {
            let r = phi_bessel_series(&sp, 3.0, 0.0, 0).unwrap();
            assert_eq!(r.value, 1.0);
            assert_eq!(r.error_bound, Some(0.0));
        }
        assert!(phi_bessel_series(&Space::h3(), 1.0, 1.6, 0).is_err());
    }

    #[test]
    fn dispatcher_routes() {
        let sp = Space::damek_ricci(2, 1).unwrap();
        let near = spherical_function(&sp, 3.0, 0.5).unwrap();
        let far = spherical_function(&sp, 3.0, 2.5).unwrap();
        assert_eq!(near.route, Route::BesselSeries);
        assert_eq!(far.route, Route::OdeOracle);
        let o = phi_ode(&sp, 3.0, &[0.5, 2.5], 1e-11).unwrap();
        assert!((near.value - o[0]).abs() < 1e-10);
        assert!((far.value - o[1]).abs() < 1e-10);
    }
}
