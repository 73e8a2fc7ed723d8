//! Spherical Fourier transform on Damek-Ricci spaces and its Euclidean
//! analogue, even Fourier transforms on the line, Abel transforms defined
//! through the transform diagram, the weight-ratio multiplier, Sobolev norms,
//! and the Pitt and Riesz-potential identities.

use crate::error::{HypError, Result};
use crate::geometry::Space;
use crate::par;
use crate::quadrature::{composite_gauss_legendre, integrate};
use crate::specfun::cfunction::plancherel_unchecked;
use crate::specfun::gamma::gamma_real;
use crate::specfun::spherical::PhiTable;
use crate::spline::ComplexSpline;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

/// Quadrature grid: nodes with positive weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    /// Composite Gauss-Legendre grid with `panels` equal panels of `order` nodes.
    pub fn gauss(a: f64, b: f64, panels: usize, order: usize) -> Grid {
        let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        Grid::gauss_breaks(&breaks, order)
    }

    pub fn gauss_breaks(breaks: &[f64], order: usize) -> Grid {
        let (nodes, weights) = composite_gauss_legendre(breaks, order);
        Grid { nodes, weights }
    }

    /// Radial grid used by the transforms: `[0, 12]`, 48 panels of 16 nodes.
    pub fn standard_radial() -> Grid {
        Grid::gauss(0.0, 12.0, 48, 16)
    }

    /// Frequency grid used by the transforms: `[0, 32]`, 32 panels of 16 nodes.
    pub fn standard_spectral() -> Grid {
        Grid::gauss(0.0, 32.0, 32, 16)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn key(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for x in &self.nodes {
            x.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailKind {
    CompactSupport,
    PowerDecay(f64),
    Schwartz,
}

pub type ProfileFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Sampled frequency-side function, optionally backed by an exact closure.
#[derive(Clone)]
pub struct SpectralProfile {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub tail: TailKind,
    /// Closed support interval (upper end may be infinite).
    pub support: (f64, f64),
    exact: Option<ProfileFn>,
    spline: Option<Arc<ComplexSpline>>,
}

impl std::fmt::Debug for SpectralProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralProfile")
            .field("nodes", &self.grid.len())
            .field("tail", &self.tail)
            .field("support", &self.support)
            .field("analytic", &self.exact.is_some())
            .finish()
    }
}

impl SpectralProfile {
    /// Profile given by a closure, sampled on `grid`; zero outside `support`.
    pub fn from_fn<F>(f: F, grid: Grid, support: (f64, f64), tail: TailKind) -> SpectralProfile
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let f: ProfileFn = Arc::new(f);
        let values = grid
            .nodes
            .iter()
            .map(|&l| if l >= support.0 && l <= support.1 { f(l) } else { Complex64::new(0.0, 0.0) })
            .collect();
        SpectralProfile { grid, values, tail, support, exact: Some(f), spline: None }
    }

    /// Profile known only at the nodes of `grid`; evaluated elsewhere by
    /// cubic spline, and as zero beyond the last node.
    pub fn from_samples(grid: Grid, values: Vec<Complex64>, tail: TailKind) -> Result<SpectralProfile> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(HypError::InvalidParameter("spectral samples and grid differ in length".into()));
        }
        if grid.nodes[0] <= 0.0 || grid.nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HypError::InvalidParameter("frequency grid must be strictly increasing and positive".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(HypError::InvalidParameter("spectral values must be finite".into()));
        }
        let spline = if grid.len() >= 2 { Some(Arc::new(ComplexSpline::new(&grid.nodes, &values)?)) } else { None };
        let support = (0.0, if tail == TailKind::CompactSupport { *grid.nodes.last().unwrap() } else { f64::INFINITY });
        Ok(SpectralProfile { grid, values, tail, support, exact: None, spline })
    }

    pub fn is_analytic(&self) -> bool {
        self.exact.is_some()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.grid.nodes
    }

    /// Value at an arbitrary frequency.
    pub fn eval(&self, l: f64) -> Complex64 {
        if l < self.support.0 || l > self.support.1 {
            return Complex64::new(0.0, 0.0);
        }
        if let Some(f) = &self.exact {
            return f(l);
        }
        match &self.spline {
            Some(s) => {
                let (a, b) = s.range();
                if l > b {
                    Complex64::new(0.0, 0.0)
                } else if l < a {
                    self.values[0]
                } else {
                    s.eval(l)
                }
            }
            None => self.values[0],
        }
    }

    /// Pointwise product with a frequency multiplier.
    pub fn multiply<M>(&self, m: M) -> SpectralProfile
    where
        M: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let m = Arc::new(m);
        let values: Vec<Complex64> = self.grid.nodes.iter().zip(&self.values).map(|(&l, &v)| v * m(l)).collect();
        match &self.exact {
            Some(f) => {
                let f = f.clone();
                let m2 = m.clone();
                let mut out = SpectralProfile::from_fn(move |l| f(l) * m2(l), self.grid.clone(), self.support, self.tail);
                out.values = values;
                out
            }
            None => SpectralProfile::from_samples(self.grid.clone(), values, self.tail).expect("same grid"),
        }
    }

    /// The same profile sampled on another grid.
    pub fn resample(&self, grid: Grid) -> SpectralProfile {
        let values: Vec<Complex64> = grid.nodes.iter().map(|&l| self.eval(l)).collect();
        SpectralProfile {
            grid,
            values,
            tail: self.tail,
            support: self.support,
            exact: self.exact.clone(),
            spline: if self.exact.is_some() { None } else { self.spline.clone() },
        }
    }
}

/// Radial function sampled on a quadrature grid.
#[derive(Clone)]
pub struct RadialProfile {
    pub space: Space,
    pub grid: Grid,
    pub values: Vec<Complex64>,
    exact: Option<ProfileFn>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("space", &self.space).field("nodes", &self.grid.len()).finish()
    }
}

impl RadialProfile {
    pub fn from_fn<F>(space: &Space, grid: Grid, f: F) -> RadialProfile
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let f: ProfileFn = Arc::new(f);
        let values = grid.nodes.iter().map(|&s| f(s)).collect();
        RadialProfile { space: *space, grid, values, exact: Some(f) }
    }

    /// Samples at arbitrary radii, resampled by cubic spline onto `grid`
    /// (zero beyond the last radius).
    pub fn from_table(space: &Space, s: &[f64], values: &[Complex64], grid: Grid) -> Result<RadialProfile> {
        if s.first().is_none_or(|&x| x < 0.0) {
            return Err(HypError::InvalidParameter("radial table must be nonempty with nonnegative radii".into()));
        }
        let spline = ComplexSpline::new(s, values)?;
        let (a, b) = spline.range();
        let vals = grid
            .nodes
            .iter()
            .map(|&x| if x > b { Complex64::new(0.0, 0.0) } else { spline.eval(x.max(a)) })
            .collect();
        Ok(RadialProfile { space: *space, grid, values: vals, exact: None })
    }

    pub fn from_values(space: &Space, grid: Grid, values: Vec<Complex64>) -> Result<RadialProfile> {
        if grid.len() != values.len() {
            return Err(HypError::InvalidParameter("radial samples and grid differ in length".into()));
        }
        Ok(RadialProfile { space: *space, grid, values, exact: None })
    }

    pub fn eval(&self, s: f64) -> Option<Complex64> {
        self.exact.as_ref().map(|f| f(s))
    }

    /// `L^2(A ds)` norm.
    pub fn l2_norm(&self) -> f64 {
        weighted_l2(&self.space, &self.grid, &self.values)
    }
}

fn weighted_l2(space: &Space, grid: &Grid, values: &[Complex64]) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(values)
        .map(|((&s, &w), v)| w * v.norm_sqr() * space.density_unchecked(s))
        .sum::<f64>()
        .sqrt()
}

/// Relative `L^2(A ds)` distance between two profiles on the same grid.
pub fn relative_l2_error(a: &RadialProfile, b: &RadialProfile) -> Result<f64> {
    if a.grid != b.grid {
        return Err(HypError::InvalidParameter("profiles live on different grids".into()));
    }
    let diff: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    Ok(weighted_l2(&a.space, &a.grid, &diff) / a.l2_norm())
}

/// Plancherel weight: `|c(lambda)|^{-2}`, or `lambda^{n-1}` on Euclidean space.
pub fn plancherel_weight(space: &Space, lambda: f64) -> f64 {
    match *space {
        Space::Euclidean { n } => lambda.abs().powi(n as i32 - 1),
        _ => plancherel_unchecked(space, lambda),
    }
}

fn phi_table(space: &Space, lambdas: &Grid, s: &Grid) -> Result<Arc<PhiTable>> {
    type Key = (Space, u64, u64);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<PhiTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (*space, lambdas.key(), s.key());
    if let Some(t) = cache.read().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table = Arc::new(PhiTable::new(space, &lambdas.nodes, &s.nodes)?);
    Ok(cache.write().unwrap().entry(key).or_insert(table).clone())
}

/// Spherical (or Euclidean radial) Fourier transform onto `lambda_grid`.
pub fn sft_forward_on(space: &Space, f: &RadialProfile, lambda_grid: Grid) -> Result<SpectralProfile> {
    if f.space != *space {
        return Err(HypError::InvalidParameter(format!("profile lives on {} but transform requested on {}", f.space, space)));
    }
    let weighted: Vec<Complex64> = f
        .grid
        .nodes
        .iter()
        .zip(&f.grid.weights)
        .zip(&f.values)
        .map(|((&s, &w), &v)| v * (w * space.density_unchecked(s)))
        .collect();
    let peak = weighted.iter().map(|v| v.norm() / 1.0).fold(0.0, f64::max);
    let last = f.values.last().map_or(0.0, |v| v.norm() * space.density_unchecked(*f.grid.nodes.last().unwrap()));
    let vmax = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let at_noise_floor = f.values.last().is_none_or(|v| v.norm() <= 1e3 * f64::EPSILON * vmax);
    if peak > 0.0 && last > 1e-9 * peak && !at_noise_floor {
        return Err(HypError::Tail(format!(
            "|f| A at the last radius is {last:.3e}, not negligible against {peak:.3e}; extend the grid"
        )));
    }
    let table = phi_table(space, &lambda_grid, &f.grid)?;
    let values: Vec<Complex64> = par::map_range(lambda_grid.len(), |i| {
        table.values[i].iter().zip(&weighted).map(|(&p, &v)| v * p).sum()
    });
    SpectralProfile::from_samples(lambda_grid, values, TailKind::Schwartz)
}

/// Transform onto the standard frequency grid.
pub fn sft_forward(space: &Space, f: &RadialProfile) -> Result<SpectralProfile> {
    sft_forward_on(space, f, Grid::standard_spectral())
}

/// Inverse transform `C int fhat(lambda) phi_lambda(s) w(lambda) dlambda`,
/// integrated on the profile's own frequency grid, evaluated on `s_grid`.
pub fn sft_inverse_on(space: &Space, fhat: &SpectralProfile, s_grid: Grid) -> Result<RadialProfile> {
    let c = inversion_constant(space)?;
    let weighted: Vec<Complex64> = fhat
        .grid
        .nodes
        .iter()
        .zip(&fhat.grid.weights)
        .zip(&fhat.values)
        .map(|((&l, &w), &v)| v * (c * w * plancherel_weight(space, l)))
        .collect();
    let table = phi_table(space, &fhat.grid, &s_grid)?;
    let n = s_grid.len();
    let values: Vec<Complex64> = par::map_range(n, |j| {
        table.values.iter().zip(&weighted).map(|(row, &v)| v * row[j]).sum()
    });
    RadialProfile::from_values(space, s_grid, values)
}

pub fn sft_inverse(space: &Space, fhat: &SpectralProfile) -> Result<RadialProfile> {
    sft_inverse_on(space, fhat, Grid::standard_radial())
}

/// Inversion constant `C`, fixed per space so that Plancherel holds for
/// `exp(-s^2)`. Closed forms: `2/pi` on H^3 and `1/(2^{n-2} Gamma(n/2)^2)`
/// on Euclidean space.
pub fn inversion_constant(space: &Space) -> Result<f64> {
    static CACHE: OnceLock<RwLock<HashMap<Space, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(&c) = cache.read().unwrap().get(space) {
        return Ok(c);
    }
    let c = match *space {
        Space::Euclidean { n } => 1.0 / (2f64.powi(n as i32 - 2) * gamma_real(n as f64 / 2.0).powi(2)),
        _ => {
            let f = RadialProfile::from_fn(space, Grid::standard_radial(), |s| Complex64::new((-s * s).exp(), 0.0));
            let fhat = sft_forward(space, &f)?;
            let spectral: f64 = fhat
                .grid
                .nodes
                .iter()
                .zip(&fhat.grid.weights)
                .zip(&fhat.values)
                .map(|((&l, &w), v)| w * v.norm_sqr() * plancherel_weight(space, l))
                .sum();
            f.l2_norm().powi(2) / spectral
        }
    };
    cache.write().unwrap().insert(*space, c);
    Ok(c)
}

/// Even function on the line, stored on a grid of `[0, X]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenProfile {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// `g~(xi) = 2 int_0^inf g(x) cos(x xi) dx` at the nodes of `xi_grid`.
pub fn fourier1d_even(g: &EvenProfile, xi_grid: Grid) -> EvenProfile {
    let values = cosine_sum(&g.grid, &g.values, &xi_grid.nodes, 2.0);
    EvenProfile { grid: xi_grid, values }
}

/// Inverse of [`fourier1d_even`]: `(1/pi) int_0^inf g~(xi) cos(x xi) dxi`.
pub fn fourier1d_even_inverse(gt: &EvenProfile, x_grid: Grid) -> EvenProfile {
    let values = cosine_sum(&gt.grid, &gt.values, &x_grid.nodes, 1.0 / std::f64::consts::PI);
    EvenProfile { grid: x_grid, values }
}

fn cosine_sum(grid: &Grid, values: &[Complex64], out: &[f64], scale: f64) -> Vec<Complex64> {
    par::map(out, |&y| {
        grid.nodes
            .iter()
            .zip(&grid.weights)
            .zip(values)
            .map(|((&x, &w), &v)| v * (scale * w * (x * y).cos()))
            .sum()
    })
}

/// Abel transform `A_{S,R} f`: the even function whose Fourier transform is
/// the spherical transform of `f`. Evaluated on `x_grid`.
pub fn abel_on(space: &Space, f: &RadialProfile, x_grid: Grid) -> Result<EvenProfile> {
    let fhat = sft_forward(space, f)?;
    let spec = EvenProfile { grid: fhat.grid.clone(), values: fhat.values.clone() };
    Ok(fourier1d_even_inverse(&spec, x_grid))
}

pub fn abel(space: &Space, f: &RadialProfile) -> Result<EvenProfile> {
    abel_on(space, f, Grid::standard_radial())
}

/// Inverse Abel transform: spherical inversion of the Fourier transform of `g`.
pub fn abel_inverse(space: &Space, g: &EvenProfile) -> Result<RadialProfile> {
    let gt = fourier1d_even(g, Grid::standard_spectral());
    let fhat = SpectralProfile::from_samples(gt.grid, gt.values, TailKind::Schwartz)?;
    sft_inverse(space, &fhat)
}

/// Euclidean Abel transform in dimension `n`; the identity when `n = 1`.
pub fn abel_rn(n: u32, f: &RadialProfile) -> Result<EvenProfile> {
    if n == 1 {
        return Ok(EvenProfile { grid: f.grid.clone(), values: f.values.clone() });
    }
    let sp = Space::euclidean(n)?;
    if f.space != sp {
        return Err(HypError::InvalidParameter(format!("profile lives on {} but abel_rn was asked for n = {n}", f.space)));
    }
    abel_on(&sp, f, f.grid.clone())
}

/// `A = A_{R^n,R}^{-1} o A_{S,R}`: the radial function on `R^n` with the same
/// transform as `f`.
pub fn abel_transfer(space: &Space, n: u32, f: &RadialProfile) -> Result<RadialProfile> {
    let fhat = sft_forward(space, f)?;
    sft_inverse(&Space::euclidean(n)?, &fhat)
}

/// Direct Abel kernels, available where they have elementary form:
/// `(1/2) int_x^inf f(s) sinh s ds` on H^3 and `(1/2) int_x^inf f(s) s ds` on R^3.
pub fn abel_kernel<F: Fn(f64) -> f64 + Sync>(space: &Space, f: F, x: f64, s_max: f64) -> Result<f64> {
    let x = x.abs();
    if x >= s_max {
        return Ok(0.0);
    }
    let r = if space.is_h3() {
        integrate(|s| 0.5 * f(s) * s.sinh(), x, s_max, &[], 1e-15, 1e-13)
    } else if matches!(space, Space::Euclidean { n: 3 }) {
        integrate(|s| 0.5 * f(s) * s, x, s_max, &[], 1e-15, 1e-13)
    } else {
        return Err(HypError::Unsupported(format!("no elementary Abel kernel on {space}")));
    };
    Ok(r.value)
}

fn check_support_away_from_zero(fhat: &SpectralProfile) -> Result<()> {
    if fhat.support.0 > 0.0 {
        return Ok(());
    }
    if fhat.values.first().is_none_or(|v| *v != Complex64::new(0.0, 0.0)) {
        return Err(HypError::Support("weight-ratio multiplier needs a profile supported away from 0".into()));
    }
    Ok(())
}

/// `(|c(lambda)|^{-2} / lambda^{n-1}) kappa(lambda)`.
pub fn multiplier_m(space: &Space, fhat: &SpectralProfile) -> Result<SpectralProfile> {
    check_support_away_from_zero(fhat)?;
    let sp = *space;
    let n = space.dim() as i32;
    Ok(fhat.multiply(move |l| Complex64::new(plancherel_weight(&sp, l) / l.powi(n - 1), 0.0)))
}

pub fn multiplier_m_inverse(space: &Space, fhat: &SpectralProfile) -> Result<SpectralProfile> {
    check_support_away_from_zero(fhat)?;
    let sp = *space;
    let n = space.dim() as i32;
    Ok(fhat.multiply(move |l| Complex64::new(l.powi(n - 1) / plancherel_weight(&sp, l), 0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevSpec {
    pub beta: f64,
    pub homogeneous: bool,
}

/// `(C int w(lambda)^beta |fhat|^2 |c|^{-2} dlambda)^{1/2}` with
/// `w = lambda^2` or `lambda^2 + rho^2`.
pub fn sobolev_norm(space: &Space, fhat: &SpectralProfile, spec: SobolevSpec) -> Result<f64> {
    if !spec.beta.is_finite() || spec.beta < 0.0 {
        return Err(HypError::Domain(format!("Sobolev exponent must be finite and nonnegative, got {}", spec.beta)));
    }
    let c = inversion_constant(space)?;
    let rho2 = space.rho() * space.rho();
    let weight = |l: f64| {
        let w = if spec.homogeneous { l * l } else { l * l + rho2 };
        w.powf(spec.beta) * plancherel_weight(space, l)
    };
    let total = if fhat.is_analytic() && fhat.support.1.is_finite() {
        let (a, b) = fhat.support;
        let panels = ((b - a) / (a.max(1.0) * 0.05)).ceil().clamp(8.0, 4000.0) as usize;
        let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        let r = integrate(|l| weight(l) * fhat.eval(l).norm_sqr(), a, b, &breaks[1..panels], 0.0, 1e-13);
        r.value
    } else {
        if fhat.tail == TailKind::PowerDecay(0.0) {
            return Err(HypError::Tail("profile does not decay".into()));
        }
        fhat.grid
            .nodes
            .iter()
            .zip(&fhat.grid.weights)
            .zip(&fhat.values)
            .map(|((&l, &w), v)| w * weight(l) * v.norm_sqr())
            .sum()
    };
    Ok((c * total).sqrt())
}

/// Both sides of Pitt's inequality at `beta = 1/4`, `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PittReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for the zero function.
    pub ratio: Option<f64>,
}

/// `(int |h~|^2 |xi|^{-1/2})^{1/2} / (int |h|^2 |x|^{1/2})^{1/2}` for an even
/// `h` supported in `[-r2, -r1] u [r1, r2]`.
pub fn pitt_ratio<H: Fn(f64) -> f64 + Sync>(h: H, r1: f64, r2: f64) -> Result<PittReport> {
    if !(r1 >= 0.0 && r2 > r1) {
        return Err(HypError::Domain(format!("Pitt support must satisfy 0 <= r1 < r2, got ({r1}, {r2})")));
    }
    let xg = Grid::gauss(r1, r2, 64, 16);
    let hv: Vec<f64> = xg.nodes.iter().map(|&x| h(x)).collect();
    let rhs2: f64 = 2.0 * xg.nodes.iter().zip(&xg.weights).zip(&hv).map(|((&x, &w), &v)| w * v * v * x.sqrt()).sum::<f64>();
    let ht = |xi: f64| -> f64 { 2.0 * xg.nodes.iter().zip(&xg.weights).zip(&hv).map(|((&x, &w), &v)| w * v * (x * xi).cos()).sum::<f64>() };
    // xi = u^2 removes the |xi|^{-1/2} singularity: int |h~(u^2)|^2 2 du
    let width = r2 - r1;
    let u_max = (400.0 / width).sqrt() * 4.0;
    let ug = Grid::gauss(0.0, u_max, 400, 16);
    let lhs2: f64 = 2.0 * par::map(&ug.nodes, |&u| ht(u * u).powi(2) * 2.0).iter().zip(&ug.weights).map(|(v, w)| v * w).sum::<f64>();
    let lhs = lhs2.sqrt();
    let rhs = rhs2.sqrt();
    let ratio = if rhs == 0.0 { None } else { Some(lhs / rhs) };
    Ok(PittReport { lhs, rhs, ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RieszReport {
    pub beta: f64,
    /// Constant fitted at `x = 0`.
    pub calibrated_c: f64,
    /// `2 Gamma(beta) cos(pi beta / 2)`.
    pub reference_c: f64,
    pub residual: f64,
}

/// Compare the Riesz potential `int h(y) |x - y|^{beta-1} dy` with the inverse
/// Fourier transform of `C |xi|^{-beta} h~(xi)` at points of `[0, x_max/2]`,
/// after fitting `C` at `x = 0`. `h` is even and negligible beyond `x_max`.
pub fn riesz_identity_check<H: Fn(f64) -> f64 + Sync>(h: H, x_max: f64, beta: f64) -> Result<RieszReport> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(HypError::Domain(format!("Riesz exponent must lie in (0, 1), got {beta}")));
    }
    let reference_c = 2.0 * gamma_real(beta) * (std::f64::consts::PI * beta / 2.0).cos();
    let xg = Grid::gauss(0.0, x_max, 64, 16);
    let hv: Vec<f64> = xg.nodes.iter().map(|&x| h(x)).collect();
    if hv.iter().all(|&v| v == 0.0) {
        return Ok(RieszReport { beta, calibrated_c: reference_c, reference_c, residual: 0.0 });
    }
    let ht = |xi: f64| -> f64 { 2.0 * xg.nodes.iter().zip(&xg.weights).zip(&hv).map(|((&x, &w), &v)| w * v * (x * xi).cos()).sum::<f64>() };
    let h0 = ht(0.0).abs().max(hv.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut xi_max = 1.0;
    while xi_max < 1e4 && (ht(xi_max).abs() > 1e-15 * h0 || ht(0.7 * xi_max).abs() > 1e-15 * h0) {
        xi_max *= 1.5;
    }
    // xi = v^{1/(1-beta)} removes the xi^{-beta} singularity
    let p = 1.0 / (1.0 - beta);
    let v_max = xi_max.powf(1.0 - beta);
    let vg = Grid::gauss(0.0, v_max, 200, 16);
    let htv: Vec<f64> = par::map(&vg.nodes, |&v| ht(v.powf(p)));
    let spectral = |x: f64| -> f64 {
        vg.nodes.iter().zip(&vg.weights).zip(&htv).map(|((&v, &w), &t)| w * p * t * (v.powf(p) * x).cos()).sum::<f64>()
            / std::f64::consts::PI
    };
    // |x - y|^{beta-1} dy = du / beta with u = |x - y|^beta
    let direct = |x: f64| -> f64 {
        let reach = (x_max + x).powf(beta);
        let f = |u: f64| (h(x + u.powf(1.0 / beta)) + h(x - u.powf(1.0 / beta))) / beta;
        integrate(f, 0.0, reach, &[], 1e-14, 1e-12).value
    };
    let xs: Vec<f64> = (0..9).map(|k| k as f64 * x_max / 16.0).collect();
    let pairs: Vec<(f64, f64)> = par::map(&xs, |&x| (direct(x), spectral(x)));
    let calibrated_c = pairs[0].0 / pairs[0].1;
    let scale = pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let residual = pairs.iter().map(|p| (p.0 - calibrated_c * p.1).abs()).fold(0.0, f64::max) / scale;
    Ok(RieszReport { beta, calibrated_c, reference_c, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(space: &Space, b: f64) -> RadialProfile {
        RadialProfile::from_fn(space, Grid::standard_radial(), move |s| Complex64::new((-b * s * s).exp(), 0.0))
    }

    #[test]
    fn inversion_constants() {
        assert!((inversion_constant(&Space::h3()).unwrap() - 2.0 / PI).abs() < 1e-10);
        assert!((inversion_constant(&Space::euclidean(3).unwrap()).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((inversion_constant(&Space::euclidean(2).unwrap()).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn euclidean_gaussian_transform() {
        // R^3: int e^{-s^2/2} sin(ls)/(ls) s^2 ds = sqrt(pi/2) e^{-l^2/2}
        let sp = Space::euclidean(3).unwrap();
        let f = gaussian(&sp, 0.5);
        let fhat = sft_forward(&sp, &f).unwrap();
        for (&l, v) in fhat.lambda().iter().zip(&fhat.values).step_by(37) {
            let want = (PI / 2.0).sqrt() * (-l * l / 2.0).exp();
            assert!((v.re - want).abs() < 1e-12, "lambda={l}");
        }
    }

    #[test]
    fn transform_bounded_by_l1() {
        let sp = Space::h3();
        let f = gaussian(&sp, 1.0);
        let l1: f64 = f.grid.nodes.iter().zip(&f.grid.weights).map(|(&s, &w)| w * (-s * s).exp() * sp.density_unchecked(s)).sum();
        let fhat = sft_forward(&sp, &f).unwrap();
        assert!(fhat.values.iter().all(|v| v.norm() <= l1 * (1.0 + 1e-12)));
    }

    #[test]
    fn roundtrip_and_plancherel_h3() {
        let sp = Space::h3();
        let f = RadialProfile::from_fn(&sp, Grid::standard_radial(), |s| Complex64::new((1.0 + 0.5 * s * s) * (-1.5 * s * s).exp(), 0.0));
        let fhat = sft_forward(&sp, &f).unwrap();
        let back = sft_inverse(&sp, &fhat).unwrap();
        assert!(relative_l2_error(&f, &back).unwrap() < 1e-10);
        let n = sobolev_norm(&sp, &fhat, SobolevSpec { beta: 0.0, homogeneous: true }).unwrap();
        assert!((n / f.l2_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn roundtrip_damek_ricci() {
        for sp in [Space::damek_ricci(2, 1).unwrap(), Space::damek_ricci(4, 3).unwrap()] {
            let f = RadialProfile::from_fn(&sp, Grid::standard_radial(), |s| Complex64::new((1.0 + s * s) * (-1.2 * s * s).exp(), 0.0));
            let fhat = sft_forward(&sp, &f).unwrap();
            let back = sft_inverse(&sp, &fhat).unwrap();
            let err = relative_l2_error(&f, &back).unwrap();
            assert!(err < 1e-7, "{sp}: {err}");
            let n = sobolev_norm(&sp, &fhat, SobolevSpec { beta: 0.0, homogeneous: true }).unwrap();
            assert!((n / f.l2_norm() - 1.0).abs() < 1e-7, "{sp}");
        }
    }

    #[test]
    fn linearity() {
        let sp = Space::damek_ricci(2, 1).unwrap();
        let f = gaussian(&sp, 1.0);
        let g = gaussian(&sp, 2.0);
        let h = RadialProfile::from_values(&sp, f.grid.clone(), f.values.iter().zip(&g.values).map(|(a, b)| a * 2.0 - b * 3.0).collect()).unwrap();
        let (ff, gg, hh) = (sft_forward(&sp, &f).unwrap(), sft_forward(&sp, &g).unwrap(), sft_forward(&sp, &h).unwrap());
        for i in 0..hh.values.len() {
            assert!((hh.values[i] - (ff.values[i] * 2.0 - gg.values[i] * 3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn abel_matches_kernel_on_h3() {
        let sp = Space::h3();
        let f = gaussian(&sp, 1.0);
        let g = abel(&sp, &f).unwrap();
        for (x, v) in g.grid.nodes.iter().zip(&g.values).step_by(53) {
            let k = abel_kernel(&sp, |s| (-s * s).exp(), *x, 12.0).unwrap();
            assert!((v.re - k).abs() < 1e-10 * k.abs().max(1e-3), "x={x}: {} vs {k}", v.re);
        }
        let back = abel_inverse(&sp, &g).unwrap();
        assert!(relative_l2_error(&f, &back).unwrap() < 1e-8);
    }

    #[test]
    fn abel_rn_degenerate_and_r3() {
        let sp = Space::euclidean(3).unwrap();
        let f = gaussian(&sp, 1.0);
        let g = abel_rn(3, &f).unwrap();
        let x = g.grid.nodes[100];
        let k = abel_kernel(&sp, |s| (-s * s).exp(), x, 12.0).unwrap();
        assert!((g.values[100].re - k).abs() < 1e-10);
        let one = abel_rn(1, &f).unwrap();
        assert_eq!(one.values, f.values);
    }

    #[test]
    fn multiplier_roundtrip_and_support() {
        let sp = Space::damek_ricci(2, 1).unwrap();
        let k = SpectralProfile::from_fn(|l| Complex64::new((l - 2.0) * (4.0 - l), 0.3), Grid::gauss(2.0, 4.0, 4, 16), (2.0, 4.0), TailKind::CompactSupport);
        let m = multiplier_m(&sp, &k).unwrap();
        let back = multiplier_m_inverse(&sp, &m).unwrap();
        for (a, b) in k.values.iter().zip(&back.values) {
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300) * 4.0);
        }
        let h3 = Space::h3();
        let mh = multiplier_m(&h3, &k).unwrap();
        for (a, b) in k.values.iter().zip(&mh.values) {
            assert!((b / a - 1.0).norm() < 1e-12);
        }
        let touching = SpectralProfile::from_fn(|_| Complex64::new(1.0, 0.0), Grid::gauss(0.0, 1.0, 1, 8), (0.0, 1.0), TailKind::CompactSupport);
        assert!(matches!(multiplier_m(&sp, &touching), Err(HypError::Support(_))));
    }

    #[test]
    fn sobolev_properties() {
        let sp = Space::h3();
        let f = gaussian(&sp, 1.0);
        let fhat = sft_forward(&sp, &f).unwrap();
        let hom = sobolev_norm(&sp, &fhat, SobolevSpec { beta: 0.25, homogeneous: true }).unwrap();
        let inh = sobolev_norm(&sp, &fhat, SobolevSpec { beta: 0.25, homogeneous: false }).unwrap();
        assert!(hom <= inh);
        let band = SpectralProfile::from_fn(|l| Complex64::new((l - 1.0) * (3.0 - l), 0.0), Grid::gauss(1.0, 3.0, 4, 16), (1.0, 3.0), TailKind::CompactSupport);
        let mut prev = 0.0;
        for beta in [0.0, 0.25, 0.5, 1.0] {
            let n = sobolev_norm(&sp, &band, SobolevSpec { beta, homogeneous: true }).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn euclidean_sobolev_scaling() {
        let n = 3u32;
        let sp = Space::euclidean(n).unwrap();
        let base = |l: f64| Complex64::new((-(l - 3.0) * (l - 3.0)).exp(), 0.0);
        let f = SpectralProfile::from_fn(base, Grid::gauss(0.0, 12.0, 12, 16), (0.0, 12.0), TailKind::Schwartz);
        let s0 = sobolev_norm(&sp, &f, SobolevSpec { beta: 0.25, homogeneous: true }).unwrap();
        for eta in [2.0, 5.0] {
            let scaled = SpectralProfile::from_fn(
                move |l| base(l / eta) * eta.powi(-(n as i32)),
                Grid::gauss(0.0, 12.0 * eta, 12, 16),
                (0.0, 12.0 * eta),
                TailKind::Schwartz,
            );
            let s = sobolev_norm(&sp, &scaled, SobolevSpec { beta: 0.25, homogeneous: true }).unwrap();
            let law = eta.powf(0.25 - n as f64 / 2.0);
            assert!((s / s0 / law - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_gaussian_pair() {
        let g = EvenProfile {
            grid: Grid::gauss(0.0, 14.0, 28, 16),
            values: Grid::gauss(0.0, 14.0, 28, 16).nodes.iter().map(|&x| Complex64::new((-x * x / 2.0).exp(), 0.0)).collect(),
        };
        let gt = fourier1d_even(&g, Grid::gauss(0.0, 14.0, 28, 16));
        for (xi, v) in gt.grid.nodes.iter().zip(&gt.values).step_by(17) {
            assert!((v.re - (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp()).abs() < 1e-13);
        }
        let back = fourier1d_even_inverse(&gt, g.grid.clone());
        for (a, b) in g.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pitt_scale_invariance() {
        let bump = |x: f64| if x > 1.0 && x < 2.0 { (-1.0 / ((x - 1.0) * (2.0 - x))).exp() } else { 0.0 };
        let r = pitt_ratio(bump, 1.0, 2.0).unwrap();
        let ratio = r.ratio.unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
        let sigma = 3.0;
        let r2 = pitt_ratio(move |x| bump(x / sigma), sigma, 2.0 * sigma).unwrap();
        assert!((r2.ratio.unwrap() / ratio - 1.0).abs() < 1e-6);
        assert!(pitt_ratio(|_| 0.0, 1.0, 2.0).unwrap().ratio.is_none());
    }

    #[test]
    fn riesz_identity_on_gaussian() {
        let r = riesz_identity_check(|x| (-x * x).exp(), 7.0, 0.5).unwrap();
        assert!(r.residual < 1e-4, "{r:?}");
        assert!((r.calibrated_c / r.reference_c - 1.0).abs() < 1e-4, "{r:?}");
        assert_eq!(riesz_identity_check(|_| 0.0, 7.0, 0.5).unwrap().residual, 0.0);
        assert!(riesz_identity_check(|x| (-x * x).exp(), 7.0, 1.0).is_err());
    }
}
