//! Schrodinger propagators `S_t f(s) = C int phi_lambda(s) e^{it(lambda^2+rho^2)}
//! fhat(lambda) w(lambda) dlambda` on Damek-Ricci spaces and Euclidean space,
//! evaluation along curve families, linearized maximal operators and their
//! decompositions.

use crate::error::{HypError, Result};
use crate::geometry::{curve_time_bound, Annulus, CurveFamily, Space};
use crate::par;
use crate::quadrature::{integrate, osc_integral, smooth_cutoff, OscillatorySpec};
use crate::specfun::bessel::bessel_j_norm;
use crate::specfun::spherical::{bessel_series, density_ratio_sqrt, phi_closed_h3, PhiTable, DEFAULT_R0};
use crate::transforms::{inversion_constant, plancherel_weight, Grid, RadialProfile, SpectralProfile, TailKind};
use num_complex::Complex64;
use serde::Serialize;

/// Default relative tolerance for propagator quadratures.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Radius below which the H^3 and R^3 propagators use the direct route
/// instead of the two-branch split.
const SPLIT_RADIUS: f64 = 0.5;

/// Propagator for one spectral profile on one space.
pub struct Propagator<'a> {
    space: Space,
    fhat: &'a SpectralProfile,
    c: f64,
    tol: f64,
    lo: f64,
    hi: f64,
    scale: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(space: &Space, fhat: &'a SpectralProfile, tol: f64) -> Result<Propagator<'a>> {
        if !(tol > 0.0) {
            return Err(HypError::Domain(format!("tolerance must be positive, got {tol}")));
        }
        let c = inversion_constant(space)?;
        let lo = fhat.support.0.max(0.0);
        let mut hi = fhat.support.1;
        if !hi.is_finite() {
            if fhat.is_analytic() {
                return Err(HypError::Tail("analytic spectral profiles need a finite support bound".into()));
            }
            hi = *fhat.grid.nodes.last().unwrap();
        }
        let mut p = Propagator { space: *space, fhat, c, tol, lo, hi, scale: 0.0 };
        p.scale = p.compute_scale();
        Ok(p)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn inversion_constant(&self) -> f64 {
        self.c
    }

    fn compute_scale(&self) -> f64 {
        if self.fhat.is_analytic() {
            let panels = 64usize;
            let breaks: Vec<f64> = (1..panels).map(|i| self.lo + (self.hi - self.lo) * i as f64 / panels as f64).collect();
            let r = integrate(
                |l| self.fhat.eval(l).norm() * plancherel_weight(&self.space, l),
                self.lo,
                self.hi,
                &breaks,
                0.0,
                1e-12,
            );
            self.c * r.value
        } else {
            self.c
                * self
                    .fhat
                    .grid
                    .nodes
                    .iter()
                    .zip(&self.fhat.grid.weights)
                    .zip(&self.fhat.values)
                    .map(|((&l, &w), v)| w * v.norm() * plancherel_weight(&self.space, l))
                    .sum::<f64>()
        }
    }

    /// `C int |fhat| w dlambda`, which dominates `|S_t f(s)|` everywhere.
    pub fn dominating_bound(&self) -> f64 {
        self.scale
    }

    fn rho2(&self) -> f64 {
        self.space.rho() * self.space.rho()
    }

    fn has_split(&self) -> bool {
        self.space.is_h3() || matches!(self.space, Space::Euclidean { n: 3 })
    }

    fn spec<'g>(&self, amp: &'g (dyn Fn(f64) -> Complex64 + Sync), a: f64, t: f64) -> OscillatorySpec<'g> {
        OscillatorySpec::new(amp, self.lo, self.hi)
            .phase(a, t, t * self.rho2())
            .abs_tol(self.tol * self.scale.max(f64::MIN_POSITIVE))
            .max_panels(20_000)
    }

    /// The two branches `(T_+, T_-)` of the split `phi = (e^{i lambda s} - e^{-i lambda s}) / (2 i lambda sinh s)`
    /// (with `s` in place of `sinh s` on R^3); their sum is `S_t f(s)`.
    pub fn eval_split(&self, s: f64, t: f64) -> Result<(Complex64, Complex64)> {
        if !self.has_split() {
            return Err(HypError::Unsupported(format!("the branch split is exact only on H^3 and R^3, not {}", self.space)));
        }
        if !(s > 0.0) {
            return Err(HypError::Pole("the branch split needs s > 0".into()));
        }
        let denom = if self.space.is_h3() { 2.0 * s.sinh() } else { 2.0 * s };
        let k = self.c / denom;
        let plus = |l: f64| self.fhat.eval(l) * Complex64::new(0.0, -l * k);
        let minus = |l: f64| self.fhat.eval(l) * Complex64::new(0.0, l * k);
        let rp = osc_integral(&self.spec(&plus, s, t), self.tol)?;
        let rm = osc_integral(&self.spec(&minus, -s, t), self.tol)?;
        Ok((rp.value, rm.value))
    }

    /// Quadrature with the spherical function in the amplitude (H^3 and
    /// Euclidean spaces).
    pub fn eval_direct(&self, s: f64, t: f64) -> Result<Complex64> {
        if !(s >= 0.0) {
            return Err(HypError::Domain(format!("radius must be nonnegative, got {s}")));
        }
        let sp = self.space;
        let kernel = move |l: f64| -> f64 {
            match sp {
                Space::Euclidean { .. } => bessel_j_norm(sp.bessel_order(), l * s),
                _ => phi_closed_h3(l, s),
            }
        };
        if !(sp.is_h3() || sp.is_euclidean()) {
            return Err(HypError::Unsupported(format!("direct amplitude quadrature needs a closed-form kernel; {sp} uses the spectral sum")));
        }
        let amp = |l: f64| self.fhat.eval(l) * (self.c * kernel(l) * plancherel_weight(&sp, l));
        let mut spec = self.spec(&amp, 0.0, t);
        if s > 0.0 {
            // resolve the kernel oscillation with panels of about one radian
            let step = (1.0 / s).max((self.hi - self.lo) / 4000.0);
            let mut x = self.lo + step;
            while x < self.hi {
                spec.breakpoints.push(x);
                x += step;
            }
        }
        Ok(osc_integral(&spec, self.tol)?.value)
    }

    /// `S_t f(s)` by the preferred route for the space.
    pub fn eval(&self, s: f64, t: f64) -> Result<Complex64> {
        if !self.fhat.is_analytic() {
            return Ok(self.eval_spectral(&[(s, t)])?[0]);
        }
        if self.has_split() && s >= SPLIT_RADIUS {
            let (p, m) = self.eval_split(s, t)?;
            Ok(p + m)
        } else if self.space.is_h3() || self.space.is_euclidean() {
            self.eval_direct(s, t)
        } else {
            Ok(self.eval_spectral(&[(s, t)])?[0])
        }
    }

    /// Many points at once; Damek-Ricci spaces share one spherical-function
    /// table across all radii.
    pub fn eval_many(&self, pts: &[(f64, f64)]) -> Result<Vec<Complex64>> {
        if self.fhat.is_analytic() && (self.space.is_h3() || self.space.is_euclidean()) {
            par::map(pts, |&(s, t)| self.eval(s, t)).into_iter().collect()
        } else {
            self.eval_spectral(pts)
        }
    }

    /// Gauss-Legendre quadrature in frequency against a tabulated kernel.
    pub fn eval_spectral(&self, pts: &[(f64, f64)]) -> Result<Vec<Complex64>> {
        if pts.iter().any(|p| !(p.0 >= 0.0)) {
            return Err(HypError::Domain("radii must be nonnegative".into()));
        }
        let grid = if self.fhat.is_analytic() {
            let t_max = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
            let r_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
            let rate = 2.0 * t_max * self.hi + r_max + 1.0;
            let panels = (((self.hi - self.lo) * rate / 6.0).ceil() as usize).clamp(8, 20_000);
            Grid::gauss(self.lo, self.hi, panels, 16)
        } else {
            self.fhat.grid.clone()
        };
        let mut radii: Vec<f64> = pts.iter().map(|p| p.0).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let table = PhiTable::new(&self.space, &grid.nodes, &radii)?;
        let f: Vec<Complex64> = grid.nodes.iter().map(|&l| self.fhat.eval(l)).collect();
        let w: Vec<f64> =
            grid.nodes.iter().zip(&grid.weights).map(|(&l, &w)| self.c * w * plancherel_weight(&self.space, l)).collect();
        let rho2 = self.rho2();
        Ok(par::map(pts, |&(s, t)| {
            let j = radii.partition_point(|&r| r < s);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..grid.nodes.len() {
                let l = grid.nodes[i];
                acc += f[i] * Complex64::from_polar(w[i] * table.values[i][j], t * (l * l + rho2));
            }
            acc
        }))
    }
}

/// `S_t f(s)` on a Damek-Ricci space.
pub fn schrodinger_s(space: &Space, fhat: &SpectralProfile, s: f64, t: f64) -> Result<Complex64> {
    if space.is_euclidean() {
        return Err(HypError::InvalidParameter("use schrodinger_rn on Euclidean space".into()));
    }
    Propagator::new(space, fhat, DEFAULT_TOL)?.eval(s, t)
}

/// Euclidean propagator `int J_{(n-2)/2}(lambda s) e^{it lambda^2} Ff(lambda) C lambda^{n-1} dlambda`.
pub fn schrodinger_rn(n: u32, fhat: &SpectralProfile, s: f64, t: f64) -> Result<Complex64> {
    Propagator::new(&Space::euclidean(n)?, fhat, DEFAULT_TOL)?.eval(s, t)
}

/// Propagation along a curve family over an `(s, t)` grid.
#[derive(Clone, Debug)]
pub struct PropagationRequest<'a> {
    pub space: Space,
    pub fhat: &'a SpectralProfile,
    pub curve: CurveFamily,
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub t_max: f64,
    pub tol: f64,
    /// Golden-section refinement of the supremum around the grid maximizer.
    pub refine: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSlice {
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    /// `values[i][j]` at `(s_nodes[i], t_nodes[j])`.
    pub values: Vec<Vec<Complex64>>,
    pub sup_t: Vec<f64>,
    pub argmax_t: Vec<f64>,
    /// Increase of the supremum produced by the local refinement.
    pub refinement_gain: Vec<f64>,
}

fn validate_request(req: &PropagationRequest) -> Result<()> {
    if req.s_nodes.is_empty() || req.t_nodes.is_empty() {
        return Err(HypError::InvalidParameter("propagation needs nonempty grids".into()));
    }
    if req.t_nodes.iter().any(|t| t.abs() > req.t_max * (1.0 + 1e-12)) {
        return Err(HypError::InvalidParameter(format!("time nodes must lie in [-{0}, {0}]", req.t_max)));
    }
    let s_min = req.s_nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = req.s_nodes.iter().copied().fold(0.0, f64::max);
    if s_min > 0.0 && s_max > s_min {
        let bound = curve_time_bound(&req.curve, &Annulus::new(s_min, s_max)?)?;
        if !(req.t_max < bound) {
            return Err(HypError::Precondition(format!("T = {} is not below the admissible bound {bound}", req.t_max)));
        }
    }
    Ok(())
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Number of grid local maxima refined per slice.
const REFINE_CANDIDATES: usize = 3;
const ZOOM_POINTS: usize = 17;
const ZOOM_LEVELS: usize = 2;

/// Supremum of `f` given its samples `values` on the increasing grid `ts`:
/// the best grid value, improved by zooming into the brackets of the largest
/// local maxima and finishing with golden-section search.
/// Returns `(sup, argmax, gain over the grid maximum)`.
pub fn refine_sup<F: Fn(f64) -> Result<f64>>(f: &F, ts: &[f64], values: &[f64]) -> Result<(f64, f64, f64)> {
    let n = ts.len();
    let (mut jbest, mut best) = (0, f64::NEG_INFINITY);
    for (j, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            jbest = j;
        }
    }
    let grid_best = best;
    let mut arg = ts[jbest];
    if n < 2 {
        return Ok((best, arg, 0.0));
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| (j == 0 || values[j] >= values[j - 1]) && (j + 1 == n || values[j] >= values[j + 1]))
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(REFINE_CANDIDATES);
    for j in peaks {
        let mut a = ts[j.saturating_sub(1)];
        let mut b = ts[(j + 1).min(n - 1)];
        for _ in 0..ZOOM_LEVELS {
            let h = (b - a) / (ZOOM_POINTS + 1) as f64;
            let (mut kb, mut vb) = (0, f64::NEG_INFINITY);
            for k in 1..=ZOOM_POINTS {
                let v = f(a + h * k as f64)?;
                if v > vb {
                    vb = v;
                    kb = k;
                }
            }
            if vb > best {
                best = vb;
                arg = a + h * kb as f64;
            }
            let c = a + h * kb as f64;
            a = c - h;
            b = c + h;
        }
        let (tg, vg) = golden_max(f, a, b, 24)?;
        if vg > best {
            best = vg;
            arg = tg;
        }
    }
    Ok((best, arg, best - grid_best))
}

/// `{0}` together with `+-t_max (t_min/t_max)^{k/(per_side-1)}`, increasing.
pub fn geometric_time_grid(t_max: f64, t_min: f64, per_side: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_min > 0.0 && t_min < t_max && per_side >= 2) {
        return Err(HypError::InvalidParameter(format!(
            "geometric time grid needs 0 < t_min < t_max and two nodes per side (t_min={t_min}, t_max={t_max})"
        )));
    }
    let ratio = (t_min / t_max).powf(1.0 / (per_side - 1) as f64);
    let pos: Vec<f64> = (0..per_side).map(|k| t_max * ratio.powi(k as i32)).collect();
    let mut out: Vec<f64> = pos.iter().map(|t| -t).collect();
    out.push(0.0);
    out.extend(pos.iter().rev());
    Ok(out)
}

pub fn propagate_along_curve(req: &PropagationRequest) -> Result<FieldSlice> {
    validate_request(req)?;
    let prop = Propagator::new(&req.space, req.fhat, req.tol)?;
    let nt = req.t_nodes.len();
    let pts: Vec<(f64, f64)> = req
        .s_nodes
        .iter()
        .flat_map(|&s| req.t_nodes.iter().map(move |&t| (s, t)))
        .map(|(s, t)| (req.curve.radial_eval(s, t), t))
        .collect();
    let flat = prop.eval_many(&pts)?;
    let values: Vec<Vec<Complex64>> = flat.chunks(nt).map(|c| c.to_vec()).collect();
    let mut order: Vec<usize> = (0..nt).collect();
    order.sort_by(|&a, &b| req.t_nodes[a].total_cmp(&req.t_nodes[b]));
    let ts: Vec<f64> = order.iter().map(|&j| req.t_nodes[j]).collect();
    let rows: Vec<Result<(f64, f64, f64)>> = par::map_range(req.s_nodes.len(), |i| {
        let s = req.s_nodes[i];
        let mags: Vec<f64> = order.iter().map(|&j| values[i][j].norm()).collect();
        if !req.refine {
            let (mut jb, mut vb) = (0, f64::NEG_INFINITY);
            for (j, &v) in mags.iter().enumerate() {
                if v > vb {
                    vb = v;
                    jb = j;
                }
            }
            return Ok((vb, ts[jb], 0.0));
        }
        let eval = |t: f64| -> Result<f64> { Ok(prop.eval_many(&[(req.curve.radial_eval(s, t), t)])?[0].norm()) };
        refine_sup(&eval, &ts, &mags)
    });
    let mut sup_t = Vec::with_capacity(rows.len());
    let mut argmax_t = Vec::with_capacity(rows.len());
    let mut gain = Vec::with_capacity(rows.len());
    for r in rows {
        let (v, t, g) = r?;
        sup_t.push(v);
        argmax_t.push(t);
        gain.push(g);
    }
    Ok(FieldSlice {
        s_nodes: req.s_nodes.clone(),
        t_nodes: req.t_nodes.clone(),
        values,
        sup_t,
        argmax_t,
        refinement_gain: gain,
    })
}

/// `T_gamma f(s) = S_{t(s)} f(gamma_s(t(s)))` at each node.
pub fn linearized_t<T: Fn(f64) -> f64>(
    space: &Space,
    fhat: &SpectralProfile,
    curve: &CurveFamily,
    t_of_s: T,
    s_nodes: &[f64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    let prop = Propagator::new(space, fhat, tol)?;
    let pts: Vec<(f64, f64)> = s_nodes.iter().map(|&s| (curve.radial_eval(s, t_of_s(s)), t_of_s(s))).collect();
    prop.eval_many(&pts)
}

/// Branch terms of the linearized operator on H^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H3Terms {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
}

pub fn term_decomposition_h3<T: Fn(f64) -> f64>(
    fhat: &SpectralProfile,
    curve: &CurveFamily,
    t_of_s: T,
    s_nodes: &[f64],
    tol: f64,
) -> Result<Vec<H3Terms>> {
    let h3 = Space::h3();
    let prop = Propagator::new(&h3, fhat, tol)?;
    let pts: Vec<(f64, f64)> = s_nodes.iter().map(|&s| (curve.radial_eval(s, t_of_s(s)), t_of_s(s))).collect();
    par::map(&pts, |&(r, t)| {
        let (t1, t2) = prop.eval_split(r, t)?;
        Ok(H3Terms { t1, t2, t3: Complex64::new(0.0, 0.0) })
    })
    .into_iter()
    .collect()
}

/// Leading Bessel term, remainder and the a-priori bound on the remainder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesselTerms {
    pub t4: Complex64,
    pub t5: Complex64,
    pub t5_bound: f64,
}

pub fn bessel_decomposition<T: Fn(f64) -> f64>(
    space: &Space,
    fhat: &SpectralProfile,
    curve: &CurveFamily,
    t_of_s: T,
    s_nodes: &[f64],
    tol: f64,
) -> Result<Vec<BesselTerms>> {
    if space.is_euclidean() {
        return Err(HypError::InvalidParameter("the Bessel decomposition is defined on Damek-Ricci spaces".into()));
    }
    let pts: Vec<(f64, f64)> = s_nodes.iter().map(|&s| (curve.radial_eval(s, t_of_s(s)), t_of_s(s))).collect();
    if let Some(&(r, _)) = pts.iter().find(|p| p.0 > DEFAULT_R0) {
        return Err(HypError::OutOfRange(format!("curve radius {r} exceeds the series radius {DEFAULT_R0}")));
    }
    let total = linearized_t(space, fhat, curve, &t_of_s, s_nodes, tol)?;
    let prop = Propagator::new(space, fhat, tol)?;
    let series = bessel_series(space, 0);
    let alpha = space.bessel_order();
    let c = prop.c;
    let rho2 = prop.rho2();
    let (lo, hi) = (prop.lo, prop.hi);
    let sp = *space;
    let out: Vec<Result<BesselTerms>> = par::map_range(pts.len(), |i| {
        let (r, t) = pts[i];
        let pref = density_ratio_sqrt(&sp, r);
        let amp = |l: f64| fhat.eval(l) * (c * pref * bessel_j_norm(alpha, l * r) * plancherel_weight(&sp, l));
        let mut spec = OscillatorySpec::new(&amp, lo, hi).phase(0.0, t, t * rho2).abs_tol(tol * prop.scale).max_panels(20_000);
        if r > 0.0 {
            let step = (1.0 / r).max((hi - lo) / 4000.0);
            let mut x = lo + step;
            while x < hi {
                spec.breakpoints.push(x);
                x += step;
            }
        }
        let t4 = osc_integral(&spec, tol)?.value;
        let bound_amp = |l: f64| fhat.eval(l).norm() * c * pref * series.error_bound(l, r) * plancherel_weight(&sp, l);
        let bound = integrate(bound_amp, lo, hi, &[], 0.0, 1e-8).value;
        Ok(BesselTerms { t4, t5: total[i] - t4, t5_bound: bound })
    });
    out.into_iter().collect()
}

/// Both sides of the parabolic rescaling identity
/// `S_t f(s + C7 t^{1/2}) = S_{t/eta^2} f_eta((s + C7 t^{1/2}) / eta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RescaleReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// `fhat` is the Euclidean transform of `f`; the transform of `f_eta(x) = f(eta x)`
/// is `eta^{-n} fhat(lambda / eta)`.
pub fn parabolic_rescale_check(n: u32, fhat: &SpectralProfile, c7: f64, eta: f64, s: f64, t: f64) -> Result<RescaleReport> {
    if !(eta > 0.0) {
        return Err(HypError::Domain(format!("scale must be positive, got {eta}")));
    }
    let scaled = scale_profile(fhat, n, eta)?;
    let r = s + c7 * t.abs().sqrt();
    let lhs = schrodinger_rn(n, fhat, r, t)?;
    let rhs = schrodinger_rn(n, &scaled, s / eta + c7 * (t / (eta * eta)).abs().sqrt(), t / (eta * eta))?;
    Ok(RescaleReport { lhs, rhs, residual: (lhs - rhs).norm() })
}

/// Spectral profile of `f(eta x)` in dimension `n`.
pub fn scale_profile(fhat: &SpectralProfile, n: u32, eta: f64) -> Result<SpectralProfile> {
    if !fhat.is_analytic() {
        return Err(HypError::InvalidParameter("rescaling needs an analytic spectral profile".into()));
    }
    let base = fhat.clone();
    let (a, b) = fhat.support;
    let k = eta.powi(-(n as i32));
    let grid = Grid {
        nodes: fhat.grid.nodes.iter().map(|l| l * eta).collect(),
        weights: fhat.grid.weights.iter().map(|w| w * eta).collect(),
    };
    Ok(SpectralProfile::from_fn(move |l| base.eval(l / eta) * k, grid, (a * eta, b * eta), fhat.tail))
}

/// `fhat = psi_1 fhat + psi_2 fhat` with `psi_1 = mu` supported in `[0, 2]` and
/// `psi_2 = 1 - mu` supported in `[1, inf)`.
pub fn littlewood_paley_split(fhat: &SpectralProfile) -> (SpectralProfile, SpectralProfile) {
    let mut low = fhat.multiply(|l| Complex64::new(smooth_cutoff(l), 0.0));
    let mut high = fhat.multiply(|l| Complex64::new(1.0 - smooth_cutoff(l), 0.0));
    low.support = (fhat.support.0, fhat.support.1.min(2.0));
    high.support = (fhat.support.0.max(1.0), fhat.support.1);
    if low.support.1 < low.support.0 {
        low.support = (0.0, 0.0);
        low.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    }
    (low, high)
}

/// Group property checked on the multiplier side: propagate `f` by `t1` on
/// the radial grid, transform back, multiply by `e^{i t2 kappa}` and compare
/// with `e^{i (t1 + t2) kappa} fhat`. Returns the maximal deviation relative
/// to `max |fhat|`.
pub fn group_property_residual(space: &Space, f: &RadialProfile, t1: f64, t2: f64) -> Result<f64> {
    let fhat = crate::transforms::sft_forward(space, f)?;
    let rho2 = space.rho() * space.rho();
    let evolved = fhat.multiply(move |l| Complex64::from_polar(1.0, t1 * (l * l + rho2)));
    let g = crate::transforms::sft_inverse_on(space, &evolved, f.grid.clone())?;
    let ghat = crate::transforms::sft_forward(space, &g)?;
    let scale = fhat.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for ((&l, a), b) in fhat.grid.nodes.iter().zip(&fhat.values).zip(&ghat.values) {
        let lhs = b * Complex64::from_polar(1.0, t2 * (l * l + rho2));
        let rhs = a * Complex64::from_polar(1.0, (t1 + t2) * (l * l + rho2));
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst / scale)
}

/// Radial profile `S_t f` on the grid of `f`, by spectral quadrature.
pub fn propagate_profile(space: &Space, f: &RadialProfile, t: f64) -> Result<RadialProfile> {
    let fhat = crate::transforms::sft_forward(space, f)?;
    let rho2 = space.rho() * space.rho();
    let evolved = fhat.multiply(move |l| Complex64::from_polar(1.0, t * (l * l + rho2)));
    crate::transforms::sft_inverse_on(space, &evolved, f.grid.clone())
}

/// Gaussian spectral profile `exp(-(lambda - center)^2 / (2 width^2))`,
/// truncated at eight widths.
pub fn gaussian_band(center: f64, width: f64) -> SpectralProfile {
    let lo = (center - 8.0 * width).max(0.0);
    let hi = center + 8.0 * width;
    let panels = 64;
    SpectralProfile::from_fn(
        move |l| Complex64::new((-(l - center) * (l - center) / (2.0 * width * width)).exp(), 0.0),
        Grid::gauss(lo, hi, panels, 16),
        (lo, hi),
        TailKind::CompactSupport,
    )
}
