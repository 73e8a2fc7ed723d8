//! Quadrature: Gauss-Legendre and Gauss-Kronrod rules, an adaptive
//! integrator for oscillatory integrals with phase `a x + b x^2 + c`
//! (Gauss-Kronrod on slowly varying panels, a Filon-type rule in the phase
//! variable elsewhere), integration-by-parts certificates and the
//! frequency-localized kernel of the maximal estimates.

use crate::error::{HypError, Result};
use crate::par;
use crate::specfun::bessel::spherical_bessel_seq;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<RwLock<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(r) = cache.read().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(build_gauss_legendre(n));
    cache.write().unwrap().entry(n).or_insert(rule).clone()
}

fn build_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Composite Gauss-Legendre rule with `n` nodes on each `[breaks[i], breaks[i+1]]`.
pub fn composite_gauss_legendre(breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(n);
    let mut xs = Vec::with_capacity(n * breaks.len());
    let mut ws = Vec::with_capacity(n * breaks.len());
    for p in breaks.windows(2) {
        let h = 0.5 * (p[1] - p[0]);
        let m = 0.5 * (p[1] + p[0]);
        for (x, w) in rule.0.iter().zip(&rule.1) {
            xs.push(m + h * x);
            ws.push(h * w);
        }
    }
    (xs, ws)
}

/// `count` equal panels on `[a, b]`, each carrying an `n`-point rule.
pub fn uniform_gauss_legendre(a: f64, b: f64, count: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let breaks: Vec<f64> = (0..=count).map(|i| a + (b - a) * i as f64 / count as f64).collect();
    composite_gauss_legendre(&breaks, n)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// 21-point Gauss-Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
pub fn gk21<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> (Complex64, f64) {
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    let fc = f(m);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for j in 0..10 {
        let d = h * XGK[j];
        let f1 = f(m - d);
        let f2 = f(m + d);
        fv[j] = (f1, f2);
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        asc += WGK[j] * ((fv[j].0 - mean).norm() + (fv[j].1 - mean).norm());
    }
    asc *= h.abs();
    let mut err = ((k - g) * h).norm();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let value = k * h;
    let abs_scale = value.norm();
    if abs_scale > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_scale);
    }
    (value, err)
}

/// Result of a non-oscillatory adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive Gauss-Kronrod integration of a real function on a
/// finite interval. Initial panels come from `breaks` (interior points).
pub fn integrate<F: Fn(f64) -> f64 + Sync>(f: F, a: f64, b: f64, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> QuadResult {
    let cf = |x: f64| Complex64::new(f(x), 0.0);
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let init: Vec<Panel> = par::map(&pts.windows(2).collect::<Vec<_>>(), |w| {
        let (v, e) = gk21(cf, w[0], w[1]);
        Panel { l: w[0], r: w[1], value: v, error: e, kind: PanelKind::Gk }
    });
    let out = refine(init, abs_tol, rel_tol, 2000, |l, r, _| {
        let (v, e) = gk21(cf, l, r);
        (v, e, PanelKind::Gk)
    });
    QuadResult { value: out.value.re, error: out.error, converged: out.converged }
}

/// The fixed smooth cutoff: 1 on `[0, 1]`, 0 on `[2, inf)`, with a degree-7
/// polynomial join that is C^3 at both ends.
pub fn smooth_cutoff(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let u = x - 1.0;
        let u4 = u * u * u * u;
        1.0 - u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u)
    }
}

/// Decay model for the amplitude beyond the last finite node; used to
/// truncate semi-infinite ranges with a certified tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TailModel {
    /// The amplitude vanishes beyond `hi`; `hi` must be finite.
    Compact,
    /// `|g(x)| <= bound * x^{-rate}` for `x >= start`, `rate > 1`.
    Power { bound: f64, rate: f64, start: f64 },
    /// `|g(x)| <= bound * exp(-rate x)` for `x >= start`.
    Exponential { bound: f64, rate: f64, start: f64 },
    /// `|g(x)| <= bound * exp(-rate x^2)` for `x >= start`.
    Gaussian { bound: f64, rate: f64, start: f64 },
}

impl TailModel {
    /// Point beyond which the tail mass is below `eps`, and that mass bound.
    pub fn truncation(&self, eps: f64) -> Result<(f64, f64)> {
        match *self {
            TailModel::Compact => Err(HypError::Domain("compact tail model needs a finite upper limit".into())),
            TailModel::Power { bound, rate, start } => {
                if !(rate > 1.0) {
                    return Err(HypError::Domain(format!("power tail needs rate > 1, got {rate}")));
                }
                let x = (bound / (eps * (rate - 1.0))).powf(1.0 / (rate - 1.0)).max(start);
                Ok((x, bound * x.powf(1.0 - rate) / (rate - 1.0)))
            }
            TailModel::Exponential { bound, rate, start } => {
                let x = ((bound / (eps * rate)).ln() / rate).max(start);
                Ok((x, bound * (-rate * x).exp() / rate))
            }
            TailModel::Gaussian { bound, rate, start } => {
                let x = ((bound / (eps * rate)).max(1.0).ln() / rate).sqrt().max(start).max(0.5);
                Ok((x, bound * (-rate * x * x).exp() / (2.0 * rate * x)))
            }
        }
    }
}

/// An oscillatory integral `int_lo^hi g(x) mu(x/N) exp(i(a x + b x^2 + c)) dx`.
pub struct OscillatorySpec<'f> {
    pub amplitude: &'f (dyn Fn(f64) -> Complex64 + Sync),
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lo: f64,
    pub hi: f64,
    pub tail: TailModel,
    /// Multiply the amplitude by `smooth_cutoff(x / N)`.
    pub cutoff: Option<f64>,
    /// The amplitude behaves like `(x - lo)^p` at the lower end (`p > -1`).
    pub endpoint_power: f64,
    pub breakpoints: Vec<f64>,
    /// Absolute error floor; the target is `max(tol |value|, abs_tol)`.
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl<'f> OscillatorySpec<'f> {
    pub fn new(amplitude: &'f (dyn Fn(f64) -> Complex64 + Sync), lo: f64, hi: f64) -> Self {
        OscillatorySpec {
            amplitude,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            lo,
            hi,
            tail: TailModel::Compact,
            cutoff: None,
            endpoint_power: 0.0,
            breakpoints: Vec::new(),
            abs_tol: 0.0,
            max_panels: 4000,
        }
    }

    pub fn phase(mut self, a: f64, b: f64, c: f64) -> Self {
        self.a = a;
        self.b = b;
        self.c = c;
        self
    }

    pub fn tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    pub fn cutoff(mut self, n: f64) -> Self {
        self.cutoff = Some(n);
        self
    }

    pub fn endpoint_power(mut self, p: f64) -> Self {
        self.endpoint_power = p;
        self
    }

    pub fn breakpoints(mut self, b: Vec<f64>) -> Self {
        self.breakpoints = b;
        self
    }

    pub fn abs_tol(mut self, t: f64) -> Self {
        self.abs_tol = t;
        self
    }

    pub fn max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }

    fn theta(&self, x: f64) -> f64 {
        (self.a + self.b * x) * x
    }

    fn dtheta(&self, x: f64) -> f64 {
        self.a + 2.0 * self.b * x
    }

    fn g(&self, x: f64) -> Complex64 {
        let v = (self.amplitude)(x);
        match self.cutoff {
            Some(n) => v * smooth_cutoff(x / n),
            None => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    FilonPanel,
    GaussKronrod,
    IBPBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub method: Method,
    /// False when the panel budget ran out before the target was met.
    pub converged: bool,
    pub panels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PanelKind {
    Gk,
    Filon,
    Singular,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    l: f64,
    r: f64,
    value: Complex64,
    error: f64,
    kind: PanelKind,
}

struct HeapItem(f64, usize);

impl PartialEq for HeapItem {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 && self.1 == o.1
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

struct Refined {
    value: Complex64,
    error: f64,
    converged: bool,
    panels: Vec<Panel>,
}

fn refine<E>(init: Vec<Panel>, abs_tol: f64, rel_tol: f64, max_panels: usize, eval: E) -> Refined
where
    E: Fn(f64, f64, PanelKind) -> (Complex64, f64, PanelKind),
{
    let mut panels = init;
    let mut heap: BinaryHeap<HeapItem> = panels.iter().enumerate().map(|(i, p)| HeapItem(p.error, i)).collect();
    let total = |ps: &[Panel]| {
        let mut sorted: Vec<&Panel> = ps.iter().collect();
        sorted.sort_by(|x, y| x.l.total_cmp(&y.l));
        let v: Complex64 = sorted.iter().map(|p| p.value).sum();
        let e: f64 = sorted.iter().map(|p| p.error).sum();
        let s: f64 = sorted.iter().map(|p| p.value.norm()).sum();
        (v, e, s)
    };
    let mut err_sum: f64 = panels.iter().map(|p| p.error).sum();
    let mut val_sum: Complex64 = panels.iter().map(|p| p.value).sum();
    let mut converged = false;
    loop {
        let target = (rel_tol * val_sum.norm()).max(abs_tol);
        if err_sum <= target {
            converged = true;
            break;
        }
        if panels.len() >= max_panels {
            break;
        }
        let Some(HeapItem(_, idx)) = heap.pop() else { break };
        let p = panels[idx];
        let mid = 0.5 * (p.l + p.r);
        if !(mid > p.l && mid < p.r) || (p.r - p.l) <= 1e-13 * p.l.abs().max(p.r.abs()) {
            // cannot split further; keep it out of the heap
            continue;
        }
        let left_kind = if p.kind == PanelKind::Singular { PanelKind::Singular } else { PanelKind::Gk };
        let (vl, el, kl) = eval(p.l, mid, left_kind);
        let (vr, er, kr) = eval(mid, p.r, PanelKind::Gk);
        err_sum += el + er - p.error;
        val_sum += vl + vr - p.value;
        panels[idx] = Panel { l: p.l, r: mid, value: vl, error: el, kind: kl };
        panels.push(Panel { l: mid, r: p.r, value: vr, error: er, kind: kr });
        heap.push(HeapItem(el, idx));
        heap.push(HeapItem(er, panels.len() - 1));
        if panels.len().is_multiple_of(64) {
            let (v, e, _) = total(&panels);
            val_sum = v;
            err_sum = e;
        }
    }
    let (value, error, scale) = total(&panels);
    let floor = 64.0 * f64::EPSILON * scale;
    if !converged && error <= floor.max((rel_tol * value.norm()).max(abs_tol)) {
        converged = true;
    }
    panels.sort_by(|x, y| x.l.total_cmp(&y.l));
    Refined { value, error, converged, panels }
}

const FILON_NODES: usize = 24;
const GK_MAX_VARIATION: f64 = 8.0;

/// Filon-type rule on a panel where the phase is monotone: the integral is
/// rewritten in the phase variable and the amplitude expanded in Legendre
/// polynomials, whose Fourier moments are spherical Bessel functions.
fn filon_panel(spec: &OscillatorySpec, l: f64, r: f64) -> (Complex64, f64) {
    let rule = gauss_legendre(FILON_NODES);
    let w0 = spec.theta(l);
    let w1 = spec.theta(r);
    let len = w1 - w0;
    let d0 = spec.dtheta(l);
    let sgn = d0.signum();
    let mut h = [Complex64::new(0.0, 0.0); FILON_NODES];
    for (j, &u) in rule.0.iter().enumerate() {
        let dw = 0.5 * (u + 1.0) * len;
        let disc = (d0 * d0 + 4.0 * spec.b * dw).max(0.0);
        let root = sgn * disc.sqrt();
        let dx = if spec.b == 0.0 { dw / d0 } else { 2.0 * dw / (d0 + root) };
        let x = (l + dx).clamp(l.min(r), l.max(r));
        let slope = if spec.b == 0.0 { d0 } else { root };
        h[j] = spec.g(x) / slope;
    }
    let mut coef = [Complex64::new(0.0, 0.0); FILON_NODES];
    for (j, &u) in rule.0.iter().enumerate() {
        let mut p0 = 1.0;
        let mut p1 = u;
        let wh = h[j] * rule.1[j];
        coef[0] += wh;
        coef[1] += wh * u;
        for (k, c) in coef.iter_mut().enumerate().skip(2) {
            let p2 = ((2 * k - 1) as f64 * u * p1 - (k - 1) as f64 * p0) / k as f64;
            *c += wh * p2;
            p0 = p1;
            p1 = p2;
        }
    }
    for (k, c) in coef.iter_mut().enumerate() {
        *c *= (2 * k + 1) as f64 / 2.0;
    }
    let omega = 0.5 * len;
    let jk = spherical_bessel_seq(FILON_NODES - 1, omega.abs());
    let mut sum = Complex64::new(0.0, 0.0);
    let ipow = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];
    for k in 0..FILON_NODES {
        let sign = if omega < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sum += coef[k] * ipow[k % 4] * (2.0 * sign * jk[k]);
    }
    let phase = Complex64::from_polar(1.0, 0.5 * (w0 + w1) + spec.c);
    let value = phase * sum * omega;
    let tail: f64 = coef[FILON_NODES - 4..].iter().map(|c| c.norm()).sum();
    let err = len.abs() * tail * (1.0f64).min(1.0 / omega.abs()) + 32.0 * f64::EPSILON * value.norm();
    (value, err)
}

fn gk_panel(spec: &OscillatorySpec, l: f64, r: f64) -> (Complex64, f64) {
    gk21(|x| spec.g(x) * Complex64::from_polar(1.0, spec.theta(x) + spec.c), l, r)
}

/// Panel starting at the singular endpoint: substitute `x = lo + (r - lo) v^p`
/// with `p = 1 / (1 + endpoint_power)`.
fn singular_panel(spec: &OscillatorySpec, r: f64) -> (Complex64, f64) {
    let lo = spec.lo;
    let p = 1.0 / (1.0 + spec.endpoint_power);
    let span = r - lo;
    gk21(
        |v| {
            if v <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = lo + span * v.powf(p);
            let jac = span * p * v.powf(p - 1.0);
            spec.g(x) * jac * Complex64::from_polar(1.0, spec.theta(x) + spec.c)
        },
        0.0,
        1.0,
    )
}

fn eval_panel(spec: &OscillatorySpec, l: f64, r: f64, kind: PanelKind) -> (Complex64, f64, PanelKind) {
    if kind == PanelKind::Singular && l == spec.lo {
        let (v, e) = singular_panel(spec, r);
        return (v, e, PanelKind::Singular);
    }
    let variation = (spec.theta(r) - spec.theta(l)).abs();
    if variation <= GK_MAX_VARIATION {
        let (v, e) = gk_panel(spec, l, r);
        return (v, e, PanelKind::Gk);
    }
    let dl = spec.dtheta(l);
    let dr = spec.dtheta(r);
    let monotone = dl * dr > 0.0 && dl.abs().min(dr.abs()) >= 0.1 * dl.abs().max(dr.abs());
    if monotone {
        let (v, e) = filon_panel(spec, l, r);
        (v, e, PanelKind::Filon)
    } else {
        let (v, e) = gk_panel(spec, l, r);
        (v, e, PanelKind::Gk)
    }
}

fn initial_breaks(spec: &OscillatorySpec, hi: f64) -> Vec<f64> {
    let lo = spec.lo;
    let mut pts = vec![lo, hi];
    pts.extend(spec.breakpoints.iter().copied());
    if let Some(n) = spec.cutoff {
        pts.push(n);
        pts.push(2.0 * n);
    }
    if spec.b != 0.0 {
        let xs = -spec.a / (2.0 * spec.b);
        let delta = (20.0 / spec.b.abs()).sqrt();
        pts.extend([xs - delta, xs, xs + delta]);
    }
    let slope = spec.a.abs() + 2.0 * spec.b.abs() * lo.abs();
    let mut first = (hi - lo).min(1.0);
    if slope > 0.0 {
        first = first.min(4.0 / slope);
    }
    if spec.b != 0.0 {
        first = first.min((4.0 / spec.b.abs()).sqrt());
    }
    pts.push(lo + first);
    let mut pts: Vec<f64> = pts.into_iter().filter(|x| x.is_finite() && *x >= lo && *x <= hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // geometric refinement of long intervals
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let base = if x0 > lo { x0 - lo } else { first };
        let mut x = x0;
        if x0 > lo {
            while lo + 2.0 * (x - lo) < x1 && out.len() < 10_000 {
                x = lo + 2.0 * (x - lo).max(base);
                out.push(x);
            }
        }
        out.push(x1);
    }
    out.dedup();
    out
}

/// Adaptive evaluation of an oscillatory integral to relative tolerance `tol`
/// (with the absolute floor from the spec).
pub fn osc_integral(spec: &OscillatorySpec, tol: f64) -> Result<IntegralResult> {
    if !(spec.lo >= 0.0) || !(tol > 0.0) || spec.lo.is_infinite() {
        return Err(HypError::Domain(format!("osc_integral needs 0 <= lo < inf and tol > 0 (lo={}, tol={tol})", spec.lo)));
    }
    if !(spec.endpoint_power > -1.0) {
        return Err(HypError::Domain(format!("endpoint power must exceed -1, got {}", spec.endpoint_power)));
    }
    let (hi, tail_bound) = if spec.hi.is_finite() {
        (spec.hi, 0.0)
    } else if let Some(n) = spec.cutoff {
        (2.0 * n, 0.0)
    } else {
        let eps = 0.1 * spec.abs_tol.max(tol);
        spec.tail.truncation(eps)?
    };
    let hi = match spec.cutoff {
        Some(n) => hi.min(2.0 * n),
        None => hi,
    };
    if hi <= spec.lo {
        return Ok(IntegralResult {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: tail_bound,
            method: Method::GaussKronrod,
            converged: true,
            panels: 0,
        });
    }
    let breaks = initial_breaks(spec, hi);
    let singular = spec.endpoint_power != 0.0;
    let pairs: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let init: Vec<Panel> = par::map(&pairs, |&(l, r)| {
        let kind = if singular && l == spec.lo { PanelKind::Singular } else { PanelKind::Gk };
        let (value, error, kind) = eval_panel(spec, l, r, kind);
        Panel { l, r, value, error, kind }
    });
    let max_panels = spec.max_panels.max(init.len() + 2);
    let out = refine(init, spec.abs_tol, tol, max_panels, |l, r, kind| eval_panel(spec, l, r, kind));
    let method = if out.panels.iter().any(|p| p.kind == PanelKind::Filon) {
        Method::FilonPanel
    } else {
        Method::GaussKronrod
    };
    Ok(IntegralResult {
        value: out.value,
        abs_error_estimate: out.error + tail_bound,
        method,
        converged: out.converged,
        panels: out.panels.len(),
    })
}

/// Integration-by-parts certificate for the band integrals of the blow-up
/// construction: amplitude bounded by `1/x`, positive and decreasing, on
/// `[lo, hi]` with `lo >= e`, phase derivative `a + 2 b x` with `|a| < |b| lo`.
/// Returns `4 / (|b| lo^2)`.
pub fn ibp_bound(spec: &OscillatorySpec) -> Result<f64> {
    let lo = spec.lo;
    if spec.b == 0.0 || !(spec.a.abs() < spec.b.abs() * lo) {
        return Err(HypError::Precondition(format!(
            "integration by parts needs |a| < |b| lo (a={}, b={}, lo={lo})",
            spec.a, spec.b
        )));
    }
    if lo < std::f64::consts::E {
        return Err(HypError::Precondition(format!("integration by parts bound needs lo >= e, got {lo}")));
    }
    Ok(4.0 / (spec.b.abs() * lo * lo))
}

/// Bound `2 g(lo) / |a|` for `int_lo^hi g(x) e^{i a x} dx` with `g` positive
/// and decreasing.
pub fn linear_phase_bound(g_lo: f64, a: f64) -> Result<f64> {
    if a == 0.0 || !(g_lo >= 0.0) {
        return Err(HypError::Precondition(format!("linear phase bound needs a != 0 and g >= 0 (a={a}, g={g_lo})")));
    }
    Ok(2.0 * g_lo / a.abs())
}

/// `int_0^inf exp(i(x dk + dt (x^2 + c_shift))) x^{-1/2} mu(x/N) dx`.
pub fn lemma23_kernel(dk: f64, dt: f64, c_shift: f64, n: f64, tol: f64) -> Result<IntegralResult> {
    if !(n >= 1.0) {
        return Err(HypError::Domain(format!("cutoff scale N must be >= 1, got {n}")));
    }
    let amp = |x: f64| Complex64::new(if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0);
    let spec = OscillatorySpec::new(&amp, 0.0, 2.0 * n)
        .phase(dk, dt, dt * c_shift)
        .cutoff(n)
        .endpoint_power(-0.5)
        .abs_tol(1e-3 * tol);
    osc_integral(&spec, tol)
}
