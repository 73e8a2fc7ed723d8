//! Radial initial datum on H^3 whose Schrodinger evolution blows up along
//! wide approach regions: sequences, band certificates, partial solutions
//! and certified lower bounds.

use crate::error::{HypError, Result};
use crate::par;
use crate::quadrature::{ibp_bound, integrate, linear_phase_bound, osc_integral, OscillatorySpec};
use crate::specfun::spherical::phi_closed_h3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Bands with `R_j` above this are never integrated directly.
pub const DIRECT_CUTOFF: f64 = 1e6;

/// Approach-region profile `gamma(t) = scale * t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFn {
    pub scale: f64,
    pub exponent: f64,
}

impl GammaFn {
    pub fn sqrt() -> GammaFn {
        GammaFn { scale: 1.0, exponent: 0.5 }
    }

    pub fn new(scale: f64, exponent: f64) -> Result<GammaFn> {
        if !(scale > 0.0 && exponent > 0.0 && scale.is_finite() && exponent.is_finite()) {
            return Err(HypError::InvalidParameter(format!("gamma needs positive scale and exponent, got ({scale}, {exponent})")));
        }
        Ok(GammaFn { scale, exponent })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * t.max(0.0).powf(self.exponent)
    }

    pub fn inverse(&self, d: f64) -> f64 {
        (d.max(0.0) / self.scale).powf(1.0 / self.exponent)
    }
}

/// How the times `t_j` are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeSchedule {
    /// `t_j = c3 / 2^j`.
    Geometric,
    /// `gamma(t_j)` exceeds the covering radius of the dyadic level of `s_j`,
    /// so every point of the annulus is approached along the sequence.
    GammaAdapted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub m: f64,
    /// Number of indices `k` in the blow-up report.
    pub k: usize,
    /// Number of bands built; at least `k + 1`.
    pub bands: usize,
    pub gamma: GammaFn,
    pub schedule: TimeSchedule,
    /// Smallest accepted ratio of the lower bound to `(log R_k)^{1/4}`.
    pub c_min: f64,
    pub tol: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            c1: 0.8,
            c2: 1.0,
            c3: 0.04,
            c4: 0.5,
            c5: 1.25,
            c6: 1e-3,
            m: 2.0,
            k: 3,
            bands: 4,
            gamma: GammaFn::sqrt(),
            schedule: TimeSchedule::Geometric,
            c_min: 0.05,
            tol: 1e-10,
        }
    }
}

impl CounterexampleConfig {
    pub fn c7(&self) -> f64 {
        4.0 / self.c6
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HypError::InvalidParameter(m));
        if !(0.0 < self.c4 && self.c4 < self.c1 && self.c1 < self.c2 && self.c2 < self.c5 && self.c5.is_finite()) {
            return bad(format!(
                "need 0 < c4 < c1 < c2 < c5, got c4={}, c1={}, c2={}, c5={}",
                self.c4, self.c1, self.c2, self.c5
            ));
        }
        if !(self.c3 > 0.0 && self.c3 < 1.0) {
            return bad(format!("c3 must lie in (0, 1), got {}", self.c3));
        }
        if !(self.c6 > 0.0 && self.c6.is_finite()) {
            return bad(format!("c6 must be positive, got {}", self.c6));
        }
        if !(self.m > 1.0 && self.m.is_finite()) {
            return bad(format!("M must exceed 1, got {}", self.m));
        }
        if self.k == 0 || self.bands < self.k + 1 {
            return bad(format!("need K >= 1 and at least K + 1 bands, got K={} bands={}", self.k, self.bands));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        let g = self.gamma.eval(self.c3);
        if self.c1 - g < self.c4 || self.c2 + g > self.c5 {
            return bad(format!(
                "gamma-balls around [c1, c2] with t < c3 reach [{}, {}], outside [c4, c5] = [{}, {}]",
                self.c1 - g,
                self.c2 + g,
                self.c4,
                self.c5
            ));
        }
        Ok(())
    }
}

/// Inequalities required of band `j` against an earlier index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandCertificate {
    pub j: usize,
    pub k: usize,
    /// `r_j^2` against `c6 2^j / |t_k - t_j|`.
    pub r_squared: f64,
    pub r_squared_needed: f64,
    /// `|t_k - t_j| r_j` against `s_j + s_k + 1`.
    pub separation: f64,
    pub separation_needed: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleData {
    pub config: CounterexampleConfig,
    pub s_seq: Vec<f64>,
    pub t_seq: Vec<f64>,
    pub r_seq: Vec<f64>,
    pub big_r_seq: Vec<f64>,
    pub certificates: Vec<BandCertificate>,
}

/// Dyadic level of the `j`-th point (1-based) of the enumeration.
fn dyadic_level(j: usize) -> u32 {
    if j == 1 {
        0
    } else {
        usize::BITS - (j - 1).leading_zeros()
    }
}

/// `c5`, then the odd dyadic points `c4 + (c5 - c4)(2i - 1)/2^L` of each level
/// `L = 1, 2, ...` in ascending order.
pub fn dyadic_sequence(c4: f64, c5: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(c5);
    let mut level = 1u32;
    while out.len() < count {
        let denom = (1u64 << level) as f64;
        for i in 1..=(1usize << (level - 1)) {
            if out.len() == count {
                break;
            }
            out.push(c4 + (c5 - c4) * (2 * i - 1) as f64 / denom);
        }
        level += 1;
    }
    out
}

/// Times `t_1 > t_2 > ...` for the chosen schedule.
pub fn time_sequence(config: &CounterexampleConfig, count: usize) -> Vec<f64> {
    match config.schedule {
        TimeSchedule::Geometric => (1..=count).map(|j| config.c3 * 0.5f64.powi(j as i32)).collect(),
        TimeSchedule::GammaAdapted => {
            let width = config.c5 - config.c4;
            // level L points cover the interval within width / 2^L
            let theta = |j: usize| -> f64 {
                let level = dyadic_level(j);
                let (first, size) = if level == 0 { (1, 1) } else { (1 + (1usize << (level - 1)), 1usize << (level - 1)) };
                let pos = (j - first) as f64 / size as f64;
                width / (1u64 << level) as f64 * (2.0 - pos)
            };
            let raw: Vec<f64> = (1..=count).map(|j| config.gamma.inverse(theta(j))).collect();
            // indices whose adapted time would reach c3 are squeezed below it
            let first_ok = raw.iter().position(|&t| t < config.c3).unwrap_or(count);
            let floor = if first_ok < count { raw[first_ok] } else { 0.0 };
            raw.iter()
                .enumerate()
                .map(|(i, &t)| {
                    if i >= first_ok {
                        t
                    } else {
                        floor + (config.c3 - floor) * (first_ok - i) as f64 / (first_ok + 1) as f64
                    }
                })
                .collect()
        }
    }
}

fn certificate(data_s: &[f64], data_t: &[f64], c6: f64, r: f64, j: usize, k: usize) -> BandCertificate {
    let dt = (data_t[k - 1] - data_t[j - 1]).abs();
    let r_squared_needed = c6 * 2f64.powi(j as i32) / dt;
    let separation_needed = data_s[j - 1] + data_s[k - 1] + 1.0;
    BandCertificate {
        j,
        k,
        r_squared: r * r,
        r_squared_needed,
        separation: dt * r,
        separation_needed,
        holds: r * r >= r_squared_needed && dt * r > separation_needed,
    }
}

/// Build the sequences with `r_1 = 3`, `R_1 = 5` and, for `j >= 2`, `r_j`
/// the smallest power of two above `R_{j-1}` meeting every certificate.
pub fn build_sequences(config: &CounterexampleConfig) -> Result<CounterexampleData> {
    config.validate()?;
    let n = config.bands;
    let s_seq = dyadic_sequence(config.c4, config.c5, n);
    let t_seq = time_sequence(config, n);
    if !(t_seq[0] < config.c3) || t_seq.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(HypError::Construction("time sequence must decrease strictly from below c3".into()));
    }
    let mut r_seq: Vec<f64> = vec![3.0];
    let mut big_r_seq: Vec<f64> = vec![5.0];
    let mut certificates = Vec::new();
    for j in 2..=n {
        let prev = big_r_seq[j - 2];
        let mut need = prev;
        for k in 1..j {
            let dt = (t_seq[k - 1] - t_seq[j - 1]).abs();
            need = need.max((config.c6 * 2f64.powi(j as i32) / dt).sqrt());
            need = need.max((s_seq[j - 1] + s_seq[k - 1] + 1.0) / dt);
        }
        let mut r = 2f64.powf(need.log2().floor());
        while r <= need || r <= prev {
            r *= 2.0;
        }
        // the power-of-two search can only fail through overflow
        let mut ok = r.is_finite();
        for k in 1..j {
            let c = certificate(&s_seq, &t_seq, config.c6, r, j, k);
            ok &= c.holds;
            certificates.push(c);
        }
        if !ok {
            return Err(HypError::Construction(format!("band {j} failed its certificates (r_j = {r})")));
        }
        let big_r = r.powf(config.m);
        if !big_r.is_finite() {
            return Err(HypError::Construction(format!("band {j} edge r_j^M overflows (r_j = {r})")));
        }
        r_seq.push(r);
        big_r_seq.push(big_r);
    }
    Ok(CounterexampleData { config: config.clone(), s_seq, t_seq, r_seq, big_r_seq, certificates })
}

/// Band amplitude `lambda^{-1} (log lambda)^{-3/4}`.
fn band_amp(l: f64) -> f64 {
    1.0 / (l * l.ln().powf(0.75))
}

/// `int_r^R band_amp = 4 ((log R)^{1/4} - (log r)^{1/4})`.
pub fn band_mass(r: f64, big_r: f64) -> f64 {
    4.0 * (big_r.ln().powf(0.25) - r.ln().powf(0.25))
}

/// `int_r^R band_amp` by Gauss-Kronrod quadrature in `u = log l`, an
/// independent check of [`band_mass`].
pub fn band_mass_quadrature(r: f64, big_r: f64) -> f64 {
    let (u0, u1) = (r.ln(), big_r.ln());
    let panels = ((u1 / u0).log2().ceil() as usize).clamp(1, 200) * 4;
    let breaks: Vec<f64> = (1..panels).map(|i| u0 * (u1 / u0).powf(i as f64 / panels as f64)).collect();
    integrate(|u| u.powf(-0.75), u0, u1, &breaks, 0.0, 1e-14).value
}

impl CounterexampleData {
    pub fn band_count(&self) -> usize {
        self.r_seq.len()
    }

    /// The band containing `lambda`, if any (bands are open intervals).
    pub fn band_of(&self, lambda: f64) -> Option<usize> {
        (0..self.band_count()).find(|&i| self.r_seq[i] < lambda && lambda < self.big_r_seq[i]).map(|i| i + 1)
    }

    /// The spectral profile of the initial datum.
    pub fn fhat(&self, lambda: f64) -> Complex64 {
        match self.band_of(lambda) {
            None => Complex64::new(0.0, 0.0),
            Some(j) => {
                let s = self.s_seq[j - 1];
                let t = self.t_seq[j - 1];
                Complex64::from_polar(band_amp(lambda) * phi_closed_h3(lambda, s), -t * (lambda * lambda + 1.0))
            }
        }
    }
}

/// `fhat` at one frequency.
pub fn fhat_counter(data: &CounterexampleData, lambda: f64) -> Complex64 {
    data.fhat(lambda)
}

/// Comparison envelope `sqrt(10/9) / sinh^2(c4) * int_3^inf dl/(l (log l)^{3/2})`
/// with the integral `2 / (log 3)^{1/2}`.
pub fn h_half_envelope(config: &CounterexampleConfig) -> f64 {
    (10.0f64 / 9.0).sqrt() / config.c4.sinh().powi(2) * 2.0 / 3f64.ln().sqrt()
}

/// Contribution of band `j` to `int (l^2 + 1)^{1/2} |fhat|^2 l^2 dl`.
pub fn h_half_band(data: &CounterexampleData, j: usize) -> Result<f64> {
    let (r, big_r) = (data.r_seq[j - 1], data.big_r_seq[j - 1]);
    let s = data.s_seq[j - 1];
    let k = 1.0 / s.sinh().powi(2);
    // |fhat|^2 l^2 (l^2+1)^{1/2} = k g(l) sin^2(l s) with g = (l^2+1)^{1/2} l^{-2} (log l)^{-3/2};
    // the mean part 1/2 is integrated in u = log l, the cos(2 l s) part as an oscillatory integral
    let (u0, u1) = (r.ln(), big_r.ln());
    let panels = ((u1 - u0) * 4.0).ceil().max(4.0) as usize;
    let breaks: Vec<f64> = (1..panels).map(|i| u0 + (u1 - u0) * i as f64 / panels as f64).collect();
    let mean = integrate(
        |u| {
            let l = u.exp();
            0.5 * (l * l + 1.0).sqrt() / l * u.powf(-1.5)
        },
        u0,
        u1,
        &breaks,
        0.0,
        1e-12,
    );
    let amp = |l: f64| Complex64::new(-0.5 * (l * l + 1.0).sqrt() / (l * l) * l.ln().powf(-1.5), 0.0);
    let osc = osc_integral(&OscillatorySpec::new(&amp, r, big_r).phase(2.0 * s, 0.0, 0.0).abs_tol(1e-13), 1e-10)?;
    Ok(k * (mean.value + osc.value.re))
}

/// Partial sums of the `H^{1/2}` norm squared over the first `J` bands.
pub fn h_half_norm_partial(data: &CounterexampleData, bands: usize) -> Result<f64> {
    if bands > data.band_count() {
        return Err(HypError::InvalidParameter(format!("only {} bands built, {bands} requested", data.band_count())));
    }
    let parts: Vec<Result<f64>> = par::map_range(bands, |i| h_half_band(data, i + 1));
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermMethod {
    Quadrature,
    ClosedForm,
    IbpBound,
    LinearPhaseBound,
}

/// One band integral of one branch, with its prefactor applied. The exact
/// value lies in the disc of radius `radius` around `value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandTerm {
    pub j: usize,
    pub branch: u8,
    pub value: Complex64,
    pub radius: f64,
    pub method: TermMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSolution {
    pub value: Complex64,
    pub radius: f64,
    /// Point values of the four branch sums `u_{m,1..4}`.
    pub branches: [Complex64; 4],
    pub terms: Vec<BandTerm>,
}

impl PartialSolution {
    /// Certified lower bound on `|u_m|`.
    pub fn lower_bound(&self) -> f64 {
        (self.value.norm() - self.radius).max(0.0)
    }
}

fn band_term(data: &CounterexampleData, j: usize, branch: u8, s: f64, t: f64) -> Result<BandTerm> {
    let sj = data.s_seq[j - 1];
    let (r, big_r) = (data.r_seq[j - 1], data.big_r_seq[j - 1]);
    let (sign, a) = match branch {
        1 => (-1.0, s + sj),
        2 => (1.0, s - sj),
        3 => (1.0, sj - s),
        _ => (-1.0, -(s + sj)),
    };
    let b = t - data.t_seq[j - 1];
    let pref = Complex64::from_polar(sign * 0.25 / (s.sinh() * sj.sinh()), b);
    if a == 0.0 && b == 0.0 {
        return Ok(BandTerm { j, branch, value: pref * band_mass(r, big_r), radius: 0.0, method: TermMethod::ClosedForm });
    }
    if big_r <= DIRECT_CUTOFF {
        let amp = |l: f64| Complex64::new(band_amp(l), 0.0);
        let spec = OscillatorySpec::new(&amp, r, big_r).phase(a, b, 0.0).abs_tol(1e-14).max_panels(50_000);
        let res = osc_integral(&spec, data.config.tol)?;
        if !res.converged {
            return Err(HypError::Convergence(format!("band {j} branch {branch} at (s={s}, t={t}) did not converge")));
        }
        return Ok(BandTerm {
            j,
            branch,
            value: pref * res.value,
            radius: pref.norm() * res.abs_error_estimate,
            method: TermMethod::Quadrature,
        });
    }
    let zero = |_: f64| Complex64::new(0.0, 0.0);
    if b != 0.0 {
        let spec = OscillatorySpec::new(&zero, r, big_r).phase(a, b, 0.0);
        if let Ok(bound) = ibp_bound(&spec) {
            return Ok(BandTerm { j, branch, value: Complex64::new(0.0, 0.0), radius: pref.norm() * bound, method: TermMethod::IbpBound });
        }
        return Err(HypError::Precondition(format!(
            "band {j} branch {branch} at (s={s}, t={t}) exceeds the quadrature cutoff and fails the integration-by-parts hypothesis"
        )));
    }
    let bound = linear_phase_bound(band_amp(r), a)?;
    Ok(BandTerm { j, branch, value: Complex64::new(0.0, 0.0), radius: pref.norm() * bound, method: TermMethod::LinearPhaseBound })
}

/// `u_m(s, t) = int_3^{R_m} phi_l(s) e^{it(l^2+1)} fhat(l) l^2 dl` as four
/// branch sums over the bands.
pub fn partial_solution_u_m(data: &CounterexampleData, m: usize, s: f64, t: f64) -> Result<PartialSolution> {
    if m > data.band_count() {
        return Err(HypError::InvalidParameter(format!("only {} bands built, m = {m} requested", data.band_count())));
    }
    if !(s > 0.0) {
        return Err(HypError::Domain(format!("radius must be positive, got {s}")));
    }
    let jobs: Vec<(usize, u8)> = (1..=m).flat_map(|j| (1..=4u8).map(move |b| (j, b))).collect();
    let terms: Vec<BandTerm> = par::map(&jobs, |&(j, b)| band_term(data, j, b, s, t)).into_iter().collect::<Result<_>>()?;
    let mut branches = [Complex64::new(0.0, 0.0); 4];
    let mut radius = 0.0;
    for term in &terms {
        branches[(term.branch - 1) as usize] += term.value;
        radius += term.radius;
    }
    let value = branches.iter().sum();
    Ok(PartialSolution { value, radius, branches, terms })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupRow {
    pub k: usize,
    pub m: usize,
    pub s_k: f64,
    pub t_k: f64,
    pub abs_u: f64,
    pub radius: f64,
    pub lower_bound: f64,
    pub log_r_quarter: f64,
    pub ratio: f64,
    /// The diagonal estimate `(B_k + D_k) / (4 sinh^2 s_k)`.
    pub diagonal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupReport {
    pub rows: Vec<BlowupRow>,
    pub min_ratio: f64,
    pub nondecreasing: bool,
    pub passed: bool,
}

/// Certified lower bounds on `|u_{m_k}(s_k, t_k)|` for `k = 1..K`, with
/// `m_k` the number of built bands.
pub fn blowup_report(data: &CounterexampleData, k_max: usize) -> Result<BlowupReport> {
    if k_max >= data.band_count() {
        return Err(HypError::InvalidParameter(format!("K = {k_max} needs at least K + 1 bands, have {}", data.band_count())));
    }
    let m = data.band_count();
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (s, t) = (data.s_seq[k - 1], data.t_seq[k - 1]);
        let u = partial_solution_u_m(data, m, s, t)?;
        let big_r = data.big_r_seq[k - 1];
        let lq = big_r.ln().powf(0.25);
        let lower = u.lower_bound();
        rows.push(BlowupRow {
            k,
            m,
            s_k: s,
            t_k: t,
            abs_u: u.value.norm(),
            radius: u.radius,
            lower_bound: lower,
            log_r_quarter: lq,
            ratio: lower / lq,
            diagonal: 2.0 * band_mass(data.r_seq[k - 1], big_r) / (4.0 * s.sinh().powi(2)),
        });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let nondecreasing = rows.windows(2).all(|w| w[1].lower_bound >= w[0].lower_bound);
    let passed = min_ratio >= data.config.c_min && nondecreasing;
    Ok(BlowupReport { rows, min_ratio, nondecreasing, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selection {
    pub indices: Vec<usize>,
    /// The enumeration ran out before the requested depth was reached.
    pub exhausted: bool,
}

/// Greedy subsequence `(s_{j_l}, t_{j_l}) -> (x, 0)` with
/// `|x - s_{j_l}| < gamma(t_{j_l})`, searching indices up to `max_index`.
pub fn wide_approach_selector(config: &CounterexampleConfig, x: f64, depth: usize, max_index: usize) -> Result<Selection> {
    config.validate()?;
    if !(config.c1..=config.c2).contains(&x) {
        return Err(HypError::Domain(format!("x = {x} lies outside the annulus [{}, {}]", config.c1, config.c2)));
    }
    let s = dyadic_sequence(config.c4, config.c5, max_index);
    let t = time_sequence(config, max_index);
    let mut indices = Vec::new();
    let mut bound = f64::INFINITY;
    let mut j = 0;
    while indices.len() < depth && j < max_index {
        let d = (x - s[j]).abs();
        if t[j] < bound && t[j] > 0.0 && d > 0.0 && d < config.gamma.eval(t[j]) {
            indices.push(j + 1);
            bound = config.gamma.inverse(d);
        }
        j += 1;
    }
    Ok(Selection { exhausted: indices.len() < depth, indices })
}
