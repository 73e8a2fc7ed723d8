//! Spaces, volume densities and radial curve families.

use crate::error::{domain, invalid, HypError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A radial model space: a Damek-Ricci space `S = NA` described by the
/// dimensions of its `v` and `z` parts, or Euclidean space of dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    DamekRicci { m_v: u32, m_z: u32 },
    Euclidean { n: u32 },
}

impl Space {
    /// Damek-Ricci space with `m_v` even and positive and `m_z >= 1`.
    pub fn damek_ricci(m_v: u32, m_z: u32) -> Result<Space> {
        if m_z == 0 {
            return invalid("m_z must be positive");
        }
        if m_v == 0 {
            return invalid("m_v = 0 needs the degenerate real-hyperbolic constructor");
        }
        if !m_v.is_multiple_of(2) {
            return invalid(format!("m_v must be even, got {m_v}"));
        }
        Ok(Space::DamekRicci { m_v, m_z })
    }

    /// Real hyperbolic space of dimension `m_z + 1`, admitted as the degenerate
    /// Damek-Ricci case `m_v = 0`.
    pub fn real_hyperbolic(m_z: u32) -> Result<Space> {
        if m_z == 0 {
            return invalid("m_z must be positive");
        }
        Ok(Space::DamekRicci { m_v: 0, m_z })
    }

    /// Three-dimensional real hyperbolic space, `(m_v, m_z) = (0, 2)`.
    pub const fn h3() -> Space {
        Space::DamekRicci { m_v: 0, m_z: 2 }
    }

    pub fn euclidean(n: u32) -> Result<Space> {
        if n < 2 {
            return invalid(format!("Euclidean dimension must be at least 2, got {n}"));
        }
        Ok(Space::Euclidean { n })
    }

    /// Parse `h3`, `dr:m_v,m_z`, `hyp:m_z` or `rn:n`.
    pub fn parse(text: &str) -> Result<Space> {
        let t = text.trim().to_ascii_lowercase();
        if t == "h3" {
            return Ok(Space::h3());
        }
        let (kind, rest) = t
            .split_once(':')
            .ok_or_else(|| HypError::InvalidParameter(format!("unrecognised space '{text}'")))?;
        let nums: Vec<u32> = rest
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| HypError::InvalidParameter(format!("bad integers in '{text}'")))?;
        match (kind, nums.as_slice()) {
            ("dr", [0, mz]) => Space::real_hyperbolic(*mz),
            ("dr", [mv, mz]) => Space::damek_ricci(*mv, *mz),
            ("hyp", [mz]) => Space::real_hyperbolic(*mz),
            ("rn", [n]) => Space::euclidean(*n),
            _ => invalid(format!("unrecognised space '{text}'")),
        }
    }

    /// Topological dimension `n`.
    pub fn dim(&self) -> u32 {
        match *self {
            Space::DamekRicci { m_v, m_z } => m_v + m_z + 1,
            Space::Euclidean { n } => n,
        }
    }

    /// Homogeneous dimension `Q = m_v/2 + m_z` (zero for Euclidean space).
    pub fn q(&self) -> f64 {
        match *self {
            Space::DamekRicci { m_v, m_z } => m_v as f64 / 2.0 + m_z as f64,
            Space::Euclidean { .. } => 0.0,
        }
    }

    /// `rho = Q/2`; the spectrum of the Laplacian starts at `rho^2`.
    pub fn rho(&self) -> f64 {
        self.q() / 2.0
    }

    pub fn m_v(&self) -> u32 {
        match *self {
            Space::DamekRicci { m_v, .. } => m_v,
            Space::Euclidean { .. } => 0,
        }
    }

    pub fn m_z(&self) -> u32 {
        match *self {
            Space::DamekRicci { m_z, .. } => m_z,
            Space::Euclidean { .. } => 0,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, Space::Euclidean { .. })
    }

    pub fn is_h3(&self) -> bool {
        *self == Space::h3()
    }

    /// Bessel order `(n-2)/2` attached to the space.
    pub fn bessel_order(&self) -> f64 {
        (self.dim() as f64 - 2.0) / 2.0
    }

    /// Radial volume density `A(s)`.
    pub fn density(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return domain(format!("density needs s >= 0, got {s}"));
        }
        Ok(self.density_unchecked(s))
    }

    pub(crate) fn density_unchecked(&self, s: f64) -> f64 {
        match *self {
            Space::DamekRicci { m_v, m_z } => {
                let k = (m_v + m_z) as i32;
                (2.0 * (s / 2.0).sinh()).powi(k) * (s / 2.0).cosh().powi(m_z as i32)
            }
            Space::Euclidean { n } => s.powi(n as i32 - 1),
        }
    }

    /// Logarithmic derivative `A'(s)/A(s)` for `s > 0`.
    pub fn log_density_derivative(&self, s: f64) -> f64 {
        match *self {
            Space::DamekRicci { m_v, m_z } => {
                let h = s / 2.0;
                0.5 * (m_v + m_z) as f64 / h.tanh() + 0.5 * m_z as f64 * h.tanh()
            }
            Space::Euclidean { n } => (n as f64 - 1.0) / s,
        }
    }

    /// Short label used in file names and CSV rows.
    pub fn label(&self) -> String {
        match *self {
            Space::DamekRicci { m_v: 0, m_z: 2 } => "h3".to_string(),
            Space::DamekRicci { m_v, m_z } => format!("dr:{m_v},{m_z}"),
            Space::Euclidean { n } => format!("rn:{n}"),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Annulus `{r1 < s < r2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r1: f64,
    pub r2: f64,
}

impl Annulus {
    pub fn new(r1: f64, r2: f64) -> Result<Annulus> {
        if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
            return invalid(format!("annulus needs 0 < r1 < r2 < inf, got ({r1}, {r2})"));
        }
        Ok(Annulus { r1, r2 })
    }

    pub fn contains(&self, s: f64) -> bool {
        s > self.r1 && s < self.r2
    }
}

/// Tabulated curve radii on a tensor grid, interpolated bilinearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    s: Vec<f64>,
    t: Vec<f64>,
    /// Row-major, `radius[i * t.len() + j]` at `(s[i], t[j])`.
    radius: Vec<f64>,
}

impl CurveTable {
    /// Build from scattered `(s, t, radius)` rows covering a full tensor grid
    /// that includes `t = 0`.
    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<CurveTable> {
        if rows.is_empty() {
            return invalid("empty curve table");
        }
        let mut s: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut t: Vec<f64> = rows.iter().map(|r| r.1).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        t.sort_by(f64::total_cmp);
        t.dedup();
        if s.len() < 2 || t.len() < 2 {
            return invalid("curve table needs at least two distinct s and t values");
        }
        let mut radius = vec![f64::NAN; s.len() * t.len()];
        for &(si, ti, ri) in rows {
            let i = s.binary_search_by(|x| x.total_cmp(&si)).unwrap();
            let j = t.binary_search_by(|x| x.total_cmp(&ti)).unwrap();
            radius[i * t.len() + j] = ri;
        }
        if radius.iter().any(|r| r.is_nan()) {
            return invalid("curve table does not cover a full (s, t) grid");
        }
        let j0 = t
            .iter()
            .position(|&x| x == 0.0)
            .ok_or_else(|| HypError::InvalidParameter("curve table must contain t = 0".into()))?;
        for (i, &si) in s.iter().enumerate() {
            let r = radius[i * t.len() + j0];
            if (r - si).abs() > 1e-12 * si.abs().max(1.0) {
                return invalid(format!("curve table radius at (s={si}, t=0) is {r}, expected s"));
            }
        }
        Ok(CurveTable { s, t, radius })
    }

    fn eval(&self, s: f64, t: f64) -> f64 {
        let (i, u) = locate(&self.s, s);
        let (j, v) = locate(&self.t, t);
        let nt = self.t.len();
        let r = |a: usize, b: usize| self.radius[a * nt + b];
        let base = (1.0 - u) * (1.0 - v) * r(i, j)
            + u * (1.0 - v) * r(i + 1, j)
            + (1.0 - u) * v * r(i, j + 1)
            + u * v * r(i + 1, j + 1);
        if t == 0.0 {
            s
        } else {
            base
        }
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }
}

fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    let k = match grid.binary_search_by(|g| g.total_cmp(&x)) {
        Ok(k) => k.min(n - 2),
        Err(k) => k.saturating_sub(1).min(n - 2),
    };
    let u = (x - grid[k]) / (grid[k + 1] - grid[k]);
    (k, u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurveKind {
    VerticalLine,
    /// Radius `s + c7 |t|^{1/2}`.
    Parabolic { c7: f64 },
    Custom(CurveTable),
}

/// A family of curves `t -> gamma_s(t)` seen through its radial coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub kind: CurveKind,
    /// Hölder exponent in `t`.
    pub alpha: f64,
    /// Hölder constant in `t`.
    pub c1: f64,
    /// Lower bilipschitz constant in `s`.
    pub c2: f64,
    /// Upper bilipschitz constant in `s`.
    pub c3: f64,
}

impl CurveFamily {
    pub fn vertical() -> CurveFamily {
        CurveFamily { kind: CurveKind::VerticalLine, alpha: 1.0, c1: 0.0, c2: 1.0, c3: 1.0 }
    }

    pub fn parabolic(c7: f64) -> Result<CurveFamily> {
        if !(c7 >= 0.0 && c7.is_finite()) {
            return invalid(format!("parabolic constant must be nonnegative, got {c7}"));
        }
        Ok(CurveFamily { kind: CurveKind::Parabolic { c7 }, alpha: 0.5, c1: c7, c2: 1.0, c3: 1.0 })
    }

    pub fn custom(table: CurveTable, alpha: f64, c1: f64, c2: f64, c3: f64) -> Result<CurveFamily> {
        if !(0.5..=1.0).contains(&alpha) {
            return invalid(format!("alpha must lie in [1/2, 1], got {alpha}"));
        }
        if !(c1 >= 0.0 && c2 > 0.0 && c3 >= c2) {
            return invalid("custom curve constants need c1 >= 0 and 0 < c2 <= c3");
        }
        Ok(CurveFamily { kind: CurveKind::Custom(table), alpha, c1, c2, c3 })
    }

    /// Radius `d(e, gamma_s(t))`.
    pub fn radial_eval(&self, s: f64, t: f64) -> f64 {
        match &self.kind {
            CurveKind::VerticalLine => s,
            CurveKind::Parabolic { c7 } => s + c7 * t.abs().sqrt(),
            CurveKind::Custom(table) => table.eval(s, t),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            CurveKind::VerticalLine => "vertical".into(),
            CurveKind::Parabolic { c7 } => format!("parabolic:{c7}"),
            CurveKind::Custom(_) => "custom".into(),
        }
    }
}

/// Largest admissible time window `(C2 r1 / (2 C1))^{1/alpha}`.
pub fn admissible_t(c1: f64, c2: f64, r1: f64, alpha: f64) -> Result<f64> {
    if !(c1 > 0.0 && c2 > 0.0 && r1 > 0.0) {
        return domain(format!("admissible_t needs positive C1, C2, r1; got ({c1}, {c2}, {r1})"));
    }
    if !(0.5..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1/2, 1], got {alpha}"));
    }
    Ok((c2 * r1 / (2.0 * c1)).powf(1.0 / alpha))
}

/// Time bound for a curve family on an annulus; infinite when the radius does
/// not depend on `t`.
pub fn curve_time_bound(curve: &CurveFamily, annulus: &Annulus) -> Result<f64> {
    if curve.c1 == 0.0 {
        Ok(f64::INFINITY)
    } else {
        admissible_t(curve.c1, curve.c2, annulus.r1, curve.alpha)
    }
}

/// Grid estimates of the curve constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub c1_est: f64,
    /// Largest excess of `|dr|` over the declared `C1 |dt|^alpha`.
    pub alpha_residual: f64,
    pub c2_est: f64,
    pub c3_est: f64,
    pub violation: bool,
}

/// Estimate the Hölder constant in `t` and the bilipschitz constants in `s`
/// by exhaustive pair scans, flagging declared constants exceeded by more than
/// `rel_tol`.
pub fn check_curve_conditions(
    curve: &CurveFamily,
    s_grid: &[f64],
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<CurveReport> {
    if s_grid.is_empty() || t_grid.is_empty() {
        return invalid("curve check needs nonempty grids");
    }
    let rows: Vec<(f64, f64, f64, f64)> = crate::par::map(s_grid, |&s| {
        let mut c1: f64 = 0.0;
        let mut resid: f64 = 0.0;
        for (a, &t) in t_grid.iter().enumerate() {
            for &tp in &t_grid[a + 1..] {
                let dt = (t - tp).abs();
                if dt == 0.0 {
                    continue;
                }
                let dr = (curve.radial_eval(s, t) - curve.radial_eval(s, tp)).abs();
                c1 = c1.max(dr / dt.powf(curve.alpha));
                resid = resid.max(dr - curve.c1 * dt.powf(curve.alpha));
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for &sp in s_grid {
            let ds = (s - sp).abs();
            if ds == 0.0 {
                continue;
            }
            for &t in t_grid {
                let q = (curve.radial_eval(s, t) - curve.radial_eval(sp, t)).abs() / ds;
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
        (c1, resid, lo, hi)
    });
    let mut rep = CurveReport {
        c1_est: 0.0,
        alpha_residual: 0.0,
        c2_est: f64::INFINITY,
        c3_est: 0.0,
        violation: false,
    };
    for (c1, resid, lo, hi) in rows {
        rep.c1_est = rep.c1_est.max(c1);
        rep.alpha_residual = rep.alpha_residual.max(resid);
        rep.c2_est = rep.c2_est.min(lo);
        rep.c3_est = rep.c3_est.max(hi);
    }
    if s_grid.len() < 2 {
        rep.c2_est = curve.c2;
        rep.c3_est = curve.c3;
    }
    rep.violation = rep.c1_est > curve.c1 * (1.0 + rel_tol) + 1e-14
        || rep.c2_est < curve.c2 * (1.0 - rel_tol)
        || rep.c3_est > curve.c3 * (1.0 + rel_tol);
    Ok(rep)
}

/// Result of the two-sided growth check `C2 s/2 < radius < 3 C3 s/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub holds: bool,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn curve_growth_bounds(
    curve: &CurveFamily,
    annulus: &Annulus,
    t_max: f64,
    s_grid: &[f64],
    t_grid: &[f64],
) -> Result<GrowthReport> {
    if s_grid.is_empty() || t_grid.is_empty() {
        return invalid("growth check needs nonempty grids");
    }
    let bound = curve_time_bound(curve, annulus)?;
    if !(t_max < bound) {
        return Err(HypError::Precondition(format!(
            "T = {t_max} is not below the admissible bound {bound}"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &s in s_grid {
        for &t in t_grid.iter().filter(|t| t.abs() <= t_max) {
            let q = curve.radial_eval(s, t) / s;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let holds = lo > curve.c2 / 2.0 && hi < 1.5 * curve.c3;
    Ok(GrowthReport { holds, min_ratio: lo, max_ratio: hi })
}

/// Radial coordinate of the exponential chart: the identity on `[0, eps)`.
pub fn pushforward_radius(x_norm: f64, eps: f64) -> Result<f64> {
    if !(x_norm >= 0.0) {
        return domain(format!("radius must be nonnegative, got {x_norm}"));
    }
    if x_norm >= eps {
        return Err(HypError::OutOfRange(format!("radius {x_norm} is outside the chart of size {eps}")));
    }
    Ok(x_norm)
}
