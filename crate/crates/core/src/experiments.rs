//! Maximal-estimate ratios, dyadic band sweeps and convergence tables.

use crate::error::{HypError, Result};
use crate::geometry::{Annulus, CurveFamily, Space};
use crate::par;
use crate::propagator::{geometric_time_grid, propagate_along_curve, refine_sup, scale_profile, PropagationRequest, Propagator};
use crate::quadrature::smooth_cutoff;
use crate::transforms::{sobolev_norm, Grid, SobolevSpec, SpectralProfile, TailKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spectral profiles used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// `exp(-(lambda - center)^2 / (2 width^2))`.
    GaussianBand { center: f64, width: f64 },
    /// `psi((lambda - N) / sqrt N)` with `psi` the smooth cutoff.
    KnappBand { n: f64 },
    /// A Knapp band times `exp(i theta(lambda))` with a seeded random smooth phase.
    RandomPhaseBand { n: f64, seed: u64 },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::GaussianBand { center, width } => format!("gaussian:{center}:{width}"),
            Family::KnappBand { n } => format!("knapp:{n}"),
            Family::RandomPhaseBand { n, seed } => format!("random-phase:{n}:{seed}"),
        }
    }

    /// Frequency scale of the member.
    pub fn scale(&self) -> f64 {
        match *self {
            Family::GaussianBand { center, .. } => center,
            Family::KnappBand { n } | Family::RandomPhaseBand { n, .. } => n,
        }
    }

    pub fn profile(&self) -> Result<SpectralProfile> {
        match *self {
            Family::GaussianBand { center, width } => {
                if !(width > 0.0 && center.is_finite()) {
                    return Err(HypError::InvalidParameter(format!("Gaussian band needs a positive width, got {width}")));
                }
                Ok(crate::propagator::gaussian_band(center, width))
            }
            Family::KnappBand { n } => knapp(n, |_| 0.0),
            Family::RandomPhaseBand { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let modes: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-PI..PI), rng.gen_range(0.0..2.0 * PI))).collect();
                let w = n.sqrt();
                knapp(n, move |l| {
                    let x = (l - n) / (2.0 * w);
                    modes.iter().enumerate().map(|(k, &(a, p))| a * ((k + 1) as f64 * PI * x + p).sin()).sum()
                })
            }
        }
    }
}

fn knapp<P: Fn(f64) -> f64 + Send + Sync + 'static>(n: f64, phase: P) -> Result<SpectralProfile> {
    if !(n >= 4.0 && n.is_finite()) {
        return Err(HypError::InvalidParameter(format!("band centre must be at least 4, got {n}")));
    }
    let w = n.sqrt();
    let (lo, hi) = (n - 2.0 * w, n + 2.0 * w);
    Ok(SpectralProfile::from_fn(
        move |l| Complex64::from_polar(smooth_cutoff((l - n) / w), phase(l)),
        Grid::gauss(lo, hi, 16, 16),
        (lo, hi),
        TailKind::CompactSupport,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub space: Space,
    pub curve: CurveFamily,
    pub annulus: Annulus,
    pub t_max: f64,
    /// Smallest positive node of the geometric time grid.
    pub t_min: f64,
    pub t_per_side: usize,
    /// Gauss-Legendre panels (8 nodes each) across the annulus.
    pub s_panels: usize,
    pub beta: f64,
    pub tol: f64,
}

impl ExperimentPlan {
    pub fn new(space: Space, curve: CurveFamily, annulus: Annulus, t_max: f64) -> ExperimentPlan {
        ExperimentPlan { space, curve, annulus, t_max, t_min: 1e-6, t_per_side: 128, s_panels: 2, beta: 0.25, tol: 1e-8 }
    }

    fn s_grid(&self) -> Grid {
        Grid::gauss(self.annulus.r1, self.annulus.r2, self.s_panels.max(1), 8)
    }

    fn annulus_l2(&self, grid: &Grid, vals: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for ((&s, &w), &v) in grid.nodes.iter().zip(&grid.weights).zip(vals) {
            acc += w * v * v * self.space.density(s)?;
        }
        Ok(acc.sqrt())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEntry {
    pub label: String,
    pub scale: f64,
    /// `L^2(annulus, A ds)` norm of the supremum over time.
    pub lhs: f64,
    pub norm: f64,
    /// `None` when the norm vanishes.
    pub ratio: Option<f64>,
    /// Largest relative increase of a supremum produced by refinement.
    pub max_refinement_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub entries: Vec<RatioEntry>,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

/// Maximal-estimate ratio for one spectral profile.
pub fn maximal_ratio(plan: &ExperimentPlan, label: &str, scale: f64, fhat: &SpectralProfile) -> Result<RatioEntry> {
    let grid = plan.s_grid();
    let req = PropagationRequest {
        space: plan.space,
        fhat,
        curve: plan.curve.clone(),
        s_nodes: grid.nodes.clone(),
        t_nodes: geometric_time_grid(plan.t_max, plan.t_min, plan.t_per_side)?,
        t_max: plan.t_max,
        tol: plan.tol,
        refine: true,
    };
    let norm = sobolev_norm(&plan.space, fhat, SobolevSpec { beta: plan.beta, homogeneous: true })?;
    if !norm.is_finite() {
        return Err(HypError::Tail(format!("{label}: Sobolev norm diverges")));
    }
    let slice = propagate_along_curve(&req)?;
    let lhs = plan.annulus_l2(&grid, &slice.sup_t)?;
    let gain = slice
        .refinement_gain
        .iter()
        .zip(&slice.sup_t)
        .map(|(g, s)| if *s > 0.0 { g / s } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(RatioEntry {
        label: label.to_string(),
        scale,
        lhs,
        norm,
        ratio: if norm > 0.0 { Some(lhs / norm) } else { None },
        max_refinement_gain: gain,
    })
}

/// Ratios over a family; members with a vanishing norm are excluded from the
/// extremes.
pub fn maximal_ratio_family(plan: &ExperimentPlan, family: &[Family]) -> Result<RatioReport> {
    let mut entries = Vec::with_capacity(family.len());
    for member in family {
        entries.push(maximal_ratio(plan, &member.label(), member.scale(), &member.profile()?)?);
    }
    let ratios: Vec<f64> = entries.iter().filter_map(|e| e.ratio).collect();
    Ok(RatioReport {
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub entries: Vec<RatioEntry>,
    /// Least-squares slope of `log ratio` against `log N`.
    pub slope: f64,
    pub slope_tolerance: f64,
    pub passed: bool,
}

/// Least-squares slope of `y` against `x`; zero for fewer than two points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let lx: Vec<f64> = x[..n].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y[..n].iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Ratios for Knapp bands (or seeded random-phase bands) at each `N`.
pub fn band_sweep(plan: &ExperimentPlan, n_list: &[f64], seed: Option<u64>) -> Result<SweepReport> {
    let family: Vec<Family> = n_list
        .iter()
        .map(|&n| match seed {
            None => Family::KnappBand { n },
            Some(s) => Family::RandomPhaseBand { n, seed: s },
        })
        .collect();
    let report = maximal_ratio_family(plan, &family)?;
    let pairs: Vec<(f64, f64)> = report.entries.iter().filter_map(|e| e.ratio.map(|r| (e.scale, r))).collect();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let slope = loglog_slope(&xs, &ys);
    let slope_tolerance = 0.15;
    Ok(SweepReport { entries: report.entries, slope, slope_tolerance, passed: slope.abs() <= slope_tolerance })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub strictly_decreasing: bool,
    /// `e(tau_min) / e(tau_max)` over the positive taus.
    pub reduction: f64,
}

/// Nodes per smallest positive tau in the shared uniform time grid.
const CONVERGENCE_NODES: f64 = 16.0;

/// `e(tau)`: the `L^2(annulus, A ds)` norm of `sup_{|t| <= tau} |S_t f(gamma_s(t)) - f(s)|`.
/// All taus share one uniform time grid, so the suprema are nested.
pub fn convergence_table(plan: &ExperimentPlan, fhat: &SpectralProfile, taus: &[f64]) -> Result<ConvergenceReport> {
    if taus.iter().any(|t| !(*t >= 0.0 && *t <= plan.t_max)) {
        return Err(HypError::InvalidParameter(format!("taus must lie in [0, {}]", plan.t_max)));
    }
    let tau_max = taus.iter().copied().fold(0.0, f64::max);
    let tau_min = taus.iter().copied().filter(|t| *t > 0.0).fold(f64::INFINITY, f64::min);
    let grid = plan.s_grid();
    let prop = Propagator::new(&plan.space, fhat, plan.tol)?;
    let ts: Vec<f64> = if tau_max > 0.0 {
        let h = tau_min / CONVERGENCE_NODES;
        let k = (tau_max / h).round() as i64;
        (-k..=k).map(|i| i as f64 * h).collect()
    } else {
        vec![0.0]
    };
    let mut sorted: Vec<f64> = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sups: Vec<Result<Vec<f64>>> = par::map(&grid.nodes, |&s| {
        let f0 = prop.eval(s, 0.0)?;
        let pts: Vec<(f64, f64)> = ts.iter().map(|&t| (plan.curve.radial_eval(s, t), t)).collect();
        let vals: Vec<f64> = prop.eval_many(&pts)?.iter().map(|v| (v - f0).norm()).collect();
        let eval = |t: f64| -> Result<f64> { Ok((prop.eval(plan.curve.radial_eval(s, t), t)? - f0).norm()) };
        let mut out = Vec::with_capacity(sorted.len());
        let mut carry: f64 = 0.0;
        for &tau in &sorted {
            let idx: Vec<usize> = (0..ts.len()).filter(|&i| ts[i].abs() <= tau * (1.0 + 1e-12)).collect();
            let sub_t: Vec<f64> = idx.iter().map(|&i| ts[i]).collect();
            let sub_v: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
            let (sup, _, _) = refine_sup(&eval, &sub_t, &sub_v)?;
            carry = carry.max(sup);
            out.push(carry);
        }
        Ok(out)
    });
    let sups: Vec<Vec<f64>> = sups.into_iter().collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(sorted.len());
    for (k, &tau) in sorted.iter().enumerate() {
        let col: Vec<f64> = sups.iter().map(|r| r[k]).collect();
        rows.push(ConvergenceRow { tau, error: plan.annulus_l2(&grid, &col)? });
    }
    rows.reverse();
    let strictly_decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
    let pos: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.tau > 0.0).collect();
    let reduction = match (pos.first(), pos.last()) {
        (Some(a), Some(b)) if a.error > 0.0 => b.error / a.error,
        _ => 0.0,
    };
    Ok(ConvergenceReport { rows, strictly_decreasing, reduction })
}

/// Ratio on the plan's annulus against `eta^{1/4}` times the ratio of
/// `f(eta x)` on the annulus scaled by `1/eta` with times scaled by `1/eta^2`
/// (parabolic curves on Euclidean space).
pub fn parabolic_ratio_consistency(plan: &ExperimentPlan, fhat: &SpectralProfile, eta: f64) -> Result<(f64, f64)> {
    let n = match plan.space {
        Space::Euclidean { n } => n,
        _ => return Err(HypError::InvalidParameter("rescaling consistency is a Euclidean statement".into())),
    };
    let base = maximal_ratio(plan, "base", 1.0, fhat)?;
    let scaled_plan = ExperimentPlan {
        annulus: Annulus::new(plan.annulus.r1 / eta, plan.annulus.r2 / eta)?,
        t_max: plan.t_max / (eta * eta),
        t_min: plan.t_min / (eta * eta),
        ..plan.clone()
    };
    let scaled = maximal_ratio(&scaled_plan, "scaled", eta, &scale_profile(fhat, n, eta)?)?;
    match (base.ratio, scaled.ratio) {
        (Some(a), Some(b)) => Ok((a, eta.powf(plan.beta) * b)),
        _ => Err(HypError::InvalidParameter("zero profile".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(curve: CurveFamily) -> ExperimentPlan {
        ExperimentPlan { t_per_side: 48, s_panels: 1, ..ExperimentPlan::new(Space::h3(), curve, Annulus::new(1.0, 2.0).unwrap(), 0.2) }
    }

    #[test]
    fn zero_profile_is_excluded() {
        let zero = SpectralProfile::from_fn(|_| Complex64::new(0.0, 0.0), Grid::gauss(4.0, 8.0, 2, 8), (4.0, 8.0), TailKind::CompactSupport);
        let e = maximal_ratio(&plan(CurveFamily::vertical()), "zero", 6.0, &zero).unwrap();
        assert_eq!(e.ratio, None);
        assert_eq!(e.lhs, 0.0);
    }

    #[test]
    fn single_band_against_dense_scan() {
        let p = plan(CurveFamily::vertical());
        let fam = Family::KnappBand { n: 16.0 };
        let fhat = fam.profile().unwrap();
        let e = maximal_ratio(&p, "k16", 16.0, &fhat).unwrap();
        let r = e.ratio.unwrap();
        assert!(r.is_finite() && r > 0.0);
        // dense uniform time scan at the same radii
        let prop = Propagator::new(&Space::h3(), &fhat, 1e-8).unwrap();
        let grid = p.s_grid();
        let sups: Vec<f64> = grid
            .nodes
            .iter()
            .map(|&s| (0..=4000).map(|k| prop.eval(s, 0.2 * k as f64 / 4000.0).unwrap().norm()).fold(0.0, f64::max))
            .collect();
        let dense = p.annulus_l2(&grid, &sups).unwrap();
        assert!(e.lhs >= dense * (1.0 - 1e-9), "{} vs {dense}", e.lhs);
        assert!(e.lhs <= dense * 1.001, "{} vs {dense}", e.lhs);
    }

    #[test]
    fn slope_helper() {
        assert_eq!(loglog_slope(&[16.0], &[3.0]), 0.0);
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.7)).collect();
        assert!((loglog_slope(&x, &y) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn convergence_decays() {
        let p = plan(CurveFamily::vertical());
        let fhat = Family::GaussianBand { center: 3.0, width: 1.0 }.profile().unwrap();
        let rep = convergence_table(&p, &fhat, &[0.2, 0.1, 0.05, 0.025, 0.0]).unwrap();
        assert!(rep.strictly_decreasing, "{rep:?}");
        assert_eq!(rep.rows.last().unwrap().error, 0.0);
        assert!(rep.reduction < 0.5);
    }

    #[test]
    fn random_phase_is_seeded() {
        let a = Family::RandomPhaseBand { n: 64.0, seed: 7 }.profile().unwrap();
        let b = Family::RandomPhaseBand { n: 64.0, seed: 7 }.profile().unwrap();
        let c = Family::RandomPhaseBand { n: 64.0, seed: 8 }.profile().unwrap();
        assert_eq!(a.eval(63.3), b.eval(63.3));
        assert_ne!(a.eval(63.3), c.eval(63.3));
        let k = Family::KnappBand { n: 64.0 }.profile().unwrap();
        let h = SobolevSpec { beta: 0.25, homogeneous: true };
        let na = sobolev_norm(&Space::h3(), &a, h).unwrap();
        let nk = sobolev_norm(&Space::h3(), &k, h).unwrap();
        assert!((na / nk - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rescaling_consistency() {
        let sp = Space::euclidean(3).unwrap();
        let p = ExperimentPlan {
            t_per_side: 32,
            s_panels: 1,
            ..ExperimentPlan::new(sp, CurveFamily::parabolic(1.0).unwrap(), Annulus::new(1.0, 2.0).unwrap(), 0.2)
        };
        let fhat = Family::KnappBand { n: 16.0 }.profile().unwrap();
        let (a, b) = parabolic_ratio_consistency(&p, &fhat, 2.0).unwrap();
        assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
    }
}
