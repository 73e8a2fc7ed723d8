//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Run with `cargo test --test acceptance`; pass criterion numbers
//! as arguments to run a subset.

use hypwave_core::counterexample::{
    band_mass, band_mass_quadrature, blowup_report, build_sequences, h_half_band, h_half_envelope, partial_solution_u_m,
    CounterexampleConfig, TermMethod,
};
use hypwave_core::experiments::{band_sweep, convergence_table, ExperimentPlan};
use hypwave_core::geometry::{Annulus, CurveFamily, Space};
use hypwave_core::propagator::{gaussian_band, group_property_residual, parabolic_rescale_check, Propagator};
use hypwave_core::quadrature::lemma23_kernel;
use hypwave_core::specfun::{bessel_series, phi_closed_h3, phi_ode, plancherel_density};
use hypwave_core::transforms::{
    abel, abel_kernel, fourier1d_even, relative_l2_error, sft_forward, sft_inverse, sobolev_norm, Grid, RadialProfile,
    SobolevSpec, SpectralProfile, TailKind,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::time::Instant;

/// Certified ratios `lower bound / (log R_k)^{1/4}` at k = 1, 2, 3 for the
/// default construction, pinned from the reference run.
const FROZEN_RATIOS: [f64; 3] = [0.09005249415808662, 0.33798407140751485, 0.5202859881835331];
const FROZEN_LOWER_BOUNDS: [f64; 3] = [0.10142950422784491, 0.6352149704143739, 1.1786758748782407];

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn test_spaces() -> [Space; 3] {
    [Space::h3(), Space::damek_ricci(2, 1).unwrap(), Space::damek_ricci(4, 3).unwrap()]
}

fn c1_oracle_agreement() -> Verdict {
    let start = Instant::now();
    let nodes: Vec<f64> = (0..241).map(|i| 0.05 + (6.0 - 0.05) * i as f64 / 240.0).collect();
    let mut worst: f64 = 0.0;
    for l in [0.5, 1.0, 2.0, 8.0] {
        let ode = phi_ode(&Space::h3(), l, &nodes, 1e-12).unwrap();
        for (&s, o) in nodes.iter().zip(ode) {
            worst = worst.max((phi_closed_h3(l, s) - o).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(worst <= 1e-8 && secs < 10.0, format!("max |closed - ode| = {worst:.3e}, {secs:.2} s"))
}

fn c2_normalization() -> Verdict {
    let nodes: Vec<f64> = (0..=120).map(|i| i as f64 * 0.05).collect();
    let (mut at_zero, mut top): (f64, f64) = (0.0, 0.0);
    for sp in [Space::real_hyperbolic(2).unwrap(), Space::damek_ricci(2, 1).unwrap(), Space::damek_ricci(4, 3).unwrap()] {
        for l in [0.0, 0.5, 1.0, 2.0, 8.0, 20.0] {
            let v = phi_ode(&sp, l, &nodes, 1e-12).unwrap();
            at_zero = at_zero.max((v[0] - 1.0).abs());
            top = top.max(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
    }
    verdict(at_zero <= 1e-8 && top <= 1.0 + 1e-6, format!("max |phi(0) - 1| = {at_zero:.3e}, max |phi| = {top:.12}"))
}

fn series_slope(sp: &Space, order: usize) -> f64 {
    let ser = bessel_series(sp, order);
    let radii: Vec<f64> = (0..9).map(|i| 0.05 * 16f64.powf(i as f64 / 8.0)).collect();
    let mut errs = Vec::new();
    for &s in &radii {
        let mut worst: f64 = 0.0;
        for k in 0..=16 {
            let l = k as f64 / 16.0 / s;
            let o = phi_ode(sp, l, &[s], 1e-13).unwrap()[0];
            worst = worst.max((ser.eval(l, s).unwrap().value - o).abs());
        }
        errs.push(worst);
    }
    hypwave_core::experiments::loglog_slope(&radii, &errs)
}

fn c3_series_exponent() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for sp in [Space::damek_ricci(4, 3).unwrap(), Space::damek_ricci(2, 3).unwrap()] {
        for m in [0usize, 1] {
            let slope = series_slope(&sp, m);
            ok &= (slope - 2.0 * (m as f64 + 1.0)).abs() <= 0.3;
            parts.push(format!("{sp} M={m}: {slope:.3}"));
        }
    }
    verdict(ok, parts.join(", "))
}

fn c4_plancherel() -> Verdict {
    let lambdas: Vec<f64> = (0..=120).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 120.0)).collect();
    let mut worst_factor: f64 = 0.0;
    for sp in test_spaces() {
        let n = sp.dim() as i32;
        let r: Vec<f64> = lambdas.iter().map(|&l| plancherel_density(&sp, l).unwrap() / (l * l * (1.0 + l).powi(n - 3))).collect();
        let hi = r.iter().copied().fold(0.0, f64::max);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        worst_factor = worst_factor.max(hi / lo);
    }
    let h3: Vec<f64> = lambdas.iter().map(|&l| plancherel_density(&Space::h3(), l).unwrap() / (l * l)).collect();
    let spread = h3.iter().map(|r| (r / h3[0] - 1.0).abs()).fold(0.0, f64::max);
    verdict(worst_factor <= 100.0 && spread <= 1e-6, format!("two-sided factor {worst_factor:.3}, H3 ratio spread {spread:.2e}"))
}

fn c5_transforms() -> Verdict {
    let family: Vec<(f64, f64, u32)> = (0..10).map(|k| (0.6 + 0.15 * k as f64, 0.3 * (k % 4) as f64, (k % 3) as u32)).collect();
    let (mut rt, mut iso): (f64, f64) = (0.0, 0.0);
    for sp in test_spaces() {
        for &(a, b, p) in &family {
            let f = RadialProfile::from_fn(&sp, Grid::standard_radial(), move |s| {
                Complex64::new((1.0 + b * s * s).powi(p as i32) * (-a * s * s).exp(), 0.0)
            });
            let fhat = sft_forward(&sp, &f).unwrap();
            let back = sft_inverse(&sp, &fhat).unwrap();
            rt = rt.max(relative_l2_error(&f, &back).unwrap());
            let n = sobolev_norm(&sp, &fhat, SobolevSpec { beta: 0.0, homogeneous: true }).unwrap();
            iso = iso.max((n / f.l2_norm() - 1.0).abs());
        }
    }
    // Abel diagram: the spectral Abel transform against its integral kernel,
    // and the 1-D Fourier transform of the Abel transform against the
    // spherical transform
    let mut diagram: f64 = 0.0;
    for sp in [Space::h3(), Space::euclidean(3).unwrap()] {
        let f = RadialProfile::from_fn(&sp, Grid::standard_radial(), |s| Complex64::new((1.0 + s * s) * (-s * s).exp(), 0.0));
        let g = abel(&sp, &f).unwrap();
        let scale = g.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for (x, v) in g.grid.nodes.iter().zip(&g.values).step_by(7) {
            let k = abel_kernel(&sp, |s| (1.0 + s * s) * (-s * s).exp(), *x, 12.0).unwrap();
            diagram = diagram.max((v.re - k).abs() / scale);
        }
        let fhat = sft_forward(&sp, &f).unwrap();
        let gt = fourier1d_even(&g, fhat.grid.clone());
        let hscale = fhat.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for (a, b) in gt.values.iter().zip(&fhat.values) {
            diagram = diagram.max((a - b).norm() / hscale);
        }
    }
    verdict(
        rt <= 1e-6 && iso <= 1e-6 && diagram <= 1e-6,
        format!("roundtrip {rt:.2e}, isometry {iso:.2e}, Abel diagram {diagram:.2e}"),
    )
}

fn c6_propagator() -> Verdict {
    let mut zero: f64 = 0.0;
    for sp in [Space::h3(), Space::damek_ricci(2, 1).unwrap(), Space::euclidean(3).unwrap()] {
        let f = RadialProfile::from_fn(&sp, Grid::standard_radial(), |s| Complex64::new((-s * s).exp(), 0.0));
        let fhat = sft_forward(&sp, &f).unwrap();
        let p = Propagator::new(&sp, &fhat, 1e-11).unwrap();
        for s in [0.1, 0.7, 1.5, 3.0] {
            zero = zero.max((p.eval(s, 0.0).unwrap() - (-s * s).exp()).norm());
        }
    }
    let f = RadialProfile::from_fn(&Space::h3(), Grid::standard_radial(), |s| Complex64::new((-s * s).exp(), 0.0));
    let group = group_property_residual(&Space::h3(), &f, 0.03, 0.2).unwrap();
    let fhat = gaussian_band(4.0, 1.0);
    let p = Propagator::new(&Space::h3(), &fhat, 1e-11).unwrap();
    let mut split: f64 = 0.0;
    for s in [0.6, 1.0, 1.7, 2.5] {
        for t in [0.0, 0.05, -0.12, 0.3] {
            let (a, b) = p.eval_split(s, t).unwrap();
            split = split.max((a + b - p.eval_direct(s, t).unwrap()).norm());
        }
    }
    verdict(
        zero <= 1e-6 && group <= 1e-8 && split <= 1e-7,
        format!("S_0 f - f {zero:.2e}, group {group:.2e}, split vs direct {split:.2e}"),
    )
}

fn c7_rescaling() -> Verdict {
    let fhat = gaussian_band(4.0, 1.0);
    let mut worst: f64 = 0.0;
    for eta in [2.0, 5.0] {
        for &(s, t) in &[(1.3, 0.04), (0.8, -0.1), (2.0, 0.15)] {
            worst = worst.max(parabolic_rescale_check(3, &fhat, 1.0, eta, s, t).unwrap().residual);
        }
    }
    let n = 3u32;
    let sp = Space::euclidean(n).unwrap();
    let base = |l: f64| Complex64::new((-(l - 3.0) * (l - 3.0)).exp(), 0.0);
    let f = SpectralProfile::from_fn(base, Grid::gauss(0.0, 12.0, 12, 16), (0.0, 12.0), TailKind::Schwartz);
    let s0 = sobolev_norm(&sp, &f, SobolevSpec { beta: 0.25, homogeneous: true }).unwrap();
    let mut law_dev: f64 = 0.0;
    for eta in [2.0, 5.0] {
        let scaled = hypwave_core::propagator::scale_profile(&f, n, eta).unwrap();
        let s = sobolev_norm(&sp, &scaled, SobolevSpec { beta: 0.25, homogeneous: true }).unwrap();
        law_dev = law_dev.max((s / s0 / eta.powf(0.25 - n as f64 / 2.0) - 1.0).abs());
    }
    verdict(worst <= 1e-8 && law_dev <= 1e-8, format!("identity residual {worst:.2e}, Sobolev law deviation {law_dev:.2e}"))
}

fn c8_lemma_uniformity() -> Verdict {
    let start = Instant::now();
    let curve = CurveFamily::parabolic(1.0).unwrap();
    let t_max = 0.2;
    let c_shift = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut pairs = Vec::new();
    while pairs.len() < 100 {
        let (s, sp) = (rng.gen_range(1.0..2.0), rng.gen_range(1.0..2.0));
        let (t, tp) = (rng.gen_range(-t_max..t_max), rng.gen_range(-t_max..t_max));
        let dk: f64 = curve.radial_eval(sp, tp) - curve.radial_eval(s, t);
        let gap: f64 = (s - sp).abs();
        // admissible: the radial separation stays comparable to |s - s'|
        if gap >= 1e-3 && dk.abs() >= 0.5 * gap {
            pairs.push((dk, tp - t, gap));
        }
    }
    let mut maxima = Vec::new();
    for n in [16.0, 64.0, 256.0, 1024.0] {
        let m = pairs
            .iter()
            .map(|&(dk, dt, gap)| lemma23_kernel(dk, dt, c_shift, n, 1e-8).unwrap().value.norm() * gap.sqrt())
            .fold(0.0, f64::max);
        maxima.push(m);
    }
    let hi = maxima.iter().copied().fold(0.0, f64::max);
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        hi / lo < 4.0 && secs < 60.0,
        format!("max |I_N| |s-s'|^(1/2) over N: {}, spread {:.3}, {secs:.1} s", fmt_list(&maxima), hi / lo),
    )
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn c9_counterexample() -> Verdict {
    let config = CounterexampleConfig::default();
    let data = build_sequences(&config).unwrap();
    let certs = data.certificates.iter().all(|c| c.holds);
    let mut diag: f64 = 0.0;
    for j in 1..=data.band_count() {
        let (r, big_r) = (data.r_seq[j - 1], data.big_r_seq[j - 1]);
        let exact = 4.0 * (big_r.ln().powf(0.25) - r.ln().powf(0.25));
        diag = diag.max((band_mass(r, big_r) - exact).abs()).max((band_mass_quadrature(r, big_r) - exact).abs());
    }
    for k in 1..=config.k {
        let s = data.s_seq[k - 1];
        let u = partial_solution_u_m(&data, data.band_count(), s, data.t_seq[k - 1]).unwrap();
        let term = u.terms.iter().find(|t| t.j == k && t.branch == 2 && t.method == TermMethod::ClosedForm).unwrap();
        let exact = band_mass(data.r_seq[k - 1], data.big_r_seq[k - 1]) / (4.0 * s.sinh().powi(2));
        diag = diag.max((term.value.re - exact).abs());
    }
    let report = blowup_report(&data, config.k).unwrap();
    let lower: Vec<f64> = report.rows.iter().map(|r| r.lower_bound).collect();
    let increasing = lower.windows(2).all(|w| w[1] > w[0]) && lower[0] > 0.0;
    let ratios_hold = report.rows.iter().zip(FROZEN_RATIOS).all(|(r, f)| r.ratio >= f * (1.0 - 1e-6));
    let bounds_hold = lower.iter().zip(FROZEN_LOWER_BOUNDS).all(|(l, f)| *l >= f * (1.0 - 1e-6));
    let envelope = h_half_envelope(&config);
    let mut partial = 0.0;
    let mut cauchy = true;
    for j in 1..=data.band_count() {
        let inc = h_half_band(&data, j).unwrap();
        let tail = envelope * (3f64.ln() / data.r_seq[j - 1].ln()).sqrt();
        partial += inc;
        cauchy &= inc >= 0.0 && inc <= tail && partial <= envelope;
    }
    verdict(
        certs && diag <= 1e-8 && increasing && ratios_hold && bounds_hold && cauchy,
        format!(
            "certificates {certs}, diagonal {diag:.2e}, lower bounds {}, ratios {}, H^1/2 partial {partial:.4} <= {envelope:.4}",
            fmt_list(&lower),
            fmt_list(&report.rows.iter().map(|r| r.ratio).collect::<Vec<_>>())
        ),
    )
}

fn annulus() -> Annulus {
    Annulus::new(1.0, 2.0).unwrap()
}

fn c10_maximal_ratio() -> Verdict {
    let n_list: Vec<f64> = (4..=10).map(|k| 2f64.powi(k)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for curve in [CurveFamily::vertical(), CurveFamily::parabolic(1.0).unwrap()] {
        let plan = ExperimentPlan::new(Space::h3(), curve.clone(), annulus(), 0.2);
        let sweep = band_sweep(&plan, &n_list, None).unwrap();
        ok &= sweep.slope.abs() <= 0.15;
        parts.push(format!("H3 {}: slope {:.4}", curve.label(), sweep.slope));
    }
    verdict(ok, parts.join(", "))
}

fn c11_convergence() -> Verdict {
    let taus = [0.2, 0.1, 0.05, 0.025];
    let fhat = gaussian_band(3.0, 1.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for sp in [Space::h3(), Space::euclidean(3).unwrap()] {
        for curve in [CurveFamily::vertical(), CurveFamily::parabolic(1.0).unwrap()] {
            let plan = ExperimentPlan::new(sp, curve.clone(), annulus(), 0.2);
            let rep = convergence_table(&plan, &fhat, &taus).unwrap();
            ok &= rep.strictly_decreasing && rep.reduction < 0.5;
            parts.push(format!("{sp} {}: {:.3}", curve.label(), rep.reduction));
        }
    }
    verdict(ok, format!("strictly decreasing with e(0.025)/e(0.2): {}", parts.join(", ")))
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c12_determinism() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 7] = [
        &["specfun"],
        &["transform"],
        &["propagate", "--band", "64"],
        &["curvecheck", "--curve", "parabolic:1"],
        &["counterexample"],
        &["maxest", "--random-phase", "--seed", "7", "--n", "16,64,256"],
        &["converge", "--curve", "parabolic:1"],
    ];
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for cmd in commands {
        let mut runs = Vec::new();
        for threads in ["1", "4", "1"] {
            let out = root.path().join(format!("{}-{threads}-{}", cmd[0], runs.len()));
            let mut argv = vec!["hypwave".to_string()];
            argv.extend(cmd.iter().map(|s| s.to_string()));
            argv.extend(["--threads".into(), threads.into(), "--out".into(), out.to_string_lossy().into_owned()]);
            let code = hypwave_cli::run_quiet(argv);
            if code != 0 {
                mismatched.push(format!("{} exited {code}", cmd[0]));
            }
            runs.push(csv_bytes(&out));
        }
        compared += runs[0].len();
        if runs[0].is_empty() || runs.iter().any(|r| *r != runs[0]) {
            mismatched.push(cmd[0].to_string());
        }
    }
    verdict(mismatched.is_empty(), format!("{compared} CSV files identical across 1/4/1 threads; mismatches: {mismatched:?}"))
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 12] = [
        ("spherical-function oracle agreement", c1_oracle_agreement),
        ("normalization and bound", c2_normalization),
        ("Bessel-series error exponent", c3_series_exponent),
        ("Plancherel asymptotic", c4_plancherel),
        ("transform roundtrips, isometry, Abel diagram", c5_transforms),
        ("propagator identities", c6_propagator),
        ("parabolic rescaling", c7_rescaling),
        ("oscillatory kernel uniformity", c8_lemma_uniformity),
        ("blow-up construction", c9_counterexample),
        ("maximal-ratio stability", c10_maximal_ratio),
        ("convergence tables", c11_convergence),
        ("determinism across thread counts", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let v = f();
        println!(
            "criterion {k:>2} {}: {name} ({:.1} s) {}",
            if v.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
