//! TOML configuration, merged with command-line flags into one resolved
//! record whose digest identifies the run.

use crate::args::{CommonArgs, RouteArg};
use crate::error::{CliError, CliResult};
use hypwave_core::counterexample::CounterexampleConfig;
use hypwave_core::geometry::{check_curve_conditions, Annulus, CurveFamily, CurveTable, Space};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub space: String,
    pub annulus: [f64; 2],
    #[serde(rename = "T")]
    pub t_max: f64,
    pub curve: String,
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            space: "h3".into(),
            annulus: [1.0, 2.0],
            t_max: 0.2,
            curve: "vertical".into(),
            tol: 1e-8,
            seed: 0,
            threads: 0,
            out: None,
            plot: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecfunSection {
    pub route: RouteArg,
    pub lambdas: Vec<f64>,
    pub s: Vec<f64>,
}

impl Default for SpecfunSection {
    fn default() -> Self {
        SpecfunSection { route: RouteArg::All, lambdas: vec![0.5, 1.0, 2.0, 8.0], s: vec![0.25, 0.5, 1.0, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSection {
    pub width: f64,
}

impl Default for TransformSection {
    fn default() -> Self {
        TransformSection { width: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagateSection {
    pub band: Option<f64>,
    pub gaussian: [f64; 2],
    pub t_min: f64,
    pub t_per_side: usize,
    pub s_panels: usize,
}

impl Default for PropagateSection {
    fn default() -> Self {
        PropagateSection { band: None, gaussian: [3.0, 1.0], t_min: 1e-6, t_per_side: 32, s_panels: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvecheckSection {
    pub s_nodes: usize,
    pub t_nodes: usize,
    pub rel_tol: f64,
}

impl Default for CurvecheckSection {
    fn default() -> Self {
        CurvecheckSection { s_nodes: 33, t_nodes: 41, rel_tol: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxestSection {
    pub n: Vec<f64>,
    pub random_phase: bool,
    pub t_min: f64,
    pub t_per_side: usize,
    pub s_panels: usize,
    pub beta: f64,
    pub slope_tolerance: f64,
}

impl Default for MaxestSection {
    fn default() -> Self {
        MaxestSection {
            n: (4..=10).map(|k| 2f64.powi(k)).collect(),
            random_phase: false,
            t_min: 1e-6,
            t_per_side: 128,
            s_panels: 2,
            beta: 0.25,
            slope_tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    pub taus: Vec<f64>,
    pub center: f64,
    pub width: f64,
    pub s_panels: usize,
    pub max_reduction: f64,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        ConvergeSection { taus: vec![0.2, 0.1, 0.05, 0.025], center: 3.0, width: 1.0, s_panels: 2, max_reduction: 0.5 }
    }
}

/// The whole configuration file; every section is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub specfun: SpecfunSection,
    pub transform: TransformSection,
    pub propagate: PropagateSection,
    pub curvecheck: CurvecheckSection,
    pub counterexample: CounterexampleConfig,
    pub maxest: MaxestSection,
    pub converge: ConvergeSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Overlay the shared command-line flags.
    pub fn apply(&mut self, a: &CommonArgs) -> CliResult<()> {
        if let Some(s) = &a.space {
            self.run.space = s.clone();
        }
        if let Some(s) = &a.annulus {
            let v: Vec<&str> = s.split(',').collect();
            let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad annulus '{s}'")));
            if v.len() != 2 {
                return Err(CliError::Usage(format!("annulus must be r1,r2, got '{s}'")));
            }
            self.run.annulus = [parse(v[0])?, parse(v[1])?];
        }
        if let Some(t) = a.t_max {
            self.run.t_max = t;
        }
        if let Some(c) = &a.curve {
            self.run.curve = c.clone();
        }
        if let Some(t) = a.tol {
            self.run.tol = t;
        }
        if let Some(o) = &a.out {
            self.run.out = Some(o.clone());
        }
        if let Some(s) = a.seed {
            self.run.seed = s;
        }
        if let Some(t) = a.threads {
            self.run.threads = t;
        }
        self.run.plot |= a.plot;
        Ok(())
    }

    pub fn space(&self) -> CliResult<Space> {
        Space::parse(&self.run.space).map_err(|e| CliError::Usage(format!("--space: {e}")))
    }

    pub fn annulus(&self) -> CliResult<Annulus> {
        Annulus::new(self.run.annulus[0], self.run.annulus[1]).map_err(|e| CliError::Usage(format!("--annulus: {e}")))
    }

    pub fn curve(&self) -> CliResult<CurveFamily> {
        parse_curve(&self.run.curve)
    }

    /// SHA-256 of the canonical JSON of everything that affects numerical
    /// output (the output path, thread count and plot flag are excluded).
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.run.out = None;
        c.run.threads = 0;
        c.run.plot = false;
        let json = serde_json::to_string(&c).expect("configuration serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `vertical`, `parabolic:C7` or `custom:FILE`.
pub fn parse_curve(text: &str) -> CliResult<CurveFamily> {
    let t = text.trim();
    let usage = |m: String| CliError::Usage(format!("--curve: {m}"));
    if t == "vertical" {
        return Ok(CurveFamily::vertical());
    }
    if let Some(c) = t.strip_prefix("parabolic:") {
        let c7: f64 = c.trim().parse().map_err(|_| usage(format!("bad constant in '{t}'")))?;
        return CurveFamily::parabolic(c7).map_err(|e| usage(e.to_string()));
    }
    if let Some(path) = t.strip_prefix("custom:") {
        return load_custom_curve(Path::new(path));
    }
    Err(usage(format!("expected vertical, parabolic:C7 or custom:FILE, got '{t}'")))
}

/// Rows `s,t,radius`; `#` starts a comment. A comment of the form
/// `# alpha=A c1=C1 c2=C2 c3=C3` declares the constants, which otherwise are
/// estimated from the table with `alpha = 1`.
pub fn load_custom_curve(path: &Path) -> CliResult<CurveFamily> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read curve file {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut declared: Vec<(String, f64)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(c) = line.strip_prefix('#') {
            for tok in c.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    if let Ok(v) = v.parse::<f64>() {
                        declared.push((k.to_string(), v));
                    }
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("{}:{}: expected s,t,radius", path.display(), no + 1)))?;
        if vals.len() != 3 {
            return Err(CliError::Config(format!("{}:{}: expected three columns", path.display(), no + 1)));
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    let table = CurveTable::from_rows(&rows).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let get = |k: &str| declared.iter().find(|(n, _)| n == k).map(|p| p.1);
    let alpha = get("alpha").unwrap_or(1.0);
    let (c1, c2, c3) = match (get("c1"), get("c2"), get("c3")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => {
            let probe = CurveFamily::custom(table.clone(), alpha, 0.0, 1.0, 1.0).map_err(|e| CliError::Config(e.to_string()))?;
            let mut s: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let mut t: Vec<f64> = rows.iter().map(|r| r.1).collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            t.sort_by(f64::total_cmp);
            t.dedup();
            let rep = check_curve_conditions(&probe, &s, &t, 0.0).map_err(|e| CliError::Config(e.to_string()))?;
            (rep.c1_est, rep.c2_est, rep.c3_est.max(rep.c2_est))
        }
    };
    CurveFamily::custom(table, alpha, c1, c2, c3).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
