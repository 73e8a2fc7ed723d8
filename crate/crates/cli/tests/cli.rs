use hypwave_cli::config::{parse_curve, RunConfig};
use hypwave_cli::output::{CSV_HEADER, MANIFEST};
use hypwave_cli::run_quiet;
use std::fs;
use std::path::Path;

fn run_in(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["hypwave".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--out".to_string(), out.to_string_lossy().into_owned()]);
    run_quiet(argv)
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST)).unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_and_bad_flags_exit_one() {
    assert_eq!(run_quiet(["hypwave", "badcmd"]), 1);
    assert_eq!(run_quiet(["hypwave", "specfun", "--space", "sphere"]), 1);
    assert_eq!(run_quiet(["hypwave", "specfun", "--annulus", "2"]), 1);
    assert_eq!(run_quiet(["hypwave", "specfun", "--curve", "zigzag"]), 1);
    assert_eq!(run_quiet(["hypwave", "--version"]), 0);
}

#[test]
fn default_config_counterexample_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.cfg");
    let out = tmp.path().join("ce");
    assert_eq!(run_in(&out, &["counterexample", "--config", cfg.to_str().unwrap()]), 0);
    let report = fs::read_to_string(out.join("blowup_report.csv")).unwrap();
    assert!(report.starts_with(CSV_HEADER));
    assert_eq!(report.lines().count(), 2 + 3);
    let m = manifest(&out);
    assert_eq!(m["passed"], true);
    assert_eq!(m["command"], "counterexample");
    assert_eq!(m["calibration"]["c0_star"], 1.0);
    let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in ["sequences.csv", "certificates.csv", "blowup_report.csv", "h_half.csv"] {
        assert!(listed.contains(&name), "{name}");
    }
}

#[test]
fn every_csv_has_the_version_header_and_one_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["specfun", "transform", "curvecheck"] {
        let out = tmp.path().join(cmd);
        assert_eq!(run_in(&out, &[cmd]), 0, "{cmd}");
        let names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
        assert_eq!(names.iter().filter(|n| n.ends_with(".json")).count(), 1);
        for n in names.iter().filter(|n| n.ends_with(".csv")) {
            assert!(fs::read_to_string(out.join(n)).unwrap().starts_with("# hypwave-csv v1\n"), "{n}");
        }
    }
}

#[test]
fn failed_assertion_exits_two_and_still_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cc");
    // T above the admissible bound (1/2)^2 for parabolic:1 on (1, 2)
    assert_eq!(run_in(&out, &["curvecheck", "--curve", "parabolic:1", "--T", "0.3"]), 2);
    let m = manifest(&out);
    assert_eq!(m["passed"], false);
    let failed: Vec<&str> = m["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["passed"] == false)
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["admissible_time"]);
}

#[test]
fn rerun_replaces_outputs_and_foreign_files_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sf");
    assert_eq!(run_in(&out, &["specfun", "--route", "closed"]), 0);
    assert_eq!(run_in(&out, &["specfun", "--route", "ode"]), 0);
    let csv = fs::read_to_string(out.join("specfun.csv")).unwrap();
    assert!(csv.contains(",ode,") && !csv.contains(",closed,"));
    fs::write(out.join("notes.txt"), "mine").unwrap();
    assert_eq!(run_in(&out, &["specfun"]), 1);
    assert!(out.join("notes.txt").exists());
}

#[test]
fn digest_ignores_output_location_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run_in(&a, &["specfun", "--threads", "1"]), 0);
    assert_eq!(run_in(&b, &["specfun", "--threads", "3"]), 0);
    assert_eq!(manifest(&a)["config_digest"], manifest(&b)["config_digest"]);
    let c = tmp.path().join("c");
    assert_eq!(run_in(&c, &["specfun", "--tol", "1e-7"]), 0);
    assert_ne!(manifest(&a)["config_digest"], manifest(&c)["config_digest"]);
}

#[test]
fn digest_is_stable_under_reserialization() {
    let cfg = RunConfig::default();
    let text = toml::to_string(&cfg).unwrap();
    let back: RunConfig = toml::from_str(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.digest(), cfg.digest());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.cfg");
    fs::write(&p, "[run]\nspace = \"h3\"\nsapce = 1\n").unwrap();
    assert!(RunConfig::load(&p).is_err());
    assert_eq!(run_in(&tmp.path().join("o"), &["specfun", "--config", p.to_str().unwrap()]), 1);
}

#[test]
fn curve_specifications() {
    assert_eq!(parse_curve("vertical").unwrap().label(), "vertical");
    assert_eq!(parse_curve("parabolic:2.5").unwrap().radial_eval(1.0, 0.04), 1.5);
    assert!(parse_curve("parabolic:x").is_err());
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("curve.csv");
    fs::write(&p, "# alpha=0.5 c1=1 c2=1 c3=1\n1.0,0.0,1.0\n1.0,0.2,1.3\n2.0,0.0,2.0\n2.0,0.2,2.3\n").unwrap();
    let c = parse_curve(&format!("custom:{}", p.display())).unwrap();
    assert_eq!(c.alpha, 0.5);
    assert!((c.radial_eval(1.5, 0.0) - 1.5).abs() < 1e-12);
    fs::write(&p, "1.0,0.0\n").unwrap();
    assert!(parse_curve(&format!("custom:{}", p.display())).is_err());
}
