//! End-to-end tests of the `stirap` binary: exit codes, CSV schemas,
//! manifest round trips and multi-worker determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stirap"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("STIRAP_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn version_prints_and_succeeds() {
    let out = bin().arg("version").output().unwrap();
    assert_eq!(code(&out), 0);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("stirap "));
}

#[test]
fn no_arguments_is_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn shipped_configs_validate_clean() {
    for name in ["dark_resonance.cfg", "stirap_scan.cfg", "hold_scan.cfg", "fit_depth_ratio.cfg"] {
        let out = bin().arg("validate").arg(configs_dir().join(name)).output().unwrap();
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_reports_missing_key_and_bad_unit() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.cfg");
    std::fs::write(
        &p,
        "[dark-resonance]\nomega1 = 0.7 MHz\ngamma_e = 8 MHz\ngamma_laser = 20 kHz\n\
         pulse_length = 3 us\ndelta_min = -15 MHz\ndelta_max = 15 MHz\ndelta_points = 200\n",
    )
    .unwrap();
    let out = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("omega2"), "{err}");

    std::fs::write(
        &p,
        "[dark-resonance]\nomega1 = 0.7 MHz\nomega2 = 10\ngamma_e = 8 MHz\ngamma_laser = 20 kHz\n\
         pulse_length = 3 us\ndelta_min = -15 MHz\ndelta_max = 15 MHz\ndelta_points = 200\n",
    )
    .unwrap();
    let out = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unit"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unreadable_config_is_io_error() {
    let out = bin().arg("validate").arg("/no/such/file.cfg").output().unwrap();
    assert_eq!(code(&out), 4);
    let out = bin().arg("run").arg("/no/such/file.cfg").output().unwrap();
    assert_eq!(code(&out), 4);
}

#[test]
fn bad_fit_data_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("data.csv"), "tau_us,recovered\n0.0,0.75\nnot,numbers\n").unwrap();
    let out = run_in(dir.path(), &["run", configs_dir().join("fit_depth_ratio.cfg").to_str().unwrap()]);
    // fit_depth_ratio.cfg points at hold_scan.csv which is absent → I/O
    assert_eq!(code(&out), 4);
    // point a config at the malformed file → parse error
    let cfg = dir.path().join("fit.cfg");
    std::fs::write(
        &cfg,
        "[fit]\nmodel = depth-ratio\ndata = data.csv\ndepth = 60 Er\nstirap_eff = 0.75\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

fn first_line(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().to_string()
}

#[test]
fn dark_resonance_schema_and_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", configs_dir().join("dark_resonance.cfg").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("dark_resonance.csv");
    assert_eq!(first_line(&csv), "delta_MHz,remaining_f");
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 200);
    // LF endings, two columns, 9 significant digits
    assert!(!text.contains('\r'));
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first.len(), 2);
    assert!((first[0].parse::<f64>().unwrap() + 15.0).abs() < 1e-9);
    // transparency at the center of the scan
    let mid: Vec<&str> = rows[99].split(',').collect();
    assert!(mid[1].parse::<f64>().unwrap() > 0.85);
    assert!(dir.path().join("dark_resonance.csv.manifest").exists());
}

#[test]
fn hold_scan_schema_and_fit_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", configs_dir().join("hold_scan.cfg").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("hold_scan.csv");
    assert_eq!(first_line(&csv), "tau_us,recovered_fraction");
    let text = std::fs::read_to_string(&csv).unwrap();
    let first_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((first_row[1].parse::<f64>().unwrap() - 0.75).abs() < 1e-6);

    // feed the curve to the depth-ratio fit
    let out = run_in(dir.path(), &["run", configs_dir().join("fit_depth_ratio.cfg").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("fit_depth_ratio.csv")).unwrap();
    assert_eq!(report.lines().next().unwrap(), "quantity,value");
    let ratio_line = report.lines().find(|l| l.starts_with("ratio,")).unwrap();
    let ratio: f64 = ratio_line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((ratio - 10.0).abs() < 0.05, "fitted ratio {ratio}");
    assert!(report.lines().any(|l| l == "converged,1"));
}

#[test]
fn stirap_scan_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    // a short grid keeps this test quick; schema matches the shipped config
    std::fs::write(
        &cfg,
        "[stirap-scan]\nomega1 = 10 MHz\nomega2 = 10 MHz\ngamma_e = 8 MHz\n\
         gamma_laser = 20 kHz\nramp = 5 us\ncleanup = 1 us\nhold = 2 us\n\
         delta_min = -0.5 MHz\ndelta_max = 0.5 MHz\ndelta_points = 5\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("stirap_scan.csv");
    assert_eq!(first_line(&csv), "delta_MHz,roundtrip_eff,intermediate_f");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mid: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect(); // δ = 0
    assert!((mid[1].parse::<f64>().unwrap() - 0.735).abs() < 0.01);
    assert!(mid[2].parse::<f64>().unwrap() < 1e-3);
}

/// A5: byte-identical CSVs across repeated multi-worker runs of the
/// shipped configs, and across a manifest re-ingestion.
#[test]
fn a5_determinism_and_manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("dark_resonance.cfg");
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let bytes1 = std::fs::read(dir.path().join("dark_resonance.csv")).unwrap();

    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(code(&out), 0);
    let bytes2 = std::fs::read(dir.path().join("dark_resonance.csv")).unwrap();
    assert_eq!(bytes1, bytes2, "repeated runs differ");

    // the manifest is itself a config and reproduces the CSV bit for bit
    let manifest = dir.path().join("dark_resonance.csv.manifest");
    let out = run_in(
        dir.path(),
        &["run", manifest.to_str().unwrap(), "--output", "from_manifest.csv", "--threads", "2"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let bytes3 = std::fs::read(dir.path().join("from_manifest.csv")).unwrap();
    assert_eq!(bytes1, bytes3, "manifest re-ingestion differs");

    // every other shipped scenario, same drill (hold_scan first: the fit
    // config consumes its output)
    for (cfg, csv) in [
        ("hold_scan.cfg", "hold_scan.csv"),
        ("fit_depth_ratio.cfg", "fit_depth_ratio.csv"),
        ("stirap_scan.cfg", "stirap_scan.csv"),
    ] {
        let cfg = configs_dir().join(cfg);
        let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--threads", "2"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let h1 = std::fs::read(dir.path().join(csv)).unwrap();
        let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--threads", "2"]);
        assert_eq!(code(&out), 0);
        let h2 = std::fs::read(dir.path().join(csv)).unwrap();
        assert_eq!(h1, h2, "{csv} differs between runs");
    }

    println!(
        "[PASS] A5 determinism: all four shipped configs produce byte-identical CSVs across \
         repeated multi-worker runs; manifest re-ingestion reproduces the CSV exactly"
    );
}

#[test]
fn seed_flag_is_accepted_and_unused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        "[hold-scan]\ndepth = 60 Er\nratio = 10\nstirap_eff = 0.75\n\
         tau_max = 20 us\ntau_points = 3\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read(dir.path().join("hold_scan.csv")).unwrap();
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--seed", "8"]);
    assert_eq!(code(&out), 0);
    let b = std::fs::read(dir.path().join("hold_scan.csv")).unwrap();
    assert_eq!(a, b); // deterministic models: the seed changes nothing
}

#[test]
fn output_override_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        "[hold-scan]\ndepth = 60 Er\nratio = 10\nstirap_eff = 0.75\n\
         tau_max = 20 us\ntau_points = 3\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap(), "--output", "custom.csv"]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("custom.csv").exists());
    assert!(dir.path().join("custom.csv.manifest").exists());
    assert!(!dir.path().join("hold_scan.csv").exists());
}
