//! Scenario execution: drive the core models and write CSV + manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use stirap_core::fitting::{
    fit_autler_townes, fit_depth_ratio, fit_linewidth, AutlerTownesFixed, DepthRatioFixed,
    FitReport, LinewidthFixed,
};
use stirap_core::lattice::{recovered_fraction_curve, LatticeParams};
use stirap_core::qdyn::{
    square_pulse_scan, stirap_round_trip, LambdaParams, Observable, ScanResult, StirapTiming,
};
use stirap_core::units::{ATOMIC_MASS_KG, TWO_PI};

use crate::config::{manifest, FitCfg, FitModel, HoldScanCfg, Scenario};

#[derive(Debug)]
pub enum RunError {
    /// Input data file could not be interpreted (exit 2).
    DataParse(String),
    /// Model evaluation failed (exit 3).
    Numerical(String),
    /// Reading or writing a file failed (exit 4).
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::DataParse(m) => write!(f, "data parse error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "I/O failure: {m}"),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::DataParse(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

pub struct RunSummary {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Nine significant digits, exponent form; the fixed CSV number format.
fn csv_num(x: f64) -> String {
    format!("{x:.8e}")
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Root relative paths in the directory named by `STIRAP_OUTPUT_DIR`.
pub fn resolve_output(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_absolute() {
        return p;
    }
    match std::env::var_os("STIRAP_OUTPUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(p),
        None => p,
    }
}

fn lattice_params(period_nm: f64, mass_u: f64, depth: f64, cutoff: usize) -> LatticeParams {
    LatticeParams {
        period_nm,
        mass_kg: mass_u * ATOMIC_MASS_KG,
        depth,
        cutoff,
    }
}

fn write_outputs(
    scenario: &Scenario,
    output: &str,
    csv: String,
) -> Result<RunSummary, RunError> {
    let csv_path = resolve_output(output);
    let manifest_path = PathBuf::from(format!("{}.manifest", csv_path.display()));
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| RunError::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(&csv_path, csv).map_err(|e| RunError::Io(format!("{}: {e}", csv_path.display())))?;
    let m = manifest(scenario, env!("CARGO_PKG_VERSION"));
    std::fs::write(&manifest_path, m)
        .map_err(|e| RunError::Io(format!("{}: {e}", manifest_path.display())))?;
    Ok(RunSummary { csv_path, manifest_path })
}

/// Execute a parsed scenario; `output_override` replaces the config's
/// output path when given.
pub fn run_scenario(scenario: &Scenario, output_override: Option<&str>) -> Result<RunSummary, RunError> {
    match scenario {
        Scenario::DarkResonance(c) => {
            let params = LambdaParams::new(c.gamma_e, c.gamma_laser, c.delta_1, 0.0)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            let grid = linspace(c.delta_min, c.delta_max, c.delta_points);
            let scan = square_pulse_scan(&grid, c.pulse_length, c.omega1, c.omega2, &params)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            let mut csv = String::from("delta_MHz,remaining_f\n");
            for (d, r) in scan.abscissa.iter().zip(&scan.ordinate) {
                csv.push_str(&format!("{},{}\n", csv_num(d / TWO_PI), csv_num(*r)));
            }
            write_outputs(scenario, output_override.unwrap_or(&c.output), csv)
        }
        Scenario::StirapScan(c) => {
            let params = LambdaParams::new(c.gamma_e, c.gamma_laser, c.delta_1, 0.0)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            let timing = StirapTiming {
                ramp: c.ramp,
                cleanup: c.cleanup,
                hold: c.hold,
                peak_omega1: c.omega1,
                peak_omega2: c.omega2,
            };
            let grid = linspace(c.delta_min, c.delta_max, c.delta_points);
            let (eff, inter) = stirap_round_trip(&grid, &timing, &params)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            let mut csv = String::from("delta_MHz,roundtrip_eff,intermediate_f\n");
            for ((d, e), f) in grid.iter().zip(&eff.ordinate).zip(&inter.ordinate) {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    csv_num(d / TWO_PI),
                    csv_num(*e),
                    csv_num(*f)
                ));
            }
            write_outputs(scenario, output_override.unwrap_or(&c.output), csv)
        }
        Scenario::HoldScan(c) => {
            let curve = run_hold_scan(c)?;
            let mut csv = String::from("tau_us,recovered_fraction\n");
            for (t, r) in curve.0.iter().zip(&curve.1) {
                csv.push_str(&format!("{},{}\n", csv_num(*t), csv_num(*r)));
            }
            write_outputs(scenario, output_override.unwrap_or(&c.output), csv)
        }
        Scenario::Fit(c) => {
            let report = run_fit_scenario(c)?;
            let csv = fit_report_csv(c.model, &report);
            write_outputs(scenario, output_override.unwrap_or(&c.output), csv)
        }
    }
}

fn run_hold_scan(c: &HoldScanCfg) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let base = lattice_params(c.period, c.mass, c.depth, c.cutoff);
    let taus = linspace(c.tau_min, c.tau_max, c.tau_points);
    let curve = recovered_fraction_curve(&base, c.ratio, &taus, c.stirap_eff, c.counting)
        .map_err(|e| RunError::Numerical(e.to_string()))?;
    Ok((curve.tau_us, curve.recovered))
}

/// Read a two-column numeric CSV (optional header line). Returns (x, y).
fn read_xy_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let a = cols.next().unwrap_or("").trim();
        let b = cols.next().unwrap_or("").trim();
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if i == 0 => continue, // header row
            _ => {
                return Err(RunError::DataParse(format!(
                    "{} line {}: expected two numeric columns",
                    path.display(),
                    i + 1
                )));
            }
        }
    }
    if xs.is_empty() {
        return Err(RunError::DataParse(format!("{}: no data rows", path.display())));
    }
    Ok((xs, ys))
}

fn run_fit_scenario(c: &FitCfg) -> Result<FitReport, RunError> {
    let data_path = resolve_output(&c.data);
    let (xs, ys) = read_xy_csv(&data_path)?;
    match c.model {
        FitModel::AutlerTownes => {
            let spectrum = ScanResult {
                abscissa: xs.iter().map(|d| d * TWO_PI).collect(), // delta_MHz → rad/μs
                ordinate: ys,
                observable: Observable::RemainingF,
            };
            let fixed = AutlerTownesFixed {
                omega1: c.omega1,
                gamma_e: c.gamma_e,
                gamma_laser: c.gamma_laser,
                delta_1: c.delta_1,
                pulse_length: c.pulse_length,
            };
            fit_autler_townes(&spectrum, &fixed).map_err(|e| RunError::Numerical(e.to_string()))
        }
        FitModel::Linewidth => {
            let curve = ScanResult {
                abscissa: xs.iter().map(|d| d * TWO_PI).collect(),
                ordinate: ys,
                observable: Observable::RoundtripEfficiency,
            };
            let fixed = LinewidthFixed {
                timing: StirapTiming {
                    ramp: c.ramp,
                    cleanup: c.cleanup,
                    hold: c.hold,
                    peak_omega1: c.omega1,
                    peak_omega2: c.omega2,
                },
                gamma_e: c.gamma_e,
                delta_1: c.delta_1,
            };
            fit_linewidth(&curve, &fixed).map_err(|e| RunError::Numerical(e.to_string()))
        }
        FitModel::DepthRatio => {
            let curve = stirap_core::lattice::HoldCurve {
                tau_us: xs,
                recovered: ys,
                snapshots: None,
            };
            let fixed = DepthRatioFixed {
                base: lattice_params(c.period, c.mass, c.depth, c.cutoff),
                stirap_eff: c.stirap_eff,
                counting: c.counting,
            };
            fit_depth_ratio(&curve, &fixed).map_err(|e| RunError::Numerical(e.to_string()))
        }
    }
}

fn fit_report_csv(model: FitModel, r: &FitReport) -> String {
    let mut csv = String::from("quantity,value\n");
    match model {
        FitModel::AutlerTownes => {
            let w = r.value("omega2").unwrap_or(f64::NAN);
            let s = r.sigma("omega2").unwrap_or(f64::NAN);
            csv.push_str(&format!("omega2_MHz,{}\n", csv_num(w / TWO_PI)));
            csv.push_str(&format!("sigma_omega2_MHz,{}\n", csv_num(s / TWO_PI)));
            let a = r.value("amplitude").unwrap_or(f64::NAN);
            let sa = r.sigma("amplitude").unwrap_or(f64::NAN);
            csv.push_str(&format!("amplitude,{}\n", csv_num(a)));
            csv.push_str(&format!("sigma_amplitude,{}\n", csv_num(sa)));
        }
        FitModel::Linewidth => {
            let g = r.value("gamma_laser").unwrap_or(f64::NAN);
            let s = r.sigma("gamma_laser").unwrap_or(f64::NAN);
            csv.push_str(&format!("gamma_laser_kHz,{}\n", csv_num(g / TWO_PI * 1e3)));
            csv.push_str(&format!("sigma_gamma_laser_kHz,{}\n", csv_num(s / TWO_PI * 1e3)));
        }
        FitModel::DepthRatio => {
            let v = r.value("ratio").unwrap_or(f64::NAN);
            let s = r.sigma("ratio").unwrap_or(f64::NAN);
            csv.push_str(&format!("ratio,{}\n", csv_num(v)));
            csv.push_str(&format!("sigma_ratio,{}\n", csv_num(s)));
        }
    }
    csv.push_str(&format!("rss,{}\n", csv_num(r.rss)));
    csv.push_str(&format!("converged,{}\n", if r.converged { 1 } else { 0 }));
    csv.push_str(&format!("iterations,{}\n", r.iterations));
    csv
}
