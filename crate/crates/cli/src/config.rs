//! Scenario configuration files.
//!
//! Format: one `[scenario]` header line, then flat `key = value` pairs.
//! `#` starts a comment, blank lines are ignored. Dimensioned values carry a
//! unit suffix (`MHz`, `kHz`, `rad/us`, `us`, `nm`, `Er`, `u`); counts and
//! dimensionless numbers are plain. Parsed values are normalized to the
//! internal convention (angular rad/μs, μs, nm, E_r, u) and the run manifest
//! echoes them in those units, so a manifest is itself a valid config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use stirap_core::lattice::ZoneCounting;
use stirap_core::units::TWO_PI;

/// One validation finding, keyed to a config line.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: {}: {}", self.line, self.column, self.key, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Time,
    Length,
    Depth,
    Mass,
    Plain,
}

/// Scenario kinds and their resolved parameters (internal units).
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    DarkResonance(DarkResonanceCfg),
    StirapScan(StirapScanCfg),
    HoldScan(HoldScanCfg),
    Fit(FitCfg),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkResonanceCfg {
    pub omega1: f64,
    pub omega2: f64,
    pub gamma_e: f64,
    pub gamma_laser: f64,
    pub delta_1: f64,
    pub pulse_length: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StirapScanCfg {
    pub omega1: f64,
    pub omega2: f64,
    pub gamma_e: f64,
    pub gamma_laser: f64,
    pub delta_1: f64,
    pub ramp: f64,
    pub cleanup: f64,
    pub hold: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoldScanCfg {
    pub depth: f64,
    pub ratio: f64,
    pub stirap_eff: f64,
    pub period: f64,
    pub mass: f64,
    pub cutoff: usize,
    pub counting: ZoneCounting,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    AutlerTownes,
    Linewidth,
    DepthRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitCfg {
    pub model: FitModel,
    pub data: String,
    // three-level fixed parameters (autler-townes, linewidth)
    pub omega1: f64,
    pub omega2: f64,
    pub gamma_e: f64,
    pub gamma_laser: f64,
    pub delta_1: f64,
    pub pulse_length: f64,
    pub ramp: f64,
    pub cleanup: f64,
    pub hold: f64,
    // lattice fixed parameters (depth-ratio)
    pub depth: f64,
    pub stirap_eff: f64,
    pub period: f64,
    pub mass: f64,
    pub cutoff: usize,
    pub counting: ZoneCounting,
    pub output: String,
}

pub fn counting_name(c: ZoneCounting) -> &'static str {
    match c {
        ZoneCounting::PerAxis => "per-axis",
        ZoneCounting::ImagedSquare => "imaged-square",
        ZoneCounting::CentralCube => "central-cube",
    }
}

struct RawConfig {
    header: String,
    header_line: usize,
    entries: BTreeMap<String, (usize, usize, String)>, // key -> (line, col of value, value)
}

fn tokenize(text: &str) -> Result<RawConfig, Vec<Diagnostic>> {
    let mut header: Option<(String, usize)> = None;
    let mut entries = BTreeMap::new();
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                diags.push(Diagnostic {
                    line: line_no,
                    column: 1,
                    key: "scenario".into(),
                    message: "unterminated scenario header".into(),
                });
                continue;
            }
            if header.is_some() {
                diags.push(Diagnostic {
                    line: line_no,
                    column: 1,
                    key: "scenario".into(),
                    message: "duplicate scenario header".into(),
                });
                continue;
            }
            header = Some((trimmed[1..trimmed.len() - 1].trim().to_string(), line_no));
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                let key = k.trim().to_string();
                let col = line.find('=').unwrap() + 2;
                if key.is_empty() {
                    diags.push(Diagnostic {
                        line: line_no,
                        column: 1,
                        key: "<empty>".into(),
                        message: "missing key before '='".into(),
                    });
                } else if entries.insert(key.clone(), (line_no, col, v.trim().to_string())).is_some() {
                    diags.push(Diagnostic {
                        line: line_no,
                        column: 1,
                        key,
                        message: "duplicate key".into(),
                    });
                }
            }
            None => diags.push(Diagnostic {
                line: line_no,
                column: 1,
                key: trimmed.split_whitespace().next().unwrap_or("<line>").into(),
                message: "expected 'key = value'".into(),
            }),
        }
    }
    let (header, header_line) = match header {
        Some(h) => h,
        None => {
            diags.push(Diagnostic {
                line: 1,
                column: 1,
                key: "scenario".into(),
                message: "missing [scenario] header".into(),
            });
            return Err(diags);
        }
    };
    if diags.is_empty() {
        Ok(RawConfig { header, header_line, entries })
    } else {
        Err(diags)
    }
}

fn parse_value(dim: Dimension, text: &str) -> Result<f64, String> {
    let mut it = text.split_whitespace();
    let num = it.next().ok_or("empty value")?;
    let unit = it.next();
    if it.next().is_some() {
        return Err("too many tokens".into());
    }
    let x: f64 = num.parse().map_err(|_| format!("'{num}' is not a number"))?;
    if !x.is_finite() {
        return Err("value must be finite".into());
    }
    match (dim, unit) {
        (Dimension::Frequency, Some("MHz")) => Ok(x * TWO_PI),
        (Dimension::Frequency, Some("kHz")) => Ok(x * TWO_PI * 1e-3),
        (Dimension::Frequency, Some("rad/us")) => Ok(x),
        (Dimension::Frequency, Some(u)) => Err(format!("'{u}' is not a frequency unit (MHz, kHz, rad/us)")),
        (Dimension::Frequency, None) => Err("frequency needs a unit suffix (MHz, kHz, rad/us)".into()),
        (Dimension::Time, Some("us")) => Ok(x),
        (Dimension::Time, Some(u)) => Err(format!("'{u}' is not a time unit (us)")),
        (Dimension::Time, None) => Err("time needs a unit suffix (us)".into()),
        (Dimension::Length, Some("nm")) => Ok(x),
        (Dimension::Length, Some(u)) => Err(format!("'{u}' is not a length unit (nm)")),
        (Dimension::Length, None) => Err("length needs a unit suffix (nm)".into()),
        (Dimension::Depth, Some("Er")) => Ok(x),
        (Dimension::Depth, Some(u)) => Err(format!("'{u}' is not a depth unit (Er)")),
        (Dimension::Depth, None) => Err("depth needs a unit suffix (Er)".into()),
        (Dimension::Mass, Some("u")) => Ok(x),
        (Dimension::Mass, Some(un)) => Err(format!("'{un}' is not a mass unit (u)")),
        (Dimension::Mass, None) => Err("mass needs a unit suffix (u)".into()),
        (Dimension::Plain, None) => Ok(x),
        (Dimension::Plain, Some(u)) => Err(format!("unexpected unit '{u}' on dimensionless value")),
    }
}

struct Extractor {
    raw: RawConfig,
    used: Vec<String>,
    diags: Vec<Diagnostic>,
}

impl Extractor {
    fn new(raw: RawConfig) -> Self {
        Self { raw, used: Vec::new(), diags: Vec::new() }
    }

    fn take(&mut self, key: &str) -> Option<(usize, usize, String)> {
        self.used.push(key.to_string());
        self.raw.entries.get(key).cloned()
    }

    fn missing(&mut self, key: &str) {
        self.diags.push(Diagnostic {
            line: self.raw.header_line,
            column: 1,
            key: key.into(),
            message: "required key is missing".into(),
        });
    }

    fn req(&mut self, key: &str, dim: Dimension) -> f64 {
        match self.take(key) {
            None => {
                self.missing(key);
                f64::NAN
            }
            Some((line, col, v)) => match parse_value(dim, &v) {
                Ok(x) => x,
                Err(m) => {
                    self.diags.push(Diagnostic { line, column: col, key: key.into(), message: m });
                    f64::NAN
                }
            },
        }
    }

    fn opt(&mut self, key: &str, dim: Dimension, default: f64) -> f64 {
        match self.take(key) {
            None => default,
            Some((line, col, v)) => match parse_value(dim, &v) {
                Ok(x) => x,
                Err(m) => {
                    self.diags.push(Diagnostic { line, column: col, key: key.into(), message: m });
                    f64::NAN
                }
            },
        }
    }

    fn req_count(&mut self, key: &str) -> usize {
        let v = self.req(key, Dimension::Plain);
        self.as_count(key, v)
    }

    fn opt_count(&mut self, key: &str, default: usize) -> usize {
        match self.take(key) {
            None => default,
            Some((line, col, v)) => match parse_value(Dimension::Plain, &v) {
                Ok(x) => self.as_count(key, x),
                Err(m) => {
                    self.diags.push(Diagnostic { line, column: col, key: key.into(), message: m });
                    default
                }
            },
        }
    }

    fn as_count(&mut self, key: &str, v: f64) -> usize {
        if v.is_nan() {
            return 0;
        }
        if v < 1.0 || v.fract() != 0.0 || v > 1e9 {
            self.diags.push(Diagnostic {
                line: self.raw.header_line,
                column: 1,
                key: key.into(),
                message: format!("'{v}' is not a positive integer"),
            });
            0
        } else {
            v as usize
        }
    }

    fn opt_str(&mut self, key: &str, default: &str) -> String {
        match self.take(key) {
            None => default.to_string(),
            Some((_, _, v)) => v,
        }
    }

    fn req_str(&mut self, key: &str) -> String {
        match self.take(key) {
            None => {
                self.missing(key);
                String::new()
            }
            Some((_, _, v)) => v,
        }
    }

    fn counting(&mut self, key: &str) -> ZoneCounting {
        match self.take(key) {
            None => ZoneCounting::ImagedSquare,
            Some((line, col, v)) => match v.as_str() {
                "per-axis" => ZoneCounting::PerAxis,
                "imaged-square" => ZoneCounting::ImagedSquare,
                "central-cube" => ZoneCounting::CentralCube,
                other => {
                    self.diags.push(Diagnostic {
                        line,
                        column: col,
                        key: key.into(),
                        message: format!(
                            "'{other}' is not a counting mode (per-axis, imaged-square, central-cube)"
                        ),
                    });
                    ZoneCounting::ImagedSquare
                }
            },
        }
    }

    fn finish(mut self) -> Vec<Diagnostic> {
        for (key, (line, _, _)) in &self.raw.entries {
            if !self.used.contains(key) {
                self.diags.push(Diagnostic {
                    line: *line,
                    column: 1,
                    key: key.clone(),
                    message: "unknown key for this scenario".into(),
                });
            }
        }
        self.diags
    }
}

fn check_grid(diags: &mut Vec<Diagnostic>, line: usize, lo: f64, hi: f64, points: usize, what: &str) {
    if lo.is_nan() || hi.is_nan() || points == 0 {
        return; // already diagnosed
    }
    if lo >= hi {
        diags.push(Diagnostic {
            line,
            column: 1,
            key: format!("{what}_min"),
            message: format!("{what}_min must be < {what}_max"),
        });
    }
    if points < 2 {
        diags.push(Diagnostic {
            line,
            column: 1,
            key: format!("{what}_points"),
            message: "need at least 2 grid points".into(),
        });
    }
}

/// Parse a config; returns the scenario or the full diagnostics list.
pub fn parse_config(text: &str) -> Result<Scenario, Vec<Diagnostic>> {
    let raw = tokenize(text)?;
    let header_line = raw.header_line;
    let header = raw.header.clone();
    let mut ex = Extractor::new(raw);
    let scenario = match header.as_str() {
        "dark-resonance" => {
            let cfg = DarkResonanceCfg {
                omega1: ex.req("omega1", Dimension::Frequency),
                omega2: ex.req("omega2", Dimension::Frequency),
                gamma_e: ex.req("gamma_e", Dimension::Frequency),
                gamma_laser: ex.req("gamma_laser", Dimension::Frequency),
                delta_1: ex.opt("delta_1", Dimension::Frequency, 0.0),
                pulse_length: ex.req("pulse_length", Dimension::Time),
                delta_min: ex.req("delta_min", Dimension::Frequency),
                delta_max: ex.req("delta_max", Dimension::Frequency),
                delta_points: ex.req_count("delta_points"),
                output: ex.opt_str("output", "dark_resonance.csv"),
            };
            let mut diags = ex.finish();
            check_grid(&mut diags, header_line, cfg.delta_min, cfg.delta_max, cfg.delta_points, "delta");
            if !diags.is_empty() {
                return Err(diags);
            }
            Scenario::DarkResonance(cfg)
        }
        "stirap-scan" => {
            let cfg = StirapScanCfg {
                omega1: ex.req("omega1", Dimension::Frequency),
                omega2: ex.req("omega2", Dimension::Frequency),
                gamma_e: ex.req("gamma_e", Dimension::Frequency),
                gamma_laser: ex.req("gamma_laser", Dimension::Frequency),
                delta_1: ex.opt("delta_1", Dimension::Frequency, 0.0),
                ramp: ex.req("ramp", Dimension::Time),
                cleanup: ex.req("cleanup", Dimension::Time),
                hold: ex.req("hold", Dimension::Time),
                delta_min: ex.req("delta_min", Dimension::Frequency),
                delta_max: ex.req("delta_max", Dimension::Frequency),
                delta_points: ex.req_count("delta_points"),
                output: ex.opt_str("output", "stirap_scan.csv"),
            };
            let mut diags = ex.finish();
            check_grid(&mut diags, header_line, cfg.delta_min, cfg.delta_max, cfg.delta_points, "delta");
            if !diags.is_empty() {
                return Err(diags);
            }
            Scenario::StirapScan(cfg)
        }
        "hold-scan" => {
            let cfg = HoldScanCfg {
                depth: ex.req("depth", Dimension::Depth),
                ratio: ex.req("ratio", Dimension::Plain),
                stirap_eff: ex.req("stirap_eff", Dimension::Plain),
                period: ex.opt("period", Dimension::Length, 415.22),
                mass: ex.opt("mass", Dimension::Mass, 2.0 * stirap_core::units::RB87_MASS_U),
                cutoff: ex.opt_count("cutoff", 15),
                counting: ex.counting("counting"),
                tau_min: ex.opt("tau_min", Dimension::Time, 0.0),
                tau_max: ex.req("tau_max", Dimension::Time),
                tau_points: ex.req_count("tau_points"),
                output: ex.opt_str("output", "hold_scan.csv"),
            };
            let mut diags = ex.finish();
            check_grid(&mut diags, header_line, cfg.tau_min, cfg.tau_max, cfg.tau_points, "tau");
            if !diags.is_empty() {
                return Err(diags);
            }
            Scenario::HoldScan(cfg)
        }
        "fit" => {
            let model_str = ex.req_str("model");
            let model = match model_str.as_str() {
                "autler-townes" => Some(FitModel::AutlerTownes),
                "linewidth" => Some(FitModel::Linewidth),
                "depth-ratio" => Some(FitModel::DepthRatio),
                "" => None,
                other => {
                    ex.diags.push(Diagnostic {
                        line: header_line,
                        column: 1,
                        key: "model".into(),
                        message: format!(
                            "'{other}' is not a fit model (autler-townes, linewidth, depth-ratio)"
                        ),
                    });
                    None
                }
            };
            let data = ex.req_str("data");
            let mut cfg = FitCfg {
                model: model.unwrap_or(FitModel::AutlerTownes),
                data,
                omega1: 0.0,
                omega2: 0.0,
                gamma_e: 0.0,
                gamma_laser: 0.0,
                delta_1: 0.0,
                pulse_length: 0.0,
                ramp: 0.0,
                cleanup: 0.0,
                hold: 0.0,
                depth: 0.0,
                stirap_eff: 0.0,
                period: 415.22,
                mass: 2.0 * stirap_core::units::RB87_MASS_U,
                cutoff: 15,
                counting: ZoneCounting::ImagedSquare,
                output: String::new(),
            };
            match model {
                Some(FitModel::AutlerTownes) => {
                    cfg.omega1 = ex.req("omega1", Dimension::Frequency);
                    cfg.gamma_e = ex.req("gamma_e", Dimension::Frequency);
                    cfg.gamma_laser = ex.req("gamma_laser", Dimension::Frequency);
                    cfg.delta_1 = ex.opt("delta_1", Dimension::Frequency, 0.0);
                    cfg.pulse_length = ex.req("pulse_length", Dimension::Time);
                }
                Some(FitModel::Linewidth) => {
                    cfg.omega1 = ex.req("omega1", Dimension::Frequency);
                    cfg.omega2 = ex.req("omega2", Dimension::Frequency);
                    cfg.gamma_e = ex.req("gamma_e", Dimension::Frequency);
                    cfg.delta_1 = ex.opt("delta_1", Dimension::Frequency, 0.0);
                    cfg.ramp = ex.req("ramp", Dimension::Time);
                    cfg.cleanup = ex.req("cleanup", Dimension::Time);
                    cfg.hold = ex.req("hold", Dimension::Time);
                }
                Some(FitModel::DepthRatio) => {
                    cfg.depth = ex.req("depth", Dimension::Depth);
                    cfg.stirap_eff = ex.req("stirap_eff", Dimension::Plain);
                    cfg.period = ex.opt("period", Dimension::Length, 415.22);
                    cfg.mass = ex.opt("mass", Dimension::Mass, 2.0 * stirap_core::units::RB87_MASS_U);
                    cfg.cutoff = ex.opt_count("cutoff", 15);
                    cfg.counting = ex.counting("counting");
                }
                None => {}
            }
            cfg.output = ex.opt_str("output", "fit_report.csv");
            let diags = ex.finish();
            if !diags.is_empty() {
                return Err(diags);
            }
            Scenario::Fit(cfg)
        }
        other => {
            return Err(vec![Diagnostic {
                line: header_line,
                column: 1,
                key: "scenario".into(),
                message: format!(
                    "unknown scenario '{other}' (dark-resonance, stirap-scan, hold-scan, fit)"
                ),
            }]);
        }
    };
    Ok(scenario)
}

/// Validate a config file, returning all diagnostics (empty when valid).
pub fn validate_file(path: &Path) -> Result<Vec<Diagnostic>, std::io::Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(match parse_config(&text) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    })
}

fn freq(w: f64) -> String {
    format!("{w} rad/us")
}

fn time(t: f64) -> String {
    format!("{t} us")
}

/// Render the resolved parameters as a manifest that is itself a valid
/// config reproducing the run bit-for-bit.
pub fn manifest(scenario: &Scenario, version: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# stirap {version} run manifest\n"));
    out.push_str("# resolved parameters in internal units; re-ingestable as a config\n");
    match scenario {
        Scenario::DarkResonance(c) => {
            out.push_str("[dark-resonance]\n");
            out.push_str(&format!("omega1 = {}\n", freq(c.omega1)));
            out.push_str(&format!("omega2 = {}\n", freq(c.omega2)));
            out.push_str(&format!("gamma_e = {}\n", freq(c.gamma_e)));
            out.push_str(&format!("gamma_laser = {}\n", freq(c.gamma_laser)));
            out.push_str(&format!("delta_1 = {}\n", freq(c.delta_1)));
            out.push_str(&format!("pulse_length = {}\n", time(c.pulse_length)));
            out.push_str(&format!("delta_min = {}\n", freq(c.delta_min)));
            out.push_str(&format!("delta_max = {}\n", freq(c.delta_max)));
            out.push_str(&format!("delta_points = {}\n", c.delta_points));
            out.push_str(&format!("output = {}\n", c.output));
        }
        Scenario::StirapScan(c) => {
            out.push_str("[stirap-scan]\n");
            out.push_str(&format!("omega1 = {}\n", freq(c.omega1)));
            out.push_str(&format!("omega2 = {}\n", freq(c.omega2)));
            out.push_str(&format!("gamma_e = {}\n", freq(c.gamma_e)));
            out.push_str(&format!("gamma_laser = {}\n", freq(c.gamma_laser)));
            out.push_str(&format!("delta_1 = {}\n", freq(c.delta_1)));
            out.push_str(&format!("ramp = {}\n", time(c.ramp)));
            out.push_str(&format!("cleanup = {}\n", time(c.cleanup)));
            out.push_str(&format!("hold = {}\n", time(c.hold)));
            out.push_str(&format!("delta_min = {}\n", freq(c.delta_min)));
            out.push_str(&format!("delta_max = {}\n", freq(c.delta_max)));
            out.push_str(&format!("delta_points = {}\n", c.delta_points));
            out.push_str(&format!("output = {}\n", c.output));
        }
        Scenario::HoldScan(c) => {
            out.push_str("[hold-scan]\n");
            out.push_str(&format!("depth = {} Er\n", c.depth));
            out.push_str(&format!("ratio = {}\n", c.ratio));
            out.push_str(&format!("stirap_eff = {}\n", c.stirap_eff));
            out.push_str(&format!("period = {} nm\n", c.period));
            out.push_str(&format!("mass = {} u\n", c.mass));
            out.push_str(&format!("cutoff = {}\n", c.cutoff));
            out.push_str(&format!("counting = {}\n", counting_name(c.counting)));
            out.push_str(&format!("tau_min = {}\n", time(c.tau_min)));
            out.push_str(&format!("tau_max = {}\n", time(c.tau_max)));
            out.push_str(&format!("tau_points = {}\n", c.tau_points));
            out.push_str(&format!("output = {}\n", c.output));
        }
        Scenario::Fit(c) => {
            out.push_str("[fit]\n");
            match c.model {
                FitModel::AutlerTownes => {
                    out.push_str("model = autler-townes\n");
                    out.push_str(&format!("data = {}\n", c.data));
                    out.push_str(&format!("omega1 = {}\n", freq(c.omega1)));
                    out.push_str(&format!("gamma_e = {}\n", freq(c.gamma_e)));
                    out.push_str(&format!("gamma_laser = {}\n", freq(c.gamma_laser)));
                    out.push_str(&format!("delta_1 = {}\n", freq(c.delta_1)));
                    out.push_str(&format!("pulse_length = {}\n", time(c.pulse_length)));
                }
                FitModel::Linewidth => {
                    out.push_str("model = linewidth\n");
                    out.push_str(&format!("data = {}\n", c.data));
                    out.push_str(&format!("omega1 = {}\n", freq(c.omega1)));
                    out.push_str(&format!("omega2 = {}\n", freq(c.omega2)));
                    out.push_str(&format!("gamma_e = {}\n", freq(c.gamma_e)));
                    out.push_str(&format!("delta_1 = {}\n", freq(c.delta_1)));
                    out.push_str(&format!("ramp = {}\n", time(c.ramp)));
                    out.push_str(&format!("cleanup = {}\n", time(c.cleanup)));
                    out.push_str(&format!("hold = {}\n", time(c.hold)));
                }
                FitModel::DepthRatio => {
                    out.push_str("model = depth-ratio\n");
                    out.push_str(&format!("data = {}\n", c.data));
                    out.push_str(&format!("depth = {} Er\n", c.depth));
                    out.push_str(&format!("stirap_eff = {}\n", c.stirap_eff));
                    out.push_str(&format!("period = {} nm\n", c.period));
                    out.push_str(&format!("mass = {} u\n", c.mass));
                    out.push_str(&format!("cutoff = {}\n", c.cutoff));
                    out.push_str(&format!("counting = {}\n", counting_name(c.counting)));
                }
            }
            out.push_str(&format!("output = {}\n", c.output));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DARK: &str = "\
[dark-resonance]
omega1 = 0.7 MHz
omega2 = 10 MHz
gamma_e = 8 MHz
gamma_laser = 20 kHz
pulse_length = 3 us
delta_min = -15 MHz
delta_max = 15 MHz
delta_points = 200
";

    #[test]
    fn parses_dark_resonance() {
        let s = parse_config(DARK).unwrap();
        match s {
            Scenario::DarkResonance(c) => {
                assert!((c.omega2 - 10.0 * TWO_PI).abs() < 1e-12);
                assert!((c.gamma_laser - 0.02 * TWO_PI).abs() < 1e-12);
                assert_eq!(c.delta_points, 200);
                assert_eq!(c.delta_1, 0.0);
                assert_eq!(c.output, "dark_resonance.csv");
            }
            _ => panic!("wrong scenario"),
        }
    }

    #[test]
    fn missing_key_names_the_key() {
        let broken = DARK.replace("omega2 = 10 MHz\n", "");
        let diags = parse_config(&broken).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].key, "omega2");
        assert!(diags[0].message.contains("missing"));
    }

    #[test]
    fn missing_unit_is_diagnosed() {
        let broken = DARK.replace("omega2 = 10 MHz", "omega2 = 10");
        let diags = parse_config(&broken).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].key, "omega2");
        assert!(diags[0].message.contains("unit"));
        assert_eq!(diags[0].line, 3);
    }

    #[test]
    fn unknown_key_is_diagnosed() {
        let broken = format!("{DARK}wavelength = 993 nm\n");
        let diags = parse_config(&broken).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].key, "wavelength");
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let commented = format!("# a comment\n\n{DARK}# trailing\n");
        assert!(parse_config(&commented).is_ok());
    }

    #[test]
    fn duplicate_key_is_diagnosed() {
        let dup = format!("{DARK}omega1 = 0.9 MHz\n");
        let diags = parse_config(&dup).unwrap_err();
        assert!(diags.iter().any(|d| d.key == "omega1" && d.message.contains("duplicate")));
    }

    #[test]
    fn missing_header_is_diagnosed() {
        let headless = DARK.replace("[dark-resonance]\n", "");
        let diags = parse_config(&headless).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("missing [scenario] header")));
    }

    #[test]
    fn manifest_reparses_to_identical_scenario() {
        let s = parse_config(DARK).unwrap();
        let m = manifest(&s, "0.0.0-test");
        let s2 = parse_config(&m).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn grid_sanity_checked() {
        let broken = DARK.replace("delta_max = 15 MHz", "delta_max = -20 MHz");
        let diags = parse_config(&broken).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("delta_min must be <")));
    }

    #[test]
    fn fit_config_round_trips() {
        let text = "\
[fit]
model = depth-ratio
data = hold_scan.csv
depth = 60 Er
stirap_eff = 0.75
";
        let s = parse_config(text).unwrap();
        let m = manifest(&s, "x");
        assert_eq!(s, parse_config(&m).unwrap());
    }
}
