//! Least-squares parameter extraction from scan curves.
//!
//! Each fit wraps the corresponding forward model (square-pulse scan,
//! round-trip STIRAP scan, hold-time recovery curve) in an unweighted RSS
//! objective minimized by the bounded Nelder-Mead simplex. 1σ uncertainties
//! come from the finite-difference curvature of the RSS at the optimum and
//! are approximate.

mod simplex;

pub use simplex::{nelder_mead_bounded, SimplexOptions, SimplexResult};

use crate::lattice::{recovered_fraction_curve, HoldCurve, LatticeParams, ZoneCounting};
use crate::qdyn::{
    square_pulse_scan, stirap_round_trip, LambdaParams, ScanResult, StirapTiming,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("empty data")]
    EmptyData,
    #[error("abscissa and ordinate lengths differ")]
    LengthMismatch,
    #[error("invalid bounds or initial guess: {0}")]
    BadBounds(String),
    #[error("forward model failed: {0}")]
    Forward(String),
}

/// Which forward model a fit problem refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    DarkResonance,
    Roundtrip,
    HoldCurve,
}

/// One free parameter: name, initial guess and box bounds.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub init: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ParamSpec {
    fn check(&self) -> Result<(), FitError> {
        if self.lo >= self.hi || self.init < self.lo || self.init > self.hi {
            return Err(FitError::BadBounds(format!(
                "{}: init {} not inside [{}, {}]",
                self.name, self.init, self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// A prepared least-squares problem: data, model tag and free parameters.
#[derive(Debug, Clone)]
pub struct FitProblem {
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
    pub model: ModelTag,
    pub params: Vec<ParamSpec>,
}

impl FitProblem {
    fn validate(&self) -> Result<(), FitError> {
        if self.abscissa.is_empty() {
            return Err(FitError::EmptyData);
        }
        if self.abscissa.len() != self.ordinate.len() {
            return Err(FitError::LengthMismatch);
        }
        for p in &self.params {
            p.check()?;
        }
        Ok(())
    }
}

/// Best-fit values with 1σ estimates from the RSS curvature.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: ModelTag,
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub rss: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitReport {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| *n == name).map(|i| self.values[i])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| *n == name).map(|i| self.sigmas[i])
    }
}

/// Minimize the RSS of `model(params) - ordinate` over the problem's box.
fn run_fit<M>(problem: &FitProblem, mut model: M) -> Result<FitReport, FitError>
where
    M: FnMut(&[f64]) -> Result<Vec<f64>, String>,
{
    problem.validate()?;
    let y = &problem.ordinate;
    let mut rss_of = |theta: &[f64]| -> f64 {
        match model(theta) {
            Ok(m) => m.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
            Err(_) => f64::INFINITY,
        }
    };
    let init: Vec<f64> = problem.params.iter().map(|p| p.init).collect();
    let bounds: Vec<(f64, f64)> = problem.params.iter().map(|p| (p.lo, p.hi)).collect();
    let opts = SimplexOptions::default();
    let res = nelder_mead_bounded(&mut rss_of, &init, &bounds, &opts);
    if !res.fval.is_finite() {
        return Err(FitError::Forward("objective not finite at optimum".into()));
    }

    let (sigmas, degenerate) = rss_curvature_sigmas(&mut rss_of, &res.x, &bounds, res.fval, y.len());
    // an optimum pinned to a box edge means the data pull the parameter out
    // of its allowed range; flag it
    let pinned = res.x.iter().zip(&bounds).any(|(v, &(lo, hi))| {
        let span = if (hi - lo).is_finite() { hi - lo } else { v.abs().max(1.0) };
        (v - lo).abs() <= 1e-9 * span || (hi - v).abs() <= 1e-9 * span
    });
    Ok(FitReport {
        model: problem.model,
        names: problem.params.iter().map(|p| p.name).collect(),
        values: res.x,
        sigmas,
        rss: res.fval,
        converged: res.converged && !degenerate && !pinned,
        iterations: res.iterations,
    })
}

/// 1σ from the finite-difference Hessian of the RSS: Cov ≈ 2 s² H⁻¹ with
/// s² = RSS/(N−p). Returns (sigmas, degenerate flag).
fn rss_curvature_sigmas<F>(
    rss_of: &mut F,
    x: &[f64],
    bounds: &[(f64, f64)],
    rss0: f64,
    n_data: usize,
) -> (Vec<f64>, bool)
where
    F: FnMut(&[f64]) -> f64,
{
    let p = x.len();
    let mut h = nalgebra::DMatrix::<f64>::zeros(p, p);
    let steps: Vec<f64> = (0..p)
        .map(|i| {
            let (lo, hi) = bounds[i];
            let span = if hi - lo > 0.0 && (hi - lo).is_finite() { hi - lo } else { x[i].abs().max(1.0) };
            1e-4 * span
        })
        .collect();
    let eval = |rss_of: &mut F, q: &mut Vec<f64>| -> f64 {
        for (v, &(lo, hi)) in q.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
        rss_of(q)
    };
    for i in 0..p {
        let mut qp = x.to_vec();
        qp[i] += steps[i];
        let mut qm = x.to_vec();
        qm[i] -= steps[i];
        let fp = eval(rss_of, &mut qp);
        let fm = eval(rss_of, &mut qm);
        h[(i, i)] = (fp - 2.0 * rss0 + fm) / (steps[i] * steps[i]);
        for j in 0..i {
            let mut qpp = x.to_vec();
            qpp[i] += steps[i];
            qpp[j] += steps[j];
            let mut qpm = x.to_vec();
            qpm[i] += steps[i];
            qpm[j] -= steps[j];
            let mut qmp = x.to_vec();
            qmp[i] -= steps[i];
            qmp[j] += steps[j];
            let mut qmm = x.to_vec();
            qmm[i] -= steps[i];
            qmm[j] -= steps[j];
            let v = (eval(rss_of, &mut qpp) - eval(rss_of, &mut qpm) - eval(rss_of, &mut qmp)
                + eval(rss_of, &mut qmm))
                / (4.0 * steps[i] * steps[j]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let dof = n_data.saturating_sub(p).max(1);
    let s2 = rss0 / dof as f64;
    match h.clone().try_inverse() {
        Some(inv) => {
            let mut degenerate = false;
            let sigmas = (0..p)
                .map(|i| {
                    let v = 2.0 * s2 * inv[(i, i)];
                    if v.is_finite() && v >= 0.0 && h[(i, i)] > 0.0 {
                        v.sqrt()
                    } else {
                        degenerate = true;
                        f64::INFINITY
                    }
                })
                .collect();
            (sigmas, degenerate)
        }
        None => (vec![f64::INFINITY; p], true),
    }
}

/// Fixed parameters for the dark-resonance (Autler-Townes width) fit.
#[derive(Debug, Clone, Copy)]
pub struct AutlerTownesFixed {
    /// Probe Rabi frequency Ω₁ (rad/μs).
    pub omega1: f64,
    /// Excited-state width Γ (rad/μs).
    pub gamma_e: f64,
    /// Relative laser linewidth γ (rad/μs).
    pub gamma_laser: f64,
    /// One-photon detuning Δ (rad/μs).
    pub delta_1: f64,
    /// Square-pulse length (μs).
    pub pulse_length: f64,
}

/// Extract Ω₂ (and an amplitude baseline) from a dark-resonance spectrum.
///
/// Ω₂ is encoded in the width of the transparency window (≈ Ω₂²/2Γ for a
/// laser-2 scan with the probe on resonance).
pub fn fit_autler_townes(spectrum: &ScanResult, fixed: &AutlerTownesFixed) -> Result<FitReport, FitError> {
    let omega2_init = estimate_omega2(spectrum, fixed.gamma_e);
    let problem = FitProblem {
        abscissa: spectrum.abscissa.clone(),
        ordinate: spectrum.ordinate.clone(),
        model: ModelTag::DarkResonance,
        params: vec![
            ParamSpec {
                name: "omega2",
                init: omega2_init.clamp(crate::units::mhz(0.2), crate::units::mhz(40.0)),
                lo: crate::units::mhz(0.05),
                hi: crate::units::mhz(40.0),
            },
            ParamSpec { name: "amplitude", init: 1.0, lo: 0.5, hi: 1.5 },
        ],
    };
    let params = LambdaParams::new(fixed.gamma_e, fixed.gamma_laser, fixed.delta_1, 0.0)
        .map_err(|e| FitError::Forward(e.to_string()))?;
    let abscissa = problem.abscissa.clone();
    run_fit(&problem, |theta| {
        let scan = square_pulse_scan(&abscissa, fixed.pulse_length, fixed.omega1, theta[0], &params)
            .map_err(|e| e.to_string())?;
        Ok(scan.ordinate.iter().map(|v| theta[1] * v).collect())
    })
}

/// Initial Ω₂ from the half width of the transparency window.
fn estimate_omega2(spectrum: &ScanResult, gamma_e: f64) -> f64 {
    let n = spectrum.ordinate.len();
    if n < 5 {
        return crate::units::mhz(5.0);
    }
    let edge = (n / 10).max(1);
    let baseline: f64 = spectrum.ordinate[..edge]
        .iter()
        .chain(&spectrum.ordinate[n - edge..])
        .sum::<f64>()
        / (2 * edge) as f64;
    let peak = spectrum.ordinate.iter().cloned().fold(f64::MIN, f64::max);
    if peak - baseline < 0.05 {
        return crate::units::mhz(1.0);
    }
    let half = 0.5 * (peak + baseline);
    // outermost |δ| still above the half level
    let mut delta_half: f64 = 0.0;
    for (d, v) in spectrum.abscissa.iter().zip(&spectrum.ordinate) {
        if *v >= half {
            delta_half = delta_half.max(d.abs());
        }
    }
    if delta_half <= 0.0 {
        return crate::units::mhz(1.0);
    }
    (2.0 * gamma_e * delta_half).sqrt()
}

/// Fixed parameters for the linewidth fit.
#[derive(Debug, Clone, Copy)]
pub struct LinewidthFixed {
    pub timing: StirapTiming,
    pub gamma_e: f64,
    pub delta_1: f64,
}

/// Extract the relative laser linewidth γ from a round-trip efficiency curve.
pub fn fit_linewidth(curve: &ScanResult, fixed: &LinewidthFixed) -> Result<FitReport, FitError> {
    let problem = FitProblem {
        abscissa: curve.abscissa.clone(),
        ordinate: curve.ordinate.clone(),
        model: ModelTag::Roundtrip,
        params: vec![ParamSpec {
            name: "gamma_laser",
            init: crate::units::khz(30.0),
            lo: 0.0,
            hi: crate::units::khz(200.0),
        }],
    };
    let abscissa = problem.abscissa.clone();
    run_fit(&problem, |theta| {
        let params = LambdaParams::new(fixed.gamma_e, theta[0], fixed.delta_1, 0.0)
            .map_err(|e| e.to_string())?;
        let (eff, _) = stirap_round_trip(&abscissa, &fixed.timing, &params).map_err(|e| e.to_string())?;
        Ok(eff.ordinate)
    })
}

/// Fixed parameters for the depth-ratio fit.
#[derive(Debug, Clone, Copy)]
pub struct DepthRatioFixed {
    /// Deep-lattice parameters (depth = s_deep).
    pub base: LatticeParams,
    /// Round-trip STIRAP efficiency applied multiplicatively.
    pub stirap_eff: f64,
    /// Counting rule of the band-map observable.
    pub counting: ZoneCounting,
}

/// Extract the depth ratio between the deep and shallow lattices from a
/// hold-time recovery curve.
pub fn fit_depth_ratio(curve: &HoldCurve, fixed: &DepthRatioFixed) -> Result<FitReport, FitError> {
    let problem = FitProblem {
        abscissa: curve.tau_us.clone(),
        ordinate: curve.recovered.clone(),
        model: ModelTag::HoldCurve,
        params: vec![ParamSpec { name: "ratio", init: 8.0, lo: 2.0, hi: 25.0 }],
    };
    let abscissa = problem.abscissa.clone();
    run_fit(&problem, |theta| {
        let c = recovered_fraction_curve(&fixed.base, theta[0], &abscissa, fixed.stirap_eff, fixed.counting)
            .map_err(|e| e.to_string())?;
        Ok(c.recovered)
    })
}
