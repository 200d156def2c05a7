//! Detuning-scan drivers. Scan points are independent and evaluated in
//! parallel; output order follows the input grid.

use rayon::prelude::*;

use super::{
    integrate_schedule, stirap_schedule, suggested_dt, DensityMatrix3, LambdaParams,
    PulseSchedule, QdynError, StirapTiming,
};

/// Which observable a [`ScanResult`] column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// ρ_ff after a square pulse.
    RemainingF,
    /// ρ_ff after the full round trip.
    RoundtripEfficiency,
    /// ρ_ff at the midpoint of the dark hold.
    IntermediateF,
}

/// One scanned curve: observable values over a detuning grid (rad/μs).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
    pub observable: Observable,
}

impl ScanResult {
    fn new(abscissa: Vec<f64>, ordinate: Vec<f64>, observable: Observable) -> Result<Self, QdynError> {
        debug_assert_eq!(abscissa.len(), ordinate.len());
        let mut ordinate = ordinate;
        for v in &mut ordinate {
            if !v.is_finite() || *v < -1e-6 || *v > 1.0 + 1e-6 {
                return Err(QdynError::NumericalFailure(format!(
                    "scan ordinate {v} outside [0, 1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { abscissa, ordinate, observable })
    }
}

fn check_grid(grid: &[f64]) -> Result<(), QdynError> {
    if grid.is_empty() {
        return Err(QdynError::InvalidScanGrid("empty detuning grid".into()));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(QdynError::InvalidScanGrid("non-finite detuning".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QdynError::InvalidScanGrid(
            "detuning grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Remaining |f⟩ fraction after exposing |f⟩⟨f| to both lasers in a square
/// pulse of `pulse_length` μs, for each two-photon detuning in `delta_grid`.
pub fn square_pulse_scan(
    delta_grid: &[f64],
    pulse_length: f64,
    omega1: f64,
    omega2: f64,
    params: &LambdaParams,
) -> Result<ScanResult, QdynError> {
    check_grid(delta_grid)?;
    params.validate()?;
    let schedule = PulseSchedule::constant(pulse_length, omega1, omega2)?;
    let remaining: Result<Vec<f64>, QdynError> = delta_grid
        .par_iter()
        .map(|&delta| {
            let p = params.with_delta_2p(delta);
            let dt = suggested_dt(&schedule, &p);
            let mut state = DensityMatrix3::pure_f();
            integrate_schedule(&mut state, &schedule, &p, dt, &mut |_, _| {})?;
            state.validate()?;
            Ok(state.population(0))
        })
        .collect();
    ScanResult::new(delta_grid.to_vec(), remaining?, Observable::RemainingF)
}

/// Round-trip STIRAP transfer efficiency (final ρ_ff) and the |f⟩ population
/// at the midpoint of the dark hold, over a two-photon detuning grid.
pub fn stirap_round_trip(
    delta_grid: &[f64],
    timing: &StirapTiming,
    params: &LambdaParams,
) -> Result<(ScanResult, ScanResult), QdynError> {
    check_grid(delta_grid)?;
    params.validate()?;
    let schedule = stirap_schedule(timing, true)?;
    let t_mid = timing.hold_midpoint();
    let pairs: Result<Vec<(f64, f64)>, QdynError> = delta_grid
        .par_iter()
        .map(|&delta| {
            let p = params.with_delta_2p(delta);
            let dt = suggested_dt(&schedule, &p);
            let mut state = DensityMatrix3::pure_f();
            let mut inter = f64::NAN;
            let mut best = f64::INFINITY;
            integrate_schedule(&mut state, &schedule, &p, dt, &mut |t, s| {
                let d = (t - t_mid).abs();
                if d < best {
                    best = d;
                    inter = s.population(0);
                }
            })?;
            state.validate()?;
            Ok((state.population(0), inter))
        })
        .collect();
    let pairs = pairs?;
    let eff = ScanResult::new(
        delta_grid.to_vec(),
        pairs.iter().map(|p| p.0).collect(),
        Observable::RoundtripEfficiency,
    )?;
    let inter = ScanResult::new(
        delta_grid.to_vec(),
        pairs.iter().map(|p| p.1).collect(),
        Observable::IntermediateF,
    )?;
    Ok((eff, inter))
}
