//! Three-level Λ-system master equation.
//!
//! Basis ordering is (|f⟩, |e⟩, |g⟩): initial level, lossy excited level,
//! target level. Laser 1 couples f↔e with Rabi frequency Ω₁, laser 2 couples
//! g↔e with Ω₂. In the rotating frame the Hamiltonian is
//!
//! ```text
//!         ⎛   0     Ω₁/2    0  ⎞
//!   H  =  ⎜  Ω₁/2   −Δ     Ω₂/2 ⎟        (rad/μs)
//!         ⎝   0     Ω₂/2   −δ  ⎠
//! ```
//!
//! with Δ the one-photon detuning of laser 1 and δ the two-photon detuning.
//! Dissipation: spontaneous decay of |e⟩ at rate Γ into a sink outside the
//! three-level manifold (tracked as `leaked`), and pure dephasing of the
//! two-photon coherence from the finite relative linewidth γ of the Raman
//! lasers, L = √(2γ)|g⟩⟨g|.
//!
//! The rotating-wave model carries no differential light shift: the
//! two-photon resonance sits exactly at δ = 0 for any pulse powers.

mod schedule;
mod scan;

pub use scan::{square_pulse_scan, stirap_round_trip, Observable, ScanResult};
pub use schedule::{stirap_schedule, Envelope, EnvelopeKind, PulseSchedule, Segment, StirapTiming};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

pub type CMat3 = Matrix3<Complex64>;
pub type CVec3 = Vector3<Complex64>;

#[derive(Debug, Error)]
pub enum QdynError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step size {dt} μs exceeds stability limit {limit} μs")]
    StepSize { dt: f64, limit: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("dark state undefined: both Rabi frequencies are zero")]
    UndefinedDarkState,
    #[error("invalid scan grid: {0}")]
    InvalidScanGrid(String),
}

/// How laser phase noise enters the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DephasingModel {
    /// Single operator √(2γ)|g⟩⟨g| with γ = `gamma_laser`, the short-term
    /// relative linewidth of the Raman pair. Decays ρ_fg and ρ_eg at γ.
    #[default]
    RelativePhase,
    /// Independent phase diffusion of each laser: L₁ = √(2γ₁)(|e⟩⟨e|+|g⟩⟨g|),
    /// L₂ = √(2γ₂)|g⟩⟨g|, from the rotating-frame phases (f: 0, e: φ₁,
    /// g: φ₁−φ₂). Decays ρ_fe at γ₁, ρ_eg at γ₂, ρ_fg at γ₁+γ₂.
    PerLaser { gamma_1: f64, gamma_2: f64 },
}

/// Physical constants of the Λ system, all in angular rad/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParams {
    /// Spontaneous width Γ of |e⟩.
    pub gamma_e: f64,
    /// Short-term relative Raman linewidth γ.
    pub gamma_laser: f64,
    /// One-photon detuning Δ of laser 1 from f→e.
    pub delta_1: f64,
    /// Two-photon detuning δ.
    pub delta_2p: f64,
    /// Phase-noise model; `RelativePhase` uses `gamma_laser`.
    pub dephasing: DephasingModel,
}

impl LambdaParams {
    pub fn new(gamma_e: f64, gamma_laser: f64, delta_1: f64, delta_2p: f64) -> Result<Self, QdynError> {
        let p = Self {
            gamma_e,
            gamma_laser,
            delta_1,
            delta_2p,
            dephasing: DephasingModel::RelativePhase,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), QdynError> {
        let all = [self.gamma_e, self.gamma_laser, self.delta_1, self.delta_2p];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(QdynError::InvalidParameter("non-finite rate or detuning".into()));
        }
        if self.gamma_e < 0.0 || self.gamma_laser < 0.0 {
            return Err(QdynError::InvalidParameter("decay rates must be ≥ 0".into()));
        }
        if let DephasingModel::PerLaser { gamma_1, gamma_2 } = self.dephasing {
            if gamma_1 < 0.0 || gamma_2 < 0.0 || !gamma_1.is_finite() || !gamma_2.is_finite() {
                return Err(QdynError::InvalidParameter("per-laser dephasing rates must be ≥ 0".into()));
            }
        }
        Ok(())
    }

    pub fn with_delta_2p(mut self, delta_2p: f64) -> Self {
        self.delta_2p = delta_2p;
        self
    }

    /// Elementwise decay rates of the density-matrix entries:
    /// Γ/2 on every entry touching |e⟩ (Γ on ρ_ee itself) plus the
    /// dephasing contribution −γ_L (d_i − d_j)² for diagonal noise operators.
    pub(crate) fn damping_matrix(&self) -> Matrix3<f64> {
        let mut d = Matrix3::zeros();
        let (g1, g2) = match self.dephasing {
            DephasingModel::RelativePhase => (0.0, self.gamma_laser),
            DephasingModel::PerLaser { gamma_1, gamma_2 } => (gamma_1, gamma_2),
        };
        // rotating-frame phase weights per level for each noise source
        let w1: [f64; 3] = [0.0, 1.0, 1.0]; // laser-1 phase enters e and g
        let w2: [f64; 3] = [0.0, 0.0, 1.0]; // laser-2 phase enters g only
        for i in 0..3 {
            for j in 0..3 {
                let mut r = 0.5 * self.gamma_e * (((i == 1) as u8 + (j == 1) as u8) as f64);
                r += g1 * (w1[i] - w1[j]).powi(2);
                r += g2 * (w2[i] - w2[j]).powi(2);
                d[(i, j)] = r;
            }
        }
        d
    }
}

/// Rotating-wave Hamiltonian of the Λ system (rad/μs), Hermitian by construction.
///
/// The f-state energy is the zero reference: H_ee = −Δ, H_gg = −δ.
pub fn rwa_hamiltonian(omega1: f64, omega2: f64, params: &LambdaParams) -> Result<CMat3, QdynError> {
    if !(omega1.is_finite() && omega2.is_finite()) {
        return Err(QdynError::InvalidParameter("non-finite Rabi frequency".into()));
    }
    params.validate()?;
    Ok(hamiltonian_unchecked(omega1, omega2, params.delta_1, params.delta_2p))
}

#[inline]
pub(crate) fn hamiltonian_unchecked(omega1: f64, omega2: f64, delta_1: f64, delta_2p: f64) -> CMat3 {
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut h = CMat3::zeros();
    h[(0, 1)] = re(0.5 * omega1);
    h[(1, 0)] = re(0.5 * omega1);
    h[(1, 2)] = re(0.5 * omega2);
    h[(2, 1)] = re(0.5 * omega2);
    h[(1, 1)] = re(-delta_1);
    h[(2, 2)] = re(-delta_2p);
    h
}

/// The dark state (Ω₂|f⟩ − Ω₁|g⟩)/√(Ω₁²+Ω₂²): unit norm, no |e⟩ component.
pub fn dark_state(omega1: f64, omega2: f64) -> Result<CVec3, QdynError> {
    if !(omega1.is_finite() && omega2.is_finite()) {
        return Err(QdynError::InvalidParameter("non-finite Rabi frequency".into()));
    }
    let n = omega1.hypot(omega2);
    if n == 0.0 {
        return Err(QdynError::UndefinedDarkState);
    }
    Ok(CVec3::new(
        Complex64::new(omega2 / n, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-omega1 / n, 0.0),
    ))
}

/// 3×3 density matrix of (|f⟩, |e⟩, |g⟩) plus the population that has
/// spontaneously decayed out of the manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub rho: CMat3,
    pub leaked: f64,
}

impl DensityMatrix3 {
    /// Pure |f⟩⟨f|, the state before any light is applied.
    pub fn pure_f() -> Self {
        let mut rho = CMat3::zeros();
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { rho, leaked: 0.0 }
    }

    /// Pure state ψψ† with no leaked population. ψ is normalized first.
    pub fn from_pure(psi: &CVec3) -> Result<Self, QdynError> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QdynError::InvalidParameter("state vector not normalizable".into()));
        }
        let v = psi / Complex64::new(n, 0.0);
        Self::new(v * v.adjoint(), 0.0)
    }

    pub fn new(rho: CMat3, leaked: f64) -> Result<Self, QdynError> {
        let s = Self { rho, leaked };
        s.validate()?;
        Ok(s)
    }

    pub fn population(&self, level: usize) -> f64 {
        self.rho[(level, level)].re
    }

    pub fn trace(&self) -> f64 {
        (self.rho[(0, 0)] + self.rho[(1, 1)] + self.rho[(2, 2)]).re
    }

    /// max |ρ_ij − conj(ρ_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// Smallest eigenvalue of the (Hermitian) density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.rho);
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Check the state invariants: Hermiticity < 1e-10, trace + leaked = 1
    /// within 1e-8, smallest eigenvalue > −1e-8.
    pub fn validate(&self) -> Result<(), QdynError> {
        if !self.leaked.is_finite() || self.rho.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(QdynError::NumericalFailure("non-finite density matrix".into()));
        }
        if !(-1e-8..=1.0 + 1e-8).contains(&self.leaked) {
            return Err(QdynError::NumericalFailure(format!("leaked = {} outside [0, 1]", self.leaked)));
        }
        let h = self.hermiticity_error();
        if h > 1e-10 {
            return Err(QdynError::NumericalFailure(format!("hermiticity error {h:.3e}")));
        }
        let t = self.trace() + self.leaked;
        if (t - 1.0).abs() > 1e-8 {
            return Err(QdynError::NumericalFailure(format!("trace + leaked = {t:.12}")));
        }
        let me = self.min_eigenvalue();
        if me < -1e-8 {
            return Err(QdynError::NumericalFailure(format!("negative eigenvalue {me:.3e}")));
        }
        Ok(())
    }
}

/// Right-hand side of the master equation:
/// dρ/dt = −i[H,ρ] − D∘ρ, with D the elementwise damping built from Γ and
/// the dephasing model, together with d(leaked)/dt = Γ ρ_ee.
pub fn lindblad_rhs(state: &DensityMatrix3, h: &CMat3, params: &LambdaParams) -> (CMat3, f64) {
    rhs_inner(&state.rho, h, &params.damping_matrix(), params.gamma_e)
}

#[inline]
fn rhs_inner(rho: &CMat3, h: &CMat3, damping: &Matrix3<f64>, gamma_e: f64) -> (CMat3, f64) {
    let hr = h * rho;
    let rh = rho * h;
    let mut d = CMat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let c = hr[(i, j)] - rh[(i, j)];
            // −i c − damping ∘ ρ
            d[(i, j)] = Complex64::new(c.im, -c.re) - damping[(i, j)] * rho[(i, j)];
        }
    }
    (d, gamma_e * rho[(1, 1)].re)
}

/// Equivalent total dynamical rate of a schedule + parameter set: the sum of
/// the drive, decay and detuning scales. Used for step-size limits.
fn total_rate(schedule: &PulseSchedule, params: &LambdaParams) -> f64 {
    let mut drive: f64 = 0.0;
    for seg in schedule.segments() {
        drive = drive.max(seg.omega1.peak + seg.omega2.peak);
    }
    let deph = match params.dephasing {
        DephasingModel::RelativePhase => params.gamma_laser,
        DephasingModel::PerLaser { gamma_1, gamma_2 } => gamma_1 + gamma_2,
    };
    let r = drive + params.gamma_e + deph + params.delta_1.abs().max(params.delta_2p.abs());
    r.max(1e-9)
}

/// Default integrator step: min(0.2 / total rate, 0.01 μs).
///
/// Adequate for the model's operating regime (drives up to ~2π×10 MHz with
/// Γ = 2π×8 MHz); trajectories that nevertheless breach the state-invariant
/// tolerances are rejected by [`evolve`] with a numerical-failure error, in
/// which case a smaller step must be chosen.
pub fn suggested_dt(schedule: &PulseSchedule, params: &LambdaParams) -> f64 {
    (0.2 / total_rate(schedule, params)).min(0.01)
}

/// Fixed-step RK4 over the schedule, calling `observer(t, state)` at t = 0
/// and after every step. Envelopes are sampled at the RK substep times;
/// steps never straddle a segment boundary. State invariants are checked
/// every few hundred steps and at the end.
pub(crate) fn integrate_schedule(
    state: &mut DensityMatrix3,
    schedule: &PulseSchedule,
    params: &LambdaParams,
    dt: f64,
    observer: &mut dyn FnMut(f64, &DensityMatrix3),
) -> Result<(), QdynError> {
    params.validate()?;
    if dt <= 0.0 || !dt.is_finite() {
        return Err(QdynError::InvalidParameter(format!("dt = {dt} must be > 0")));
    }
    let limit = std::f64::consts::TAU / (10.0 * total_rate(schedule, params));
    if dt > limit {
        return Err(QdynError::StepSize { dt, limit });
    }
    let damping = params.damping_matrix();
    let (d1, d2p) = (params.delta_1, params.delta_2p);
    let half = Complex64::new(0.5, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut t_glob = 0.0;
    let mut since_check = 0usize;
    observer(t_glob, state);
    for seg in schedule.segments() {
        let n = (seg.duration / dt).ceil() as usize;
        let n = n.max(1);
        let h_step = seg.duration / n as f64;
        let hc = Complex64::new(h_step, 0.0);
        for k in 0..n {
            let tl = k as f64 * h_step;
            let (a1, a2) = (seg.omega1.value(tl, seg.duration), seg.omega2.value(tl, seg.duration));
            let (b1, b2) = (
                seg.omega1.value(tl + 0.5 * h_step, seg.duration),
                seg.omega2.value(tl + 0.5 * h_step, seg.duration),
            );
            let (c1, c2) = (
                seg.omega1.value(tl + h_step, seg.duration),
                seg.omega2.value(tl + h_step, seg.duration),
            );
            let h_a = hamiltonian_unchecked(a1, a2, d1, d2p);
            let h_b = hamiltonian_unchecked(b1, b2, d1, d2p);
            let h_c = hamiltonian_unchecked(c1, c2, d1, d2p);
            let (k1, l1) = rhs_inner(&state.rho, &h_a, &damping, params.gamma_e);
            let (k2, l2) = rhs_inner(&(state.rho + k1 * (hc * half)), &h_b, &damping, params.gamma_e);
            let (k3, l3) = rhs_inner(&(state.rho + k2 * (hc * half)), &h_b, &damping, params.gamma_e);
            let (k4, l4) = rhs_inner(&(state.rho + k3 * hc), &h_c, &damping, params.gamma_e);
            state.rho += (k1 + k2 * two + k3 * two + k4) * (hc / Complex64::new(6.0, 0.0));
            state.leaked += h_step / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
            t_glob += h_step;
            since_check += 1;
            if since_check >= 256 {
                since_check = 0;
                state.validate().map_err(|e| {
                    QdynError::NumericalFailure(format!("at t = {t_glob:.4} μs: {e}; reduce dt"))
                })?;
            }
            observer(t_glob, state);
        }
    }
    state
        .validate()
        .map_err(|e| QdynError::NumericalFailure(format!("at end of schedule: {e}; reduce dt")))?;
    Ok(())
}

/// Time-sampled result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix3>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix3 {
        self.states.last().expect("trajectory never empty")
    }

    /// ρ_ff along the trajectory.
    pub fn population_f(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.population(0)).collect()
    }
}

/// Integrate the master equation over `schedule` with fixed-step RK4,
/// recording every `stride`-th step (plus the initial and final states).
/// Every recorded state is checked against the density-matrix invariants.
pub fn evolve(
    rho0: &DensityMatrix3,
    schedule: &PulseSchedule,
    params: &LambdaParams,
    dt: f64,
    stride: usize,
) -> Result<Trajectory, QdynError> {
    rho0.validate()?;
    let stride = stride.max(1);
    let mut state = *rho0;
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut count = 0usize;
    integrate_schedule(&mut state, schedule, params, dt, &mut |t, s| {
        if count.is_multiple_of(stride) {
            times.push(t);
            states.push(*s);
        }
        count += 1;
    })?;
    // make sure the final state is recorded
    if !(count - 1).is_multiple_of(stride) {
        times.push(schedule.total_duration());
        states.push(state);
    }
    for s in &states {
        s.validate()?;
    }
    Ok(Trajectory { times, states })
}
