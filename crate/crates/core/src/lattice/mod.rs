//! Optical-lattice band structure and wavepacket dynamics.
//!
//! The 1D lattice potential is V(x) = s·E_r·sin²(πx/a) with period a and
//! dimensionless depth s; E_r = π²ħ²/2ma² is the recoil energy. The cubic 3D
//! lattice is separable, so all dynamics is computed in 1D and 3D observables
//! are assembled from per-axis products.

mod bands;
mod quench;
mod wannier;

pub use bands::{bloch_bands, bloch_bands_with, BandStructure, DEFAULT_N_BANDS, DEFAULT_N_Q};
pub use quench::{
    band_map, evolve_bands, excited_band_loss, project_onto_bands, recovered_fraction_curve,
    recovered_fraction_curve_detailed, BandDecomposition, BandMap, HoldCurve, ZoneCounting,
};
pub use wannier::{wannier_ground, wannier_ground_with, WannierPacket};

use crate::units::{ATOMIC_MASS_KG, HBAR, PLANCK_H, RB87_MASS_U};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("plane-wave basis too small: {got} states for {needed} requested bands")]
    BasisTooSmall { needed: usize, got: usize },
    #[error("projection completeness deficit {deficit:.3e} exceeds 1e-4; increase band count")]
    IncompleteBasis { deficit: f64 },
    #[error("incompatible inputs: {0}")]
    Mismatch(String),
}

/// Geometry and depth of the 1D lattice for one particle species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Lattice period a (nm).
    pub period_nm: f64,
    /// Particle mass (kg).
    pub mass_kg: f64,
    /// Depth s in units of E_r.
    pub depth: f64,
    /// Plane-wave cutoff L: basis e^{i2πlx/a} with |l| ≤ L.
    pub cutoff: usize,
}

impl LatticeParams {
    /// Rb₂ molecule in the 415.22 nm lattice with the default cutoff L = 15.
    pub fn rb2(depth: f64) -> Self {
        Self {
            period_nm: 415.22,
            mass_kg: 2.0 * RB87_MASS_U * ATOMIC_MASS_KG,
            depth,
            cutoff: 15,
        }
    }

    pub fn with_depth(mut self, depth: f64) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.period_nm <= 0.0 || !self.period_nm.is_finite() {
            return Err(LatticeError::InvalidParameter("period must be > 0".into()));
        }
        if self.mass_kg <= 0.0 || !self.mass_kg.is_finite() {
            return Err(LatticeError::InvalidParameter("mass must be > 0".into()));
        }
        if self.depth < 0.0 || !self.depth.is_finite() {
            return Err(LatticeError::InvalidParameter("depth must be ≥ 0".into()));
        }
        if self.cutoff < 5 {
            return Err(LatticeError::InvalidParameter("cutoff L must be ≥ 5".into()));
        }
        Ok(())
    }
}

/// Recoil energy E_r = π²ħ²/2ma² in both J and cyclic-Hz (E_r/h) forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilEnergy {
    pub joules: f64,
    pub hertz: f64,
}

impl RecoilEnergy {
    /// E_r/ħ expressed in rad/μs, the phase rate of one E_r of energy.
    pub fn rad_per_us(&self) -> f64 {
        self.joules / HBAR * 1e-6
    }
}

/// E_r = π²ħ²/2ma².
pub fn recoil_energy(params: &LatticeParams) -> Result<RecoilEnergy, LatticeError> {
    params.validate()?;
    let a_m = params.period_nm * 1e-9;
    let joules = (std::f64::consts::PI * HBAR).powi(2) / (2.0 * params.mass_kg * a_m * a_m);
    Ok(RecoilEnergy { joules, hertz: joules / PLANCK_H })
}

/// Harmonic trap frequency of one lattice site, ω_t = 2√s·E_r/ħ (rad/s).
///
/// This is the leading-order approximation near a well bottom; exact
/// dynamics always uses the band energies.
pub fn trap_frequency(params: &LatticeParams) -> Result<f64, LatticeError> {
    params.validate()?;
    if params.depth <= 0.0 {
        return Err(LatticeError::InvalidParameter(
            "trap frequency needs depth > 0".into(),
        ));
    }
    let er = recoil_energy(params)?;
    Ok(2.0 * params.depth.sqrt() * er.joules / HBAR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recoil_energy_rb2() {
        // m = 2 × 86.909 u, a = 415.22 nm → E_r/h ≈ 1.665 kHz
        let er = recoil_energy(&LatticeParams::rb2(60.0)).unwrap();
        assert_abs_diff_eq!(er.hertz, 1664.4305, epsilon = 0.01);
    }

    #[test]
    fn recoil_energy_scalings() {
        let p = LatticeParams::rb2(60.0);
        let er = recoil_energy(&p).unwrap();
        let mut heavier = p;
        heavier.mass_kg *= 2.0;
        assert_abs_diff_eq!(recoil_energy(&heavier).unwrap().joules, er.joules / 2.0, epsilon = 1e-45);
        let mut shorter = p;
        shorter.period_nm /= 2.0;
        assert_abs_diff_eq!(recoil_energy(&shorter).unwrap().joules, 4.0 * er.joules, epsilon = 1e-44);
    }

    #[test]
    fn trap_frequency_values_and_scaling() {
        let f6 = trap_frequency(&LatticeParams::rb2(6.0)).unwrap() / crate::units::TWO_PI;
        assert_abs_diff_eq!(f6, 8154.0, epsilon = 2.0); // ≈ 8.16 kHz
        let f60 = trap_frequency(&LatticeParams::rb2(60.0)).unwrap() / crate::units::TWO_PI;
        assert_abs_diff_eq!(f60, 25785.0, epsilon = 5.0); // ≈ 25.8 kHz
        let f24 = trap_frequency(&LatticeParams::rb2(24.0)).unwrap() / crate::units::TWO_PI;
        assert_abs_diff_eq!(f24 / f6, 2.0, epsilon = 1e-12); // s → 4s doubles ω_t
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(recoil_energy(&LatticeParams { period_nm: -1.0, ..LatticeParams::rb2(6.0) }).is_err());
        assert!(trap_frequency(&LatticeParams::rb2(0.0)).is_err());
        let mut p = LatticeParams::rb2(6.0);
        p.cutoff = 3;
        assert!(p.validate().is_err());
    }
}
