//! Unit conventions and physical constants.
//!
//! Internal convention: angular frequencies in rad/μs, times in μs, lengths
//! in nm where noted, lattice energies in units of the recoil energy E_r.
//! For the parameters of interest this keeps all dynamical rates O(1)–O(60).

/// 2π, for converting cyclic MHz to angular rad/μs.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant (J·s), exact SI value.
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Unified atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;

/// Atomic mass of ⁸⁷Rb in u.
pub const RB87_MASS_U: f64 = 86.909;

/// 1 MHz (cyclic) expressed in angular rad/μs.
#[inline]
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f
}

/// 1 kHz (cyclic) expressed in angular rad/μs.
#[inline]
pub fn khz(f: f64) -> f64 {
    TWO_PI * f * 1e-3
}

/// Angular rad/μs back to cyclic MHz.
#[inline]
pub fn to_mhz(w: f64) -> f64 {
    w / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        assert!((to_mhz(mhz(8.0)) - 8.0).abs() < 1e-12);
        assert!((khz(20.0) - mhz(0.020)).abs() < 1e-15);
    }
}
