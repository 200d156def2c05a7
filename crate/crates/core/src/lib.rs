//! Simulation and fitting toolkit for optical transfer of lattice-trapped
//! molecules through a three-level Λ system.
//!
//! The crate has three layers:
//!
//! * [`qdyn`]: time-dependent Lindblad master-equation engine for the
//!   {|f⟩, |e⟩, |g⟩} Λ system, with STIRAP pulse scheduling and detuning-scan
//!   drivers (dark resonance, round-trip transfer).
//! * [`lattice`]: Bloch bands of a 1D sinusoidal lattice by plane-wave
//!   diagonalization, Wannier wavepackets, sudden-quench projection between
//!   lattice depths, band-basis time evolution and band-map counting.
//! * [`fitting`]: bounded Nelder-Mead least squares for extracting model
//!   parameters (Ω₂, laser linewidth γ, lattice depth ratio) from scan curves.
//!
//! All rates and frequencies are handled internally in angular units of
//! rad/μs; times are in μs. See [`units`] for conversions.

pub mod fitting;
pub mod lattice;
pub mod qdyn;
pub mod units;

pub use fitting::{fit_autler_townes, fit_depth_ratio, fit_linewidth, FitReport};
pub use lattice::{
    band_map, bloch_bands, evolve_bands, excited_band_loss, project_onto_bands,
    recoil_energy, recovered_fraction_curve, trap_frequency, wannier_ground,
    BandDecomposition, BandStructure, HoldCurve, LatticeParams, ZoneCounting,
};
pub use qdyn::{
    dark_state, evolve, lindblad_rhs, rwa_hamiltonian, square_pulse_scan, stirap_round_trip,
    stirap_schedule, DensityMatrix3, LambdaParams, Observable, PulseSchedule, ScanResult,
    StirapTiming,
};
