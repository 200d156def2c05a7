//! Sudden-quench projection between lattice depths, band-basis evolution,
//! band-map counting and the hold-time recovery curve.

use super::{bloch_bands_with, BandStructure, LatticeError, LatticeParams, WannierPacket};
use super::{DEFAULT_N_BANDS, DEFAULT_N_Q};
use num_complex::Complex64;
use rayon::prelude::*;

/// Complex amplitudes of a wavepacket over the (band, quasimomentum) grid of
/// one lattice depth. Carries the band energies so it can evolve itself.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    /// c_{n,q}, index [iq * n_bands + n].
    amplitudes: Vec<Complex64>,
    /// E_n(q) in E_r units, same layout.
    energies: Vec<f64>,
    n_q: usize,
    n_bands: usize,
    /// Reference lattice depth s (units of E_r).
    pub depth: f64,
    er_rad_per_us: f64,
}

impl BandDecomposition {
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn amplitude(&self, iq: usize, band: usize) -> Complex64 {
        self.amplitudes[iq * self.n_bands + band]
    }

    /// Σ_{n,q} |c|².
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Total weight per band, Σ_q |c_{n,q}|².
    pub fn band_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_bands];
        for chunk in self.amplitudes.chunks_exact(self.n_bands) {
            for (acc, c) in w.iter_mut().zip(chunk) {
                *acc += c.norm_sqr();
            }
        }
        w
    }

    /// Mean of E_n(q) over the grid (E_r units).
    pub fn mean_band_energy(&self, band: usize) -> f64 {
        let s: f64 = (0..self.n_q).map(|iq| self.energies[iq * self.n_bands + band]).sum();
        s / self.n_q as f64
    }

    /// Build a decomposition with explicit amplitudes on the grid of `bands`
    /// (amplitudes are normalized). Mostly useful for constructing test
    /// states such as a single Bloch component.
    pub fn from_amplitudes(
        bands: &BandStructure,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, LatticeError> {
        if amplitudes.len() != bands.n_q() * bands.n_bands() {
            return Err(LatticeError::Mismatch("amplitude array size".into()));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(LatticeError::InvalidParameter("zero decomposition".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        let mut energies = vec![0.0; bands.n_q() * bands.n_bands()];
        for iq in 0..bands.n_q() {
            for n in 0..bands.n_bands() {
                energies[iq * bands.n_bands() + n] = bands.energy(iq, n);
            }
        }
        Ok(Self {
            amplitudes,
            energies,
            n_q: bands.n_q(),
            n_bands: bands.n_bands(),
            depth: bands.params.depth,
            er_rad_per_us: bands.er_rad_per_us(),
        })
    }
}

/// Expand a wavepacket over the Bloch eigenbasis of `target`.
///
/// Fails with [`LatticeError::IncompleteBasis`] if the retained bands miss
/// more than 1e-4 of the packet's norm.
pub fn project_onto_bands(
    packet: &WannierPacket,
    target: &BandStructure,
) -> Result<BandDecomposition, LatticeError> {
    if packet.n_q() != target.n_q() || packet.dim() != target.dim() {
        return Err(LatticeError::Mismatch(
            "packet and band structure use different grids".into(),
        ));
    }
    if (packet.params.period_nm - target.params.period_nm).abs() > 1e-12
        || (packet.params.mass_kg - target.params.mass_kg).abs() > 1e-40
    {
        return Err(LatticeError::Mismatch("period or mass differs".into()));
    }
    let n_q = target.n_q();
    let nb = target.n_bands();
    let dim = target.dim();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_q * nb];
    let mut energies = vec![0.0; n_q * nb];
    for iq in 0..n_q {
        let u = packet.coeffs(iq);
        for n in 0..nb {
            let a = target.coeffs(iq, n);
            let mut dot = 0.0;
            for i in 0..dim {
                dot += a[i] * u[i];
            }
            amplitudes[iq * nb + n] = Complex64::new(dot, 0.0);
            energies[iq * nb + n] = target.energy(iq, n);
        }
    }
    let total: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let deficit = packet.norm_sq() - total;
    if deficit > 1e-4 {
        return Err(LatticeError::IncompleteBasis { deficit });
    }
    Ok(BandDecomposition {
        amplitudes,
        energies,
        n_q,
        n_bands: nb,
        depth: target.params.depth,
        er_rad_per_us: target.er_rad_per_us(),
    })
}

/// Free phase evolution in the band basis: c_{n,q} → c_{n,q} e^{−iE_n(q)t/ħ}.
pub fn evolve_bands(decomp: &BandDecomposition, t_us: f64) -> BandDecomposition {
    let mut out = decomp.clone();
    for (c, &e) in out.amplitudes.iter_mut().zip(&decomp.energies) {
        let phase = -e * decomp.er_rad_per_us * t_us;
        *c *= Complex64::from_polar(1.0, phase);
    }
    out
}

/// Per-zone populations after adiabatic band mapping: band n and
/// quasimomentum q map to free momentum in the n-th Brillouin zone, so the
/// zone populations equal the band weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMap {
    pub zone_populations: Vec<f64>,
}

impl BandMap {
    pub fn zone(&self, n: usize) -> f64 {
        self.zone_populations[n]
    }

    /// Weight inside the central region of the 3D-separable distribution
    /// for the given counting rule (zone-0 weight to the 1st, 2nd or 3rd
    /// power for an isotropic cubic lattice).
    pub fn central_weight(&self, counting: ZoneCounting) -> f64 {
        self.zone_populations[0].powi(counting.axes() as i32)
    }
}

pub fn band_map(decomp: &BandDecomposition) -> BandMap {
    BandMap { zone_populations: decomp.band_weights() }
}

/// How many axes of the separable 3D distribution the counting region
/// restricts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZoneCounting {
    /// One axis: the raw 1D zone-0 weight.
    PerAxis,
    /// Central square of the column-integrated (imaged) distribution: the
    /// two resolved axes. This is the counting rule of the band-map images.
    #[default]
    ImagedSquare,
    /// Central cube: all three axes in zone 0.
    CentralCube,
}

impl ZoneCounting {
    pub fn axes(&self) -> u32 {
        match self {
            ZoneCounting::PerAxis => 1,
            ZoneCounting::ImagedSquare => 2,
            ZoneCounting::CentralCube => 3,
        }
    }
}

/// Zero the amplitudes of every band whose mean energy exceeds
/// `well_depth_er` (E_r units). No renormalization; returns the removed
/// weight alongside the surviving decomposition.
pub fn excited_band_loss(
    decomp: &BandDecomposition,
    well_depth_er: f64,
) -> (BandDecomposition, f64) {
    let mut out = decomp.clone();
    let mut lost = 0.0;
    for n in 0..decomp.n_bands {
        if decomp.mean_band_energy(n) > well_depth_er {
            for iq in 0..decomp.n_q {
                lost += out.amplitudes[iq * decomp.n_bands + n].norm_sqr();
                out.amplitudes[iq * decomp.n_bands + n] = Complex64::new(0.0, 0.0);
            }
        }
    }
    (out, lost)
}

/// Recovery curve over hold time.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldCurve {
    pub tau_us: Vec<f64>,
    pub recovered: Vec<f64>,
    /// Evolved shallow-lattice decompositions per τ, when requested.
    pub snapshots: Option<Vec<BandDecomposition>>,
}

/// Deep-lattice Wannier packet → sudden projection onto the lattice a
/// factor `ratio` shallower → free band evolution for each τ → projection
/// back onto the deep lattice's lowest band, counted with `counting` and
/// scaled by the round-trip transfer efficiency `stirap_eff`.
pub fn recovered_fraction_curve(
    base: &LatticeParams,
    ratio: f64,
    tau_grid: &[f64],
    stirap_eff: f64,
    counting: ZoneCounting,
) -> Result<HoldCurve, LatticeError> {
    recovered_fraction_curve_detailed(base, ratio, tau_grid, stirap_eff, counting, false)
}

/// As [`recovered_fraction_curve`], optionally keeping the evolved
/// shallow-basis decomposition at every τ.
pub fn recovered_fraction_curve_detailed(
    base: &LatticeParams,
    ratio: f64,
    tau_grid: &[f64],
    stirap_eff: f64,
    counting: ZoneCounting,
    keep_snapshots: bool,
) -> Result<HoldCurve, LatticeError> {
    base.validate()?;
    if ratio < 1.0 || !ratio.is_finite() {
        return Err(LatticeError::InvalidParameter(format!(
            "depth ratio {ratio} must be ≥ 1"
        )));
    }
    if !(0.0..=1.0).contains(&stirap_eff) {
        return Err(LatticeError::InvalidParameter(format!(
            "stirap_eff {stirap_eff} must be in [0, 1]"
        )));
    }
    if tau_grid.is_empty() {
        return Err(LatticeError::InvalidParameter("empty hold-time grid".into()));
    }
    if tau_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(LatticeError::InvalidParameter("hold times must be ≥ 0".into()));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LatticeError::InvalidParameter(
            "hold-time grid must be strictly increasing".into(),
        ));
    }

    let deep = bloch_bands_with(base, DEFAULT_N_Q, DEFAULT_N_BANDS)?;
    let shallow = bloch_bands_with(&base.with_depth(base.depth / ratio), DEFAULT_N_Q, DEFAULT_N_BANDS)?;
    deep.compatible(&shallow)?;

    let n_q = deep.n_q();
    let nb = deep.n_bands();
    let dim = deep.dim();
    let kappa = shallow.er_rad_per_us();

    // o_n(q) = ⟨shallow band n | deep band 0⟩ at each q
    let mut overlaps = vec![0.0; n_q * nb];
    for iq in 0..n_q {
        let b0 = deep.coeffs(iq, 0);
        for n in 0..nb {
            let a = shallow.coeffs(iq, n);
            let mut dot = 0.0;
            for i in 0..dim {
                dot += a[i] * b0[i];
            }
            overlaps[iq * nb + n] = dot;
        }
    }
    for iq in 0..n_q {
        let total: f64 = (0..nb).map(|n| overlaps[iq * nb + n].powi(2)).sum();
        if 1.0 - total > 1e-4 {
            return Err(LatticeError::IncompleteBasis { deficit: 1.0 - total });
        }
    }

    let axes = counting.axes() as i32;
    let recovered: Vec<f64> = tau_grid
        .par_iter()
        .map(|&tau| {
            let mut sum = 0.0;
            for iq in 0..n_q {
                let mut amp = Complex64::new(0.0, 0.0);
                for n in 0..nb {
                    let o = overlaps[iq * nb + n];
                    let phase = -shallow.energy(iq, n) * kappa * tau;
                    amp += Complex64::from_polar(o * o, phase);
                }
                sum += amp.norm_sqr();
            }
            let per_axis = sum / n_q as f64;
            stirap_eff * per_axis.powi(axes)
        })
        .collect();

    let snapshots = if keep_snapshots {
        let inv = 1.0 / (n_q as f64).sqrt();
        let base_amps: Vec<Complex64> = (0..n_q * nb)
            .map(|k| Complex64::new(overlaps[k] * inv, 0.0))
            .collect();
        let base_decomp = BandDecomposition::from_amplitudes(&shallow, base_amps)?;
        Some(tau_grid.iter().map(|&t| evolve_bands(&base_decomp, t)).collect())
    } else {
        None
    };

    Ok(HoldCurve { tau_us: tau_grid.to_vec(), recovered, snapshots })
}
