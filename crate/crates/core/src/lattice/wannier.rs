//! Lowest-band Wannier wavepacket.

use super::{bloch_bands_with, BandStructure, LatticeError, LatticeParams, DEFAULT_N_BANDS, DEFAULT_N_Q};

/// Localized site-0 wavepacket built as the q-uniform superposition of
/// band-0 Bloch states. With the global phase convention of
/// [`bloch_bands`](super::bloch_bands) it is real, even about the site
/// center and maximally localized.
#[derive(Debug, Clone, PartialEq)]
pub struct WannierPacket {
    pub params: LatticeParams,
    /// u_l(q) = c_{0,l}(q)/√n_q, index [iq * dim + (l+L)].
    coeffs: Vec<f64>,
    q_grid: Vec<f64>,
    dim: usize,
}

impl WannierPacket {
    pub fn n_q(&self) -> usize {
        self.q_grid.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q_grid(&self) -> &[f64] {
        &self.q_grid
    }

    /// Plane-wave coefficients at grid point `iq`.
    pub fn coeffs(&self, iq: usize) -> &[f64] {
        &self.coeffs[iq * self.dim..(iq + 1) * self.dim]
    }

    /// Σ |u|², 1 for a normalized packet.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Evaluate w(x) on the ring, x in units of the lattice period.
    /// The ring holds n_q sites; ∫|w|² dx = 1 with dx in period units.
    pub fn real_space(&self, points_per_site: usize) -> (Vec<f64>, Vec<f64>) {
        let n_q = self.n_q();
        let n = n_q * points_per_site;
        let l_max = (self.dim as isize - 1) / 2;
        let xs: Vec<f64> = (0..n)
            .map(|i| (i as isize - (n / 2) as isize) as f64 / points_per_site as f64)
            .collect();
        let mut w = vec![0.0; n];
        let mut w_im = vec![0.0; n];
        let inv_sqrt_nq = 1.0 / (n_q as f64).sqrt();
        for (iq, &qt) in self.q_grid.iter().enumerate() {
            let c = self.coeffs(iq);
            for (j, &x) in xs.iter().enumerate() {
                let mut re = 0.0;
                let mut im = 0.0;
                for (i, l) in (-l_max..=l_max).enumerate() {
                    let phase = std::f64::consts::PI * (qt + 2.0 * l as f64) * x;
                    re += c[i] * phase.cos();
                    im += c[i] * phase.sin();
                }
                w[j] += re;
                w_im[j] += im;
            }
        }
        // w = (1/√n_q) Σ_q Σ_l u_l(q) e^{iπ(q̃+2l)x}; the imaginary parts
        // cancel pairwise between q and −q
        for (v, vi) in w.iter_mut().zip(&w_im) {
            *v *= inv_sqrt_nq;
            debug_assert!((vi * inv_sqrt_nq).abs() < 1e-9);
        }
        (xs, w)
    }
}

impl WannierPacket {
    /// Raw constructor for test states (single Bloch components and the like).
    #[cfg(test)]
    pub(crate) fn test_only_from_raw(
        params: LatticeParams,
        coeffs: Vec<f64>,
        q_grid: Vec<f64>,
        dim: usize,
    ) -> Self {
        Self { params, coeffs, q_grid, dim }
    }
}

/// Ground-band Wannier packet at site 0 with the default grid.
pub fn wannier_ground(params: &LatticeParams) -> Result<WannierPacket, LatticeError> {
    wannier_ground_with(params, DEFAULT_N_Q, DEFAULT_N_BANDS)
}

/// Ground-band Wannier packet on an explicit grid.
pub fn wannier_ground_with(
    params: &LatticeParams,
    n_q: usize,
    n_bands: usize,
) -> Result<WannierPacket, LatticeError> {
    if params.depth <= 0.0 {
        return Err(LatticeError::InvalidParameter(
            "Wannier construction needs depth > 0".into(),
        ));
    }
    let bands = bloch_bands_with(params, n_q, n_bands)?;
    Ok(wannier_from_bands(&bands))
}

/// Ground-band Wannier packet of an existing band structure.
pub fn wannier_from_bands(bands: &BandStructure) -> WannierPacket {
    let n_q = bands.n_q();
    let dim = bands.dim();
    let inv = 1.0 / (n_q as f64).sqrt();
    let mut coeffs = vec![0.0; n_q * dim];
    for iq in 0..n_q {
        let c = bands.coeffs(iq, 0);
        for i in 0..dim {
            coeffs[iq * dim + i] = c[i] * inv;
        }
    }
    WannierPacket {
        params: bands.params,
        coeffs,
        q_grid: bands.q_grid().to_vec(),
        dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalized_in_q_and_x() {
        let w = wannier_ground(&LatticeParams::rb2(60.0)).unwrap();
        assert_abs_diff_eq!(w.norm_sq(), 1.0, epsilon = 1e-9);
        let (xs, vals) = w.real_space(16);
        let dx = xs[1] - xs[0];
        let norm: f64 = vals.iter().map(|v| v * v * dx).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn even_about_site_center() {
        let w = wannier_ground(&LatticeParams::rb2(60.0)).unwrap();
        let (xs, vals) = w.real_space(16);
        let n = xs.len();
        let mid = n / 2; // x = 0
        for k in 1..n / 2 {
            assert!(
                (vals[mid + k] - vals[mid - k]).abs() < 1e-10,
                "parity violated at |x| = {}",
                xs[mid + k]
            );
        }
    }

    #[test]
    fn deep_lattice_matches_harmonic_ground_state() {
        // s = 60: overlap with the ω_t ground state exceeds 0.99
        let p = LatticeParams::rb2(60.0);
        let w = wannier_ground(&p).unwrap();
        let (xs, vals) = w.real_space(16);
        let dx = xs[1] - xs[0];
        let x0 = 1.0 / (std::f64::consts::PI * 60.0f64.powf(0.25)); // units of a
        let norm = (std::f64::consts::PI * x0 * x0).powf(-0.25);
        let overlap: f64 = xs
            .iter()
            .zip(&vals)
            .map(|(&x, &v)| v * norm * (-x * x / (2.0 * x0 * x0)).exp() * dx)
            .sum();
        assert!(overlap > 0.99, "overlap {overlap}");
        assert!(overlap < 1.0 + 1e-9);
    }

    #[test]
    fn needs_finite_depth() {
        assert!(wannier_ground(&LatticeParams::rb2(0.0)).is_err());
    }
}
